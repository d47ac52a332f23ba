"""Integer points of ``ker 𝐝`` in the positive orthant close to a given vector.

Everything is exact: linear programs run a two-phase tableau simplex over
:class:`fractions.Fraction` with Bland's rule, the kernel lattice comes from
a Hermite normal form, and integrality is enforced by branch and bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from math import floor, ceil
from typing import Optional, Sequence

from .errors import BadPad
from .lattice import DGMatrix, OrbitVector, norms

Matrix = tuple[tuple[int, ...], ...]

DEFAULT_BUDGET = 10**6
BOX_BUDGET = 4096


# ---------------------------------------------------------------------------
# exact simplex


@dataclass
class LPResult:
    status: str  # "optimal", "infeasible", "unbounded"
    value: Optional[Fraction] = None
    x: Optional[list[Fraction]] = None
    pivots: int = 0


def _pivot(T, z, basis, r, j):
    row = T[r]
    piv = row[j]
    if piv != 1:
        row = [v / piv for v in row]
        T[r] = row
    nz = [k for k, v in enumerate(row) if v]
    for i, other in enumerate(T):
        if i != r:
            f = other[j]
            if f:
                for k in nz:
                    other[k] -= f * row[k]
    if z is not None:
        f = z[j]
        if f:
            for k in nz:
                z[k] -= f * row[k]
    basis[r] = j


def _reduced_costs(T, basis, cost):
    width = len(T[0]) if T else len(cost) + 1
    z = [Fraction(0)] * width
    for j, c in enumerate(cost):
        z[j] = Fraction(c)
    for i, bi in enumerate(basis):
        cb = cost[bi] if bi < len(cost) else 0
        if cb:
            row = T[i]
            for k, v in enumerate(row):
                if v:
                    z[k] -= cb * v
    return z


def _run(T, z, basis, allowed: int) -> tuple[str, int]:
    pivots = 0
    while True:
        j = next((k for k in range(allowed) if z[k] < 0), None)
        if j is None:
            return "optimal", pivots
        best = None
        for i, row in enumerate(T):
            a = row[j]
            if a > 0:
                key = (row[-1] / a, basis[i])
                if best is None or key < best[0]:
                    best = (key, i)
        if best is None:
            return "unbounded", pivots
        _pivot(T, z, basis, best[1], j)
        pivots += 1


def solve_lp(A: Sequence[Sequence], b: Sequence, c: Sequence) -> LPResult:
    """Minimize ``c·y`` subject to ``A y = b``, ``y ≥ 0``."""
    n = len(c)
    m = len(A)
    T = []
    for i in range(m):
        row = [Fraction(v) for v in A[i]]
        rhs = Fraction(b[i])
        if rhs < 0:
            row = [-v for v in row]
            rhs = -rhs
        art = [Fraction(0)] * m
        art[i] = Fraction(1)
        T.append(row + art + [rhs])
    basis = list(range(n, n + m))
    cost1 = [0] * n + [1] * m
    z = _reduced_costs(T, basis, cost1)
    status, piv1 = _run(T, z, basis, n)
    if -z[-1] > 0:
        return LPResult("infeasible", pivots=piv1)
    # drive zero-level artificials out of the basis; drop redundant rows
    keep = []
    for i in range(len(T)):
        if basis[i] >= n:
            j = next((k for k in range(n) if T[i][k] != 0), None)
            if j is None:
                continue
            _pivot(T, None, basis, i, j)
        keep.append(i)
    T = [T[i][:n] + [T[i][-1]] for i in keep]
    basis = [basis[i] for i in keep]
    z = _reduced_costs(T, basis, list(c))
    status, piv2 = _run(T, z, basis, n)
    if status == "unbounded":
        return LPResult("unbounded", pivots=piv1 + piv2)
    x = [Fraction(0)] * n
    for i, bi in enumerate(basis):
        x[bi] = T[i][-1]
    return LPResult("optimal", -z[-1], x, piv1 + piv2)


# ---------------------------------------------------------------------------
# Hermite normal form and the kernel lattice


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def hnf_rows(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row-style Hermite normal form: echelon, positive pivots, entries above
    each pivot reduced into ``[0, pivot)``. Zero rows are dropped."""
    M = [list(map(int, r)) for r in rows]
    if not M:
        return []
    ncols = len(M[0])
    r = 0
    pivots = []
    for c in range(ncols):
        if r >= len(M):
            break
        for i in range(r + 1, len(M)):
            if M[i][c]:
                a, b = M[r][c], M[i][c]
                g, s, t = _egcd(a, b)
                ra, rb = M[r], M[i]
                M[r] = [s * x + t * y for x, y in zip(ra, rb)]
                M[i] = [(-b // g) * x + (a // g) * y for x, y in zip(ra, rb)]
        if M[r][c] == 0:
            continue
        if M[r][c] < 0:
            M[r] = [-x for x in M[r]]
        for i in range(r):
            q = M[i][c] // M[r][c]
            if q:
                M[i] = [x - q * y for x, y in zip(M[i], M[r])]
        pivots.append(c)
        r += 1
    return [row for row in M[:r]]


def kernel_lattice_basis(matrix: Sequence[Sequence[int]], ncols: int) -> list[list[int]]:
    """A ℤ-basis of ``{x ∈ ℤⁿ : matrix·x = 0}`` in row Hermite normal form."""
    m = len(matrix)
    # columns of [matrix; I] under unimodular column operations
    cols = [[int(matrix[i][j]) for i in range(m)] + [1 if k == j else 0 for k in range(ncols)] for j in range(ncols)]
    k = 0
    for r in range(m):
        if k >= ncols:
            break
        for c in range(k + 1, ncols):
            b = cols[c][r]
            if b:
                a = cols[k][r]
                g, s, t = _egcd(a, b)
                ca, cb = cols[k], cols[c]
                cols[k] = [s * x + t * y for x, y in zip(ca, cb)]
                cols[c] = [(-b // g) * x + (a // g) * y for x, y in zip(ca, cb)]
        if cols[k][r]:
            k += 1
    kernel = [col[m:] for col in cols[k:]]
    return hnf_rows(kernel)


def lattice_coordinates(basis: Sequence[Sequence[int]], v: Sequence) -> list[Fraction]:
    """Coefficients of ``v`` in an HNF ``basis`` (``v`` must lie in its span)."""
    rest = [Fraction(x) for x in v]
    coeffs = []
    for row in basis:
        p = next(j for j, x in enumerate(row) if x)
        c = rest[p] / row[p]
        coeffs.append(c)
        if c:
            rest = [x - c * y for x, y in zip(rest, row)]
    return coeffs


# ---------------------------------------------------------------------------
# problems and solutions


@dataclass(frozen=True)
class ConeProblem:
    matrix: Matrix
    source_weights: tuple[int, ...]
    target_weights: tuple[int, ...]
    lam: tuple[int, ...]
    source_scale: Fraction = Fraction(1)
    target_scale: Fraction = Fraction(1)

    def __post_init__(self):
        n = len(self.source_weights)
        if len(self.lam) != n or any(len(r) != n for r in self.matrix):
            raise ValueError("matrix, weights and λ disagree on dimension")
        if len(self.target_weights) != len(self.matrix):
            raise ValueError("one target weight per matrix row")
        if any(w <= 0 for w in self.source_weights + self.target_weights):
            raise ValueError("weights must be positive")
        if self.source_scale <= 0 or self.target_scale <= 0:
            raise ValueError("scales must be positive")

    @property
    def ncols(self) -> int:
        return len(self.source_weights)

    def apply(self, x: Sequence) -> list:
        return [sum(a * b for a, b in zip(row, x)) for row in self.matrix]

    def source_norm(self, x: Sequence) -> Fraction:
        return self.source_scale * sum(w * abs(Fraction(v)) for w, v in zip(self.source_weights, x))

    def target_norm(self, y: Sequence) -> Fraction:
        return self.target_scale * sum(w * abs(Fraction(v)) for w, v in zip(self.target_weights, y))

    def distance(self, x: Sequence, y: Sequence) -> Fraction:
        return self.source_norm([Fraction(a) - Fraction(b) for a, b in zip(x, y)])


@dataclass
class ConeSolution:
    lambda_prime: tuple[int, ...]
    distance: Fraction
    certified: dict
    achieved_ratio: Optional[Fraction]
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "lambda_prime": list(self.lambda_prime),
            "distance": str(self.distance),
            "certified": dict(self.certified),
            "achieved_ratio": None if self.achieved_ratio is None else str(self.achieved_ratio),
            "diagnostics": {k: (str(v) if isinstance(v, Fraction) else v) for k, v in self.diagnostics.items()},
        }


def cone_problem_from_dg(dgm: DGMatrix, lam: OrbitVector, num_vertices: int, num_edges: int) -> ConeProblem:
    """The problem ``‖λ−λ′‖_V`` vs ``‖𝐝λ‖_E`` for a vector of Λ_V."""
    return ConeProblem(
        matrix=dgm.entries,
        source_weights=tuple(b.cls.degree for b in dgm.cols),
        target_weights=tuple(b.cls.degree for b in dgm.rows),
        lam=lam.coords,
        source_scale=Fraction(1, num_vertices),
        target_scale=Fraction(1, num_edges) if num_edges else Fraction(1),
    )


# ---------------------------------------------------------------------------
# nearest point of C ∩ K


def nearest_kernel_point(problem: ConeProblem, v: Optional[Sequence] = None) -> tuple[list[Fraction], Fraction]:
    """A point of ``C ∩ K`` at minimal weighted-L¹ distance from ``v`` (default λ).

    Among L¹-optimal points the one of least weighted L∞ deviation is chosen,
    by a second LP over the optimal face.
    """
    n = problem.ncols
    target = [Fraction(x) for x in (problem.lam if v is None else v)]
    w = problem.source_weights
    m = len(problem.matrix)
    # variables: x (n), p (n), q (n); x - p + q = v
    A, b = [], []
    for row in problem.matrix:
        A.append(list(row) + [0] * (2 * n))
        b.append(0)
    for i in range(n):
        r = [0] * (3 * n)
        r[i], r[n + i], r[2 * n + i] = 1, -1, 1
        A.append(r)
        b.append(target[i])
    cost = [0] * n + list(w) + list(w)
    first = solve_lp(A, b, cost)
    assert first.status == "optimal"
    opt = first.value
    # second stage: minimize t with w_i(p_i+q_i) ≤ t on the face Σ w(p+q) = opt
    width = 3 * n + 1 + n
    A2 = [r + [0] * (1 + n) for r in A]
    b2 = list(b)
    for i in range(n):
        r = [0] * width
        r[n + i], r[2 * n + i], r[3 * n], r[3 * n + 1 + i] = w[i], w[i], -1, 1
        A2.append(r)
        b2.append(0)
    A2.append(cost + [0] * (1 + n))
    b2.append(opt)
    second = solve_lp(A2, b2, [0] * (3 * n) + [1] + [0] * n)
    x = second.x[:n] if second.status == "optimal" else first.x[:n]
    return x, problem.distance(x, target)


# ---------------------------------------------------------------------------
# integer points


def _key(problem: ConeProblem, x: Sequence[int]) -> tuple:
    diffs = [w * abs(a - b) for w, a, b in zip(problem.source_weights, problem.lam, x)]
    return (sum(diffs), max(diffs, default=0), tuple(x))


def _box_search(problem, basis, centre, lam_norm, budget):
    """Best lattice point ``Σ z_j·basis_j`` near ``centre`` over growing coefficient boxes."""
    k = len(basis)
    n = problem.ncols
    base = [round(c) for c in centre]
    best = None
    used = 0
    radius = 1
    while (2 * radius + 1) ** k <= max(budget - used, 0):
        for off in product(range(-radius, radius + 1), repeat=k):
            used += 1
            z = [bz + o for bz, o in zip(base, off)]
            x = [sum(z[j] * basis[j][i] for j in range(k)) for i in range(n)]
            if min(x, default=0) < 0:
                continue
            if sum(w * a for w, a in zip(problem.source_weights, x)) > lam_norm:
                continue
            key = _key(problem, x)
            if best is None or key < best:
                best = key
        radius *= 2
    return best, used


def _branch_and_bound(problem, lam_norm, incumbent, budget):
    """Exact minimisation of ``(L¹, L∞)`` distance over integer cone-kernel points."""
    n = problem.ncols
    w = problem.source_weights
    lam = problem.lam
    big = 2 * lam_norm + 1
    m = len(problem.matrix)
    # variables: x(n) p(n) q(n) t(1) s(n) u(1); then one slack per branching row
    base_width = 4 * n + 2
    A, b = [], []
    for row in problem.matrix:
        A.append(list(row) + [0] * (base_width - n))
        b.append(0)
    for i in range(n):
        r = [0] * base_width
        r[i], r[n + i], r[2 * n + i] = 1, -1, 1
        A.append(r)
        b.append(lam[i])
    for i in range(n):
        r = [0] * base_width
        r[n + i], r[2 * n + i], r[3 * n], r[3 * n + 1 + i] = w[i], w[i], -1, 1
        A.append(r)
        b.append(0)
    r = [0] * base_width
    for i in range(n):
        r[i] = w[i]
    r[4 * n + 1] = 1
    A.append(r)
    b.append(lam_norm)
    cost = [0] * n + [big * wi for wi in w] * 2 + [1] + [0] * (n + 1)

    def objective(key):
        return big * key[0] + key[1]

    best = incumbent
    nodes = 0
    stack = [()]
    exhausted = False
    while stack:
        if nodes >= budget:
            exhausted = True
            break
        bounds = stack.pop()
        nodes += 1
        extra = len(bounds)
        An = [row + [0] * extra for row in A]
        bn = list(b)
        for k, (j, sense, val) in enumerate(bounds):
            row = [0] * (base_width + extra)
            row[j] = 1
            row[base_width + k] = 1 if sense == "le" else -1
            An.append(row)
            bn.append(val)
        res = solve_lp(An, bn, cost + [0] * extra)
        if res.status != "optimal":
            continue
        if best is not None and res.value > objective(best):
            continue
        xs = res.x[:n]
        frac = next((j for j, v in enumerate(xs) if v.denominator != 1), None)
        if frac is None:
            x = [int(v) for v in xs]
            key = _key(problem, x)
            if best is None or key < best:
                best = key
            continue
        v = xs[frac]
        lo, hi = (frac, "le", floor(v)), (frac, "ge", ceil(v))
        # explore the nearer side first
        if v - floor(v) < Fraction(1, 2):
            stack.extend([bounds + (hi,), bounds + (lo,)])
        else:
            stack.extend([bounds + (lo,), bounds + (hi,)])
    return best, nodes, exhausted


def integer_kernel_point(problem: ConeProblem, budget: int = DEFAULT_BUDGET) -> ConeSolution:
    """λ′ ∈ Λ⁺ ∩ ker 𝐝 with ‖λ′‖ ≤ ‖λ‖ and ‖λ−λ′‖ as small as the search finds.

    The constructive route runs first: shrink λ by θ, take the nearest real
    point of C ∩ K and round it over the HNF kernel lattice. Its result seeds
    an exact branch and bound, and 0 is the fallback when both come up empty.
    """
    lam = tuple(int(x) for x in problem.lam)
    if any(x < 0 for x in lam):
        raise ValueError("λ must lie in the positive cone")
    n = problem.ncols
    d_lam = problem.apply(lam)
    d_norm = problem.target_norm(d_lam)
    lam_norm_raw = sum(w * a for w, a in zip(problem.source_weights, lam))
    basis = kernel_lattice_basis(problem.matrix, n)
    A_const = max((problem.source_norm(row) for row in basis), default=Fraction(0))
    diagnostics = {
        "c1": Fraction(1),
        "A": A_const,
        "M": problem.target_scale * min(problem.target_weights, default=1),
        "kernel_rank": len(basis),
    }
    if all(v == 0 for v in d_lam):
        diagnostics.update(theta=Fraction(0), source="identity", nodes=0, budget_exhausted=False)
        return ConeSolution(lam, Fraction(0), _certify(problem, lam, lam), Fraction(0), diagnostics)

    lam_norm = problem.source_norm(lam)
    theta = min(Fraction(1), (diagnostics["c1"] * d_norm + A_const) / lam_norm)
    diagnostics["theta"] = theta
    shrunk = [(1 - theta) * x for x in lam]
    v_dd, _ = nearest_kernel_point(problem, shrunk)
    diagnostics["v_double_prime"] = [str(x) for x in v_dd]

    zero = tuple([0] * n)
    best = _key(problem, zero)
    source = "zero"
    used = 0
    if basis:
        centre = lattice_coordinates(basis, v_dd)
        found, used = _box_search(problem, basis, centre, lam_norm_raw, min(BOX_BUDGET, budget))
        if found is not None and found < best:
            best, source = found, "box"
        improved, nodes, exhausted = _branch_and_bound(problem, lam_norm_raw, best, max(budget - used, 1))
        if improved is not None and improved < best:
            best, source = improved, "branch_and_bound"
        used += nodes
    else:
        exhausted = False
    lam_prime = tuple(best[2])
    distance = problem.distance(lam, lam_prime)
    diagnostics.update(source=source, nodes=used, budget_exhausted=exhausted)
    ratio = distance / d_norm
    return ConeSolution(lam_prime, distance, _certify(problem, lam, lam_prime), ratio, diagnostics)


def _certify(problem: ConeProblem, lam, lam_prime) -> dict:
    return {
        "in_kernel": all(v == 0 for v in problem.apply(lam_prime)),
        "in_cone": all(v >= 0 for v in lam_prime),
        "norm_nonincreasing": problem.source_norm(lam_prime) <= problem.source_norm(lam),
    }


def pad_to_norm(lam_dd: OrbitVector, target: int, singleton: OrbitVector, gog) -> OrbitVector:
    """``λ″ + (target − ‖λ″‖_V)·s^♯``."""
    gap = Fraction(target) - norms(lam_dd, "V", gog)
    if gap < 0 or gap.denominator != 1:
        raise BadPad(f"cannot pad from norm {norms(lam_dd, 'V', gog)} to {target}")
    if norms(singleton, "V", gog) != 1:
        raise BadPad("padding vector must have norm 1")
    return lam_dd + singleton.scale(int(gap))
