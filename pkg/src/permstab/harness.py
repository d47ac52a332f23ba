"""Random honest actions, perturbations, brute-force oracles and the trial runner."""

from __future__ import annotations

import csv
import io
import time
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations, product
from typing import Iterator, Optional, Sequence

import numpy as np

from .cone import DEFAULT_BUDGET
from .correct import stabilize
from .errors import TooLarge
from .gog import AlmostAction, GraphOfGroups, action_distance, defect, tree_bfs_order
from .groups import (
    FiniteAction,
    FiniteGroup,
    coset_action,
    disjoint_union,
    equivariant_matching,
    extend_action,
    orbits,
    subgroup_classes,
)
from .lattice import OrbitVector, dg_matrix, kernel_defect, vertex_basis
from .perms import compose, identity, inverse
from . import zoo


def make_rng(seed) -> np.random.Generator:
    """PCG64 stream; identical seeds give identical draws on every platform."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def trial_seed(master: int, index: int) -> int:
    return int(np.random.SeedSequence([master, index]).generate_state(1, dtype=np.uint64)[0] >> 1)


# ---------------------------------------------------------------------------
# kernel-cone generators


def _vertex_options(g: FiniteGroup, norm: int) -> list[tuple[int, ...]]:
    degrees = [c.degree for c in subgroup_classes(g)]
    out = []

    def rec(i, left, acc):
        if i == len(degrees):
            if left == 0:
                out.append(tuple(acc))
            return
        for k in range(left // degrees[i] + 1):
            rec(i + 1, left - k * degrees[i], acc + [k])

    rec(0, norm, [])
    return out


def kernel_points_of_norm(gog: GraphOfGroups, norm: int) -> list[tuple[int, ...]]:
    """All of Λ_V⁺ ∩ ker 𝐝_𝒢 with ‖·‖_V = ``norm`` (every vertex block has that norm)."""
    dgm = dg_matrix(gog)
    options = [_vertex_options(gog.vertex_groups[v], norm) for v in gog.vertices]
    out = []
    for combo in product(*options):
        vec = tuple(c for block in combo for c in block)
        if not any(sum(a * x for a, x in zip(row, vec)) for row in dgm.entries):
            out.append(vec)
    return out


def kernel_cone_generators(gog: GraphOfGroups, max_norm: int = 12) -> list[tuple[int, ...]]:
    """Irreducible elements of the kernel cone up to ``max_norm``."""
    by_norm = {k: kernel_points_of_norm(gog, k) for k in range(1, max_norm + 1)}
    everything = {p for pts in by_norm.values() for p in pts}
    gens: list[tuple[int, ...]] = []
    for k in range(1, max_norm + 1):
        for p in by_norm[k]:
            reducible = any(
                all(a >= b for a, b in zip(p, q)) and tuple(a - b for a, b in zip(p, q)) in everything
                for q in gens
            )
            if not reducible:
                gens.append(p)
    return gens


def random_kernel_vector(gog: GraphOfGroups, degree: int, rng, generators=None) -> OrbitVector:
    """Random element of Λ_V⁺ ∩ ker 𝐝_𝒢 with ‖·‖_V = ``degree``."""
    basis = vertex_basis(gog)
    gens = generators if generators is not None else kernel_cone_generators(gog)
    base = gog.vertices[0]
    weights = [b.cls.degree if b.site == ("vertex", base) else 0 for b in basis]
    norm_of = [sum(w * c for w, c in zip(weights, g)) for g in gens]
    coords = [0] * len(basis)
    left = degree
    while left > 0:
        fits = [i for i, k in enumerate(norm_of) if k <= left]
        i = fits[int(rng.integers(len(fits)))]
        coords = [a + b for a, b in zip(coords, gens[i])]
        left -= norm_of[i]
    return OrbitVector(basis, tuple(coords))


def honest_action_from_vector(gog: GraphOfGroups, lam: OrbitVector, rng) -> AlmostAction:
    """An exact action with sharp ``lam``, randomised through relabelling and matchings."""
    actions: dict[int, FiniteAction] = {}
    n = None
    for v, e in tree_bfs_order(gog):
        g = gog.vertex_groups[v]
        block = lam.block(("vertex", v))
        if e is None:
            parts = []
            for c, cls in zip(block, subgroup_classes(g)):
                parts.extend([coset_action(g, cls.stabilizer)] * c)
            model = disjoint_union(parts)
            n = model.degree
            relabel = tuple(int(x) for x in rng.permutation(n))
            back = inverse(relabel)
            actions[v] = FiniteAction(g, tuple(compose(relabel, compose(p, back)) for p in model.perms))
        else:
            phi = actions[gog.o(e)].pullback(gog.inc_bar(e))
            actions[v] = extend_action(phi, gog.inc(e), block, rng=rng)
    letters = {}
    for e in gog.oriented_edges:
        if gog.in_tree(e):
            letters[e] = identity(n)
            continue
        a = actions[gog.t(e)].pullback(gog.inc(e))
        b = actions[gog.o(e)].pullback(gog.inc_bar(e))
        f = equivariant_matching(gog.edge_groups[e], b.perms, range(n), a.perms, range(n), rng=rng)
        letters[e] = tuple(f[x] for x in range(n))
    return AlmostAction(gog, n, actions, letters)


def random_honest_action(gog: GraphOfGroups, degree: int, seed=0, generators=None) -> AlmostAction:
    if degree < 1:
        raise ValueError("degree must be at least 1")
    rng = make_rng(seed)
    lam = random_kernel_vector(gog, degree, rng, generators)
    return honest_action_from_vector(gog, lam, rng)


# ---------------------------------------------------------------------------
# perturbations

MODELS = ("letters", "vertex", "retype", "transpositions", "mixed")


@dataclass
class Perturbed:
    action: AlmostAction
    edits: int
    kinds: list[str] = field(default_factory=list)


def _random_pair(rng, n):
    x = int(rng.integers(n))
    y = int(rng.integers(n - 1))
    return x, y + (y >= x)


def perturb(rho: AlmostAction, model: str = "letters", edits: int = 1, seed=0) -> Perturbed:
    """Apply ``edits`` random local changes.

    ``letters`` composes a stable letter with a transposition; ``vertex``
    conjugates one vertex action by a transposition; ``retype`` makes one
    vertex-group orbit pointwise fixed; ``mixed`` draws among the three.
    Vertex actions stay honest under every model.
    """
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}")
    rng = make_rng(seed)
    gog = rho.gog
    n = rho.degree
    actions = dict(rho.vertex_actions)
    letters = dict(rho.stable_letters)
    kinds = []
    if n < 2:
        return Perturbed(rho, 0)
    for _ in range(edits):
        kind = model
        if model == "mixed":
            kind = ("letters", "vertex", "retype")[int(rng.integers(3))]
        elif model == "transpositions":
            kind = ("letters", "vertex")[int(rng.integers(2))]
        if kind == "letters" and not gog.oriented_edges:
            kind = "vertex"
        if kind == "letters":
            e = gog.oriented_edges[int(rng.integers(len(gog.oriented_edges)))]
            x, y = _random_pair(rng, n)
            p = list(letters[e])
            p[x], p[y] = p[y], p[x]
            letters[e] = tuple(p)
        elif kind == "vertex":
            v = gog.vertices[int(rng.integers(len(gog.vertices)))]
            x, y = _random_pair(rng, n)
            tau = list(range(n))
            tau[x], tau[y] = y, x
            tau = tuple(tau)
            act = actions[v]
            actions[v] = FiniteAction(act.group, tuple(compose(tau, compose(p, tau)) for p in act.perms))
        else:
            v = gog.vertices[int(rng.integers(len(gog.vertices)))]
            act = actions[v]
            x = int(rng.integers(n))
            orb = next(o for o in orbits(act) if x in o)
            new = []
            for p in act.perms:
                q = list(p)
                for y in orb:
                    q[y] = y
                new.append(tuple(q))
            actions[v] = FiniteAction(act.group, tuple(new))
        kinds.append(kind)
    return Perturbed(AlmostAction(gog, n, actions, letters), edits, kinds)


# ---------------------------------------------------------------------------
# exhaustive enumeration


def all_homs(g: FiniteGroup, degree: int) -> list[FiniteAction]:
    """Every homomorphism ``g → Sym(degree)``."""
    if degree > 6 or g.order > 6:
        raise TooLarge("exhaustive enumeration limited to degree ≤ 6 and |G| ≤ 6")
    from .errors import NotAnAction
    from .groups import action_from_generators

    perms = list(permutations(range(degree)))
    out = []
    gens = g.generators
    for images in product(perms, repeat=len(gens)):
        try:
            out.append(action_from_generators(g, degree, dict(zip(gens, images))))
        except NotAnAction:
            continue
    return out


def brute_force_actions(gog: GraphOfGroups, degree: int) -> list[AlmostAction]:
    """All homomorphisms π₁(𝒢,T) → Sym(degree)."""
    if degree > 6 or any(gog.vertex_groups[v].order > 6 for v in gog.vertices):
        raise TooLarge("exhaustive enumeration limited to degree ≤ 6 and vertex groups of order ≤ 6")
    per_vertex = [all_homs(gog.vertex_groups[v], degree) for v in gog.vertices]
    sym = [tuple(p) for p in permutations(range(degree))]
    ident = identity(degree)
    out = []
    for combo in product(*per_vertex):
        actions = dict(zip(gog.vertices, combo))
        options = []
        ok = True
        for e in gog.oriented_edges:
            ge = gog.edge_groups[e]
            a = actions[gog.t(e)].pullback(gog.inc(e)).perms
            b = actions[gog.o(e)].pullback(gog.inc_bar(e)).perms
            if gog.in_tree(e):
                if a != b:
                    ok = False
                    break
                options.append([ident])
            else:
                good = [s for s in sym if all(compose(a[k], s) == compose(s, b[k]) for k in ge.elements)]
                if not good:
                    ok = False
                    break
                options.append(good)
        if not ok:
            continue
        for letters in product(*options):
            out.append(AlmostAction(gog, degree, actions, dict(zip(gog.oriented_edges, letters))))
    return out


ORACLE_GAP_ALARM = 3


def oracle_gap(rho: AlmostAction, distance: Fraction, candidates: Optional[Sequence[AlmostAction]] = None) -> Optional[Fraction]:
    """``distance / min d_{X,S}(ρ, ρ₀)`` over every exact ρ₀ on the same set.

    ``None`` when ρ is itself exact (the minimum is 0).
    """
    pool = brute_force_actions(rho.gog, rho.degree) if candidates is None else candidates
    best = min(action_distance(rho, other) for other in pool)
    if best == 0:
        return None
    return Fraction(distance) / best


# ---------------------------------------------------------------------------
# trials


@dataclass(frozen=True)
class TrialConfig:
    gog: str
    degree: int
    model: str = "mixed"
    edits: Optional[int] = 1
    rate: Optional[float] = None
    seed: int = 0
    trials: int = 1
    budget: int = DEFAULT_BUDGET

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("degree must be at least 1")
        if self.rate is not None and not 0 <= self.rate <= 1:
            raise ValueError("rate must lie in [0, 1]")

    def edit_count(self) -> int:
        if self.rate is not None:
            return max(1, round(self.rate * self.degree))
        return int(self.edits or 0)


@dataclass(frozen=True)
class TrialRecord:
    gog: str
    degree: int
    model: str
    seed: int
    edits: int
    delta: Fraction
    kernel_defect: Fraction
    kernel_bound_ok: bool
    cone_ratio: Optional[Fraction]
    distance: Fraction
    output_defect: Fraction
    fix_bound_ok: bool
    runtime_ms: float
    fallback: bool

    def row(self) -> dict:
        return {
            "gog": self.gog,
            "|X|": self.degree,
            "model": self.model,
            "seed": self.seed,
            "delta": str(self.delta),
            "kernel_defect": str(self.kernel_defect),
            "cone_ratio": "" if self.cone_ratio is None else str(self.cone_ratio),
            "distance": str(self.distance),
            "runtime_ms": f"{self.runtime_ms:.3f}",
            "fallback": int(self.fallback),
        }


CSV_COLUMNS = ["gog", "|X|", "model", "seed", "delta", "kernel_defect", "cone_ratio", "distance", "runtime_ms", "fallback"]


def run_trial(gog: GraphOfGroups, name: str, degree: int, model: str, edits: int, seed: int, budget: int = DEFAULT_BUDGET, generators=None) -> TrialRecord:
    honest = random_honest_action(gog, degree, seed=seed, generators=generators)
    pert = perturb(honest, model, edits, seed=seed + 1)
    start = time.perf_counter()
    report = stabilize(pert.action, budget=budget)
    elapsed = (time.perf_counter() - start) * 1000
    return TrialRecord(
        gog=name,
        degree=degree,
        model=model,
        seed=seed,
        edits=edits,
        delta=report.input_defect,
        kernel_defect=report.kernel_defect,
        kernel_bound_ok=report.kernel_defect <= report.kernel_defect_bound,
        cone_ratio=report.cone.achieved_ratio,
        distance=report.distance,
        output_defect=defect(report.output_action),
        fix_bound_ok=all(r.ok for r in report.fix_records),
        runtime_ms=elapsed,
        fallback=report.fallback,
    )


def run_config(cfg: TrialConfig) -> Iterator[TrialRecord]:
    gog = zoo.by_name(cfg.gog)
    gens = kernel_cone_generators(gog)
    for idx in range(cfg.trials):
        yield run_trial(gog, cfg.gog, cfg.degree, cfg.model, cfg.edit_count(), trial_seed(cfg.seed, idx), cfg.budget, gens)


def expand_bench_config(data: dict) -> list[TrialConfig]:
    """``{"gogs": [...], "degrees": [...], "model", "edits" | "rate", "trials", "seed", "budget"}``."""
    gogs = data.get("gogs") or [data["gog"]]
    degrees = data.get("degrees") or [data["degree"]]
    out = []
    for i, (name, deg) in enumerate(product(gogs, degrees)):
        out.append(
            TrialConfig(
                gog=name,
                degree=int(deg),
                model=data.get("model", "mixed"),
                edits=data.get("edits", 1),
                rate=data.get("rate"),
                seed=int(data.get("seed", 0)) + 1000 * i,
                trials=int(data.get("trials", 1)),
                budget=int(data.get("budget", DEFAULT_BUDGET)),
            )
        )
    return out


def bench_csv(configs: Sequence[TrialConfig]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for cfg in configs:
        for rec in run_config(cfg):
            writer.writerow(rec.row())
    return buf.getvalue()
