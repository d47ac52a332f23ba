"""Rebuild an honest π₁(𝒢,T)-action close to an almost action.

The vertex groups are fixed one at a time along the spanning tree, each
against the already-fixed neighbour; then every stable letter is kept where
it already conjugates correctly and completed by an equivariant bijection
elsewhere.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .cone import DEFAULT_BUDGET, ConeSolution, cone_problem_from_dg, integer_kernel_point, pad_to_norm
from .errors import InternalInvariantBroken, PreconditionFailed
from .gog import (
    AlmostAction,
    action_distance,
    check_almost_action,
    defect,
    is_exact,
    tree_bfs_order,
)
from .groups import (
    FiniteAction,
    GroupHom,
    class_norm,
    equivariant_matching,
    extend_on,
    invariant_shrink,
    orbit_decompose,
    pullback_coords,
    sharp as group_sharp,
    subgroup_classes,
    trivial_action,
    trivial_group,
    trivial_hom,
)
from .lattice import OrbitVector, dg_matrix, kernel_defect_bound, norms, sharp, singleton_sharp
from .perms import disagreements, identity

log = logging.getLogger(__name__)

__all__ = [
    "AlmostAction",
    "CorrectionReport",
    "FixRecord",
    "fix_vertex_action",
    "realize_action",
    "stabilize",
]


@dataclass(frozen=True)
class FixRecord:
    vertex: int
    h_order: int
    g_order: int
    delta: Fraction
    distance: Fraction
    bound: Fraction

    @property
    def ok(self) -> bool:
        return self.distance <= self.bound


def _fix(
    phi: FiniteAction,
    hom: GroupHom,
    rho: FiniteAction,
    lam_prime: Sequence[int],
    delta: Optional[Fraction] = None,
    strict: bool = True,
    rng=None,
) -> tuple[FiniteAction, Fraction, Fraction, list[str]]:
    g, h = hom.target, hom.source
    n = rho.degree
    warnings: list[str] = []
    lam_prime = tuple(lam_prime)
    if pullback_coords(hom, lam_prime) != group_sharp(phi):
        raise PreconditionFailed("i*(λ′) ≠ φ^♯")
    lam = group_sharp(rho)
    restricted = [rho.perms[hom.image[a]] for a in h.elements]
    d_h = Fraction(sum(disagreements(p, q) for p, q in zip(restricted, phi.perms)), n) if n else Fraction(0)
    d_lam = Fraction(class_norm(g, [a - b for a, b in zip(lam, lam_prime)]), n) if n else Fraction(0)
    delta_eff = max(d_h, d_lam)
    if delta is not None and delta_eff > delta:
        msg = f"d_{{X,H}}(ρ∘i, φ) = {d_h}, ‖λ−λ′‖_G/|X| = {d_lam} exceed δ = {delta}"
        if strict:
            raise PreconditionFailed(msg)
        warnings.append(msg)

    agree = [x for x in range(n) if all(p[x] == q[x] for p, q in zip(restricted, phi.perms))]
    x0 = invariant_shrink(phi, agree)
    x1 = invariant_shrink(rho, x0)
    lam1 = group_sharp(rho, x1)
    mu1 = [min(a, b) for a, b in zip(lam_prime, lam1)]
    mu2 = [a - b for a, b in zip(lam_prime, mu1)]
    classes = subgroup_classes(g)
    want = list(mu1)
    y1: set[int] = set()
    for orb, cls in orbit_decompose(rho, x1):
        k = classes.index(cls)
        if want[k] > 0:
            want[k] -= 1
            y1.update(orb)
    y2 = [x for x in range(n) if x not in y1]
    ext = extend_on(phi, hom, mu2, y2, rng=rng)
    perms = []
    for a in g.elements:
        img = list(rho.perms[a])
        e = ext[a]
        for x in y2:
            img[x] = e[x]
        perms.append(tuple(img))
    new = FiniteAction(g, tuple(perms))

    distance = Fraction(sum(disagreements(p, q) for p, q in zip(rho.perms, new.perms)), n) if n else Fraction(0)
    bound = 2 * h.order * g.order ** 2 * delta_eff
    if any(new.perms[hom.image[a]] != phi.perms[a] for a in h.elements):
        raise InternalInvariantBroken("ρ′∘i ≠ φ")
    if group_sharp(new) != lam_prime:
        raise InternalInvariantBroken("(ρ′)^♯ ≠ λ′")
    if distance > bound:
        raise InternalInvariantBroken(f"d_{{X,G}}(ρ,ρ′) = {distance} exceeds 2|H||G|²δ = {bound}")
    return new, delta_eff, distance, warnings


def fix_vertex_action(
    phi: FiniteAction,
    hom: GroupHom,
    rho: FiniteAction,
    lam_prime: Sequence[int],
    delta: Optional[Fraction] = None,
    strict: bool = True,
    rng=None,
) -> FiniteAction:
    """An action ρ′ of ``hom.target`` with ρ′∘i = φ, (ρ′)^♯ = λ′ and
    ``d_{X,G}(ρ,ρ′) ≤ 2|H||G|²δ``.

    ``delta`` defaults to the least value meeting both distance preconditions.
    """
    return _fix(phi, hom, rho, lam_prime, delta, strict, rng)[0]


def _realize(rho: AlmostAction, lam_prime: OrbitVector, rng=None):
    gog = rho.gog
    n = rho.degree
    if not lam_prime.in_cone or any(dg_matrix(gog).apply(lam_prime).coords):
        raise PreconditionFailed("λ′ must lie in Λ_V⁺ ∩ ker 𝐝_𝒢")
    if norms(lam_prime, "V", gog) != n:
        raise PreconditionFailed(f"‖λ′‖_V = {norms(lam_prime, 'V', gog)} but |X| = {n}")

    records: list[FixRecord] = []
    warnings: list[str] = []
    new_vertex: dict[int, FiniteAction] = {}
    for v, e in tree_bfs_order(gog):
        target = lam_prime.block(("vertex", v))
        if e is None:
            one = trivial_group()
            phi, hom = trivial_action(one, n), trivial_hom(gog.vertex_groups[v])
        else:
            phi, hom = new_vertex[gog.o(e)].pullback(gog.inc_bar(e)), gog.inc(e)
        act, d_eff, dist, warn = _fix(phi, hom, rho.vertex_actions[v], target, strict=False, rng=rng)
        warnings.extend(warn)
        records.append(FixRecord(v, hom.source.order, hom.target.order, d_eff, dist, 2 * hom.source.order * hom.target.order ** 2 * d_eff))
        new_vertex[v] = act

    ident = identity(n)
    letters = {}
    for e in gog.oriented_edges:
        if gog.in_tree(e):
            letters[e] = ident
            continue
        s = rho.stable_letters[e]
        ge = gog.edge_groups[e]
        a_old = rho.vertex_actions[gog.t(e)].pullback(gog.inc(e)).perms
        b_old = rho.vertex_actions[gog.o(e)].pullback(gog.inc_bar(e)).perms
        a_new = new_vertex[gog.t(e)].pullback(gog.inc(e))
        b_new = new_vertex[gog.o(e)].pullback(gog.inc_bar(e))
        agree = [
            x
            for x in range(n)
            if all(
                a_old[k][s[x]] == s[b_old[k][x]]
                and b_old[k][x] == b_new.perms[k][x]
                and a_old[k][s[x]] == a_new.perms[k][s[x]]
                for k in ge.elements
            )
        ]
        xe = invariant_shrink(b_new, agree)
        image_xe = {s[x] for x in xe}
        f = equivariant_matching(
            ge,
            b_new.perms,
            [x for x in range(n) if x not in xe],
            a_new.perms,
            [y for y in range(n) if y not in image_xe],
        )
        letter = list(s)
        for x, y in f.items():
            letter[x] = y
        letters[e] = tuple(letter)

    out = AlmostAction(gog, n, new_vertex, letters)
    if not is_exact(out):
        raise InternalInvariantBroken("rebuilt action violates a relation")
    if sharp(out) != lam_prime:
        raise InternalInvariantBroken("(ρ′)^♯ ≠ λ′")
    return out, records, warnings


def realize_action(rho: AlmostAction, lam_prime: OrbitVector, strict: bool = False, rng=None) -> AlmostAction:
    """An exact action with sharp ``lam_prime`` close to ``rho``.

    With ``strict`` the distance precondition ``‖ρ^♯−λ′‖_V ≤ δ|X|`` is enforced.
    """
    if strict:
        delta = defect(rho)
        gap = norms(sharp(rho) - lam_prime, "V", rho.gog)
        if gap > delta * rho.degree:
            raise PreconditionFailed(f"‖λ−λ′‖_V = {gap} > δ|X| = {delta * rho.degree}")
    return _realize(rho, lam_prime, rng)[0]


@dataclass
class CorrectionReport:
    input_defect: Fraction
    output_action: AlmostAction
    distance: Fraction
    kernel_defect: Fraction
    kernel_defect_bound: Fraction
    cone: ConeSolution
    lam: OrbitVector
    lambda_prime: OrbitVector
    step1_distance: Fraction
    tree_letter_distance: Fraction
    letter_distance: Fraction
    fix_records: list[FixRecord] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    fallback: bool = False

    @property
    def output_defect(self) -> Fraction:
        return defect(self.output_action)

    @property
    def ratio(self) -> Optional[Fraction]:
        return self.distance / self.input_defect if self.input_defect else None

    def to_json(self) -> dict:
        return {
            "input_defect": str(self.input_defect),
            "output_defect": str(self.output_defect),
            "distance": str(self.distance),
            "kernel_defect": str(self.kernel_defect),
            "kernel_defect_bound": str(self.kernel_defect_bound),
            "kernel_defect_ok": self.kernel_defect <= self.kernel_defect_bound,
            "lambda": self.lam.to_json(),
            "lambda_prime": self.lambda_prime.to_json(),
            "cone": self.cone.to_json(),
            "stages": {
                "vertex_fixes": str(self.step1_distance),
                "tree_letters": str(self.tree_letter_distance),
                "other_letters": str(self.letter_distance),
            },
            "fix_records": [
                {
                    "vertex": r.vertex,
                    "h_order": r.h_order,
                    "g_order": r.g_order,
                    "delta": str(r.delta),
                    "distance": str(r.distance),
                    "bound": str(r.bound),
                }
                for r in self.fix_records
            ],
            "warnings": list(self.warnings),
            "fallback": self.fallback,
        }


def stabilize(rho: AlmostAction, budget: int = DEFAULT_BUDGET, rng=None) -> CorrectionReport:
    """Measure, correct the orbit-type vector inside the cone, rebuild exactly."""
    check_almost_action(rho)
    gog = rho.gog
    n = rho.degree
    delta = defect(rho, check=False)
    lam = sharp(rho)
    dgm = dg_matrix(gog)
    kd = norms(dgm.apply(lam), "E", gog)
    kd_bound = kernel_defect_bound(rho, delta)
    warnings: list[str] = []
    if kd > kd_bound:
        warnings.append(f"kernel defect {kd} exceeds 2·max|G_e|²·δ·|X| = {kd_bound}")

    problem = cone_problem_from_dg(dgm, lam, len(gog.vertices), len(gog.oriented_edges))
    sol = integer_kernel_point(problem, budget)
    lam_dd = lam.with_coords(sol.lambda_prime)
    lam_p = pad_to_norm(lam_dd, n, singleton_sharp(gog), gog)
    gap = norms(lam - lam_p, "V", gog)
    if gap > delta * n:
        warnings.append(f"‖λ−λ′‖_V = {gap} exceeds δ‖λ‖_V = {delta * n}; continuing")

    out, records, fix_warnings = _realize(rho, lam_p, rng)
    warnings.extend(fix_warnings)
    for w in warnings:
        log.debug(w)

    step1 = sum((r.distance for r in records), Fraction(0))
    tree_d = Fraction(0)
    other_d = Fraction(0)
    for e in gog.oriented_edges:
        d = Fraction(disagreements(rho.stable_letters[e], out.stable_letters[e]), n) if n else Fraction(0)
        if gog.in_tree(e):
            tree_d += d
        else:
            other_d += d
    fallback = sol.diagnostics.get("source") == "zero"
    return CorrectionReport(
        input_defect=delta,
        output_action=out,
        distance=action_distance(rho, out),
        kernel_defect=kd,
        kernel_defect_bound=kd_bound,
        cone=sol,
        lam=lam,
        lambda_prime=lam_p,
        step1_distance=step1,
        tree_letter_distance=tree_d,
        letter_distance=other_d,
        fix_records=records,
        warnings=warnings,
        fallback=fallback,
    )
