"""The free ℤ-modules Λ_V and Λ_E over transitive-action classes, the sharp
map, pullbacks along edge inclusions and the integer matrix of 𝐝_𝒢."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import DegreeMismatch
from .gog import AlmostAction, GraphOfGroups
from .groups import FiniteAction, GroupHom, TransClass, restrict_class, sharp as group_sharp, subgroup_classes

Site = tuple  # ("vertex", v) or ("edge", e)


@dataclass(frozen=True)
class BasisEntry:
    site: Site
    cls: TransClass

    def to_json(self) -> dict:
        kind, ident = self.site
        return {kind: ident, "stabilizer": list(self.cls.stabilizer), "degree": self.cls.degree}


@dataclass(frozen=True)
class OrbitVector:
    basis: tuple[BasisEntry, ...]
    coords: tuple[int, ...]

    def __post_init__(self):
        if len(self.basis) != len(self.coords):
            raise ValueError("coords length differs from basis length")

    @property
    def in_cone(self) -> bool:
        return all(c >= 0 for c in self.coords)

    @property
    def weights(self) -> tuple[int, ...]:
        return tuple(b.cls.degree for b in self.basis)

    def block(self, site: Site) -> tuple[int, ...]:
        return tuple(c for b, c in zip(self.basis, self.coords) if b.site == site)

    def with_coords(self, coords: Sequence[int]) -> "OrbitVector":
        return OrbitVector(self.basis, tuple(int(c) for c in coords))

    def __add__(self, other: "OrbitVector") -> "OrbitVector":
        return self.with_coords([a + b for a, b in zip(self.coords, other.coords)])

    def __sub__(self, other: "OrbitVector") -> "OrbitVector":
        return self.with_coords([a - b for a, b in zip(self.coords, other.coords)])

    def scale(self, k: int) -> "OrbitVector":
        return self.with_coords([k * a for a in self.coords])

    def to_json(self) -> dict:
        return {"basis": [b.to_json() for b in self.basis], "coords": list(self.coords)}


def vertex_basis(gog: GraphOfGroups) -> tuple[BasisEntry, ...]:
    return tuple(
        BasisEntry(("vertex", v), cls) for v in gog.vertices for cls in subgroup_classes(gog.vertex_groups[v])
    )


def edge_basis(gog: GraphOfGroups) -> tuple[BasisEntry, ...]:
    return tuple(
        BasisEntry(("edge", e), cls) for e in gog.oriented_edges for cls in subgroup_classes(gog.edge_groups[e])
    )


def sharp(rho: AlmostAction | Mapping[int, FiniteAction], gog: GraphOfGroups | None = None) -> OrbitVector:
    """ρ^♯ ∈ Λ_V⁺ from the vertex-group actions."""
    if isinstance(rho, AlmostAction):
        gog, actions = rho.gog, rho.vertex_actions
    else:
        actions = rho
    degrees = {actions[v].degree for v in gog.vertices}
    if len(degrees) > 1:
        raise DegreeMismatch(f"vertex actions have degrees {sorted(degrees)}")
    coords: list[int] = []
    for v in gog.vertices:
        coords.extend(group_sharp(actions[v]))
    return OrbitVector(vertex_basis(gog), tuple(coords))


def pullback(hom: GroupHom) -> tuple[tuple[int, ...], ...]:
    """Matrix of ``i* : Λ_G → Λ_H`` (rows Trans(H), columns Trans(G))."""
    cols = [restrict_class(hom, cls) for cls in subgroup_classes(hom.target)]
    rows = len(subgroup_classes(hom.source))
    return tuple(tuple(col[r] for col in cols) for r in range(rows))


@dataclass(frozen=True)
class DGMatrix:
    rows: tuple[BasisEntry, ...]
    cols: tuple[BasisEntry, ...]
    entries: tuple[tuple[int, ...], ...]
    # (edge e, vertex v, sign): +i_e* at t(e), -i_ē* at o(e)
    provenance: tuple[tuple[int, int, int], ...]

    def apply(self, vec: OrbitVector) -> OrbitVector:
        if vec.basis != self.cols:
            raise DegreeMismatch("vector basis differs from matrix columns")
        out = tuple(sum(a * x for a, x in zip(row, vec.coords)) for row in self.entries)
        return OrbitVector(self.rows, out)

    def to_json(self) -> dict:
        return {
            "rows": [b.to_json() for b in self.rows],
            "cols": [b.to_json() for b in self.cols],
            "entries": [list(r) for r in self.entries],
        }


def dg_matrix(gog: GraphOfGroups) -> DGMatrix:
    rows = edge_basis(gog)
    cols = vertex_basis(gog)
    col_start: dict[int, int] = {}
    pos = 0
    for v in gog.vertices:
        col_start[v] = pos
        pos += len(subgroup_classes(gog.vertex_groups[v]))
    entries = [[0] * len(cols) for _ in rows]
    prov = []
    r0 = 0
    for e in gog.oriented_edges:
        for hom, v, sign in ((gog.inc(e), gog.t(e), 1), (gog.inc_bar(e), gog.o(e), -1)):
            block = pullback(hom)
            for i, brow in enumerate(block):
                for j, val in enumerate(brow):
                    entries[r0 + i][col_start[v] + j] += sign * val
            prov.append((e, v, sign))
        r0 += len(subgroup_classes(gog.edge_groups[e]))
    return DGMatrix(rows, cols, tuple(tuple(r) for r in entries), tuple(prov))


def norms(vec: OrbitVector, which: str, gog: GraphOfGroups | None = None) -> Fraction:
    """‖·‖_G (plain degree-weighted L¹), ‖·‖_V or ‖·‖_E (averaged over vertices / oriented edges)."""
    raw = sum(abs(c) * b.cls.degree for b, c in zip(vec.basis, vec.coords))
    if which == "G":
        return Fraction(raw)
    if gog is None:
        raise ValueError("the V and E norms need the graph of groups")
    if which == "V":
        return Fraction(raw, len(gog.vertices))
    if which == "E":
        k = len(gog.oriented_edges)
        return Fraction(raw, k) if k else Fraction(0)
    raise ValueError(f"unknown norm {which!r}")


def kernel_defect(rho: AlmostAction) -> Fraction:
    """‖𝐝_𝒢(ρ^♯)‖_E."""
    return norms(dg_matrix(rho.gog).apply(sharp(rho)), "E", rho.gog)


def kernel_defect_bound(rho: AlmostAction, delta: Fraction) -> Fraction:
    """``2·max|G_e|²·δ·|X|``."""
    return 2 * rho.gog.max_edge_group ** 2 * delta * rho.degree


def singleton_sharp(gog: GraphOfGroups) -> OrbitVector:
    """s^♯: the type of π₁(𝒢,T) acting on one point."""
    basis = vertex_basis(gog)
    return OrbitVector(basis, tuple(1 if b.cls.degree == 1 else 0 for b in basis))


def vertex_norm(vec: OrbitVector, v: int) -> int:
    return sum(abs(c) * b.cls.degree for b, c in zip(vec.basis, vec.coords) if b.site == ("vertex", v))
