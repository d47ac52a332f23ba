"""Serre graphs, graphs of finite groups, the presentation of π₁(𝒢,T),
and the relation defect of a tuple of permutations."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from .errors import (
    BadInvolution,
    DegreeMismatch,
    Disconnected,
    NonInjectiveEdgeMap,
    NotAnAction,
    VertexActionBroken,
)
from .groups import FiniteAction, FiniteGroup, GroupHom, check_action, validate_hom
from .perms import Perm, disagreements, identity, is_perm


@dataclass(frozen=True)
class SerreGraph:
    vertices: tuple[int, ...]
    edges: tuple[int, ...]
    origin: Mapping[int, int]
    terminus: Mapping[int, int]
    bar: Mapping[int, int]
    orientation: tuple[int, ...]

    def out_edges(self, v: int) -> list[int]:
        return [e for e in self.edges if self.origin[e] == v]


@dataclass(frozen=True)
class GraphOfGroups:
    graph: SerreGraph
    vertex_groups: Mapping[int, FiniteGroup]
    edge_groups: Mapping[int, FiniteGroup]
    # i_e : G_e → G_{t(e)}
    inclusions: Mapping[int, GroupHom]
    tree: frozenset[int]
    name: str = field(default="", compare=False)

    @property
    def vertices(self) -> tuple[int, ...]:
        return self.graph.vertices

    @property
    def oriented_edges(self) -> tuple[int, ...]:
        return self.graph.orientation

    def o(self, e: int) -> int:
        return self.graph.origin[e]

    def t(self, e: int) -> int:
        return self.graph.terminus[e]

    def bar(self, e: int) -> int:
        return self.graph.bar[e]

    def inc(self, e: int) -> GroupHom:
        return self.inclusions[e]

    def inc_bar(self, e: int) -> GroupHom:
        """``i_ē : G_e → G_{o(e)}``."""
        return self.inclusions[self.graph.bar[e]]

    def in_tree(self, e: int) -> bool:
        return e in self.tree

    @property
    def max_edge_group(self) -> int:
        return max((self.edge_groups[e].order for e in self.oriented_edges), default=1)

    def to_json(self) -> dict:
        g = self.graph
        return {
            "name": self.name,
            "vertices": [{"id": v, "group": self.vertex_groups[v].to_json()} for v in g.vertices],
            "edges": [
                {
                    "id": e,
                    "bar": g.bar[e],
                    "origin": g.origin[e],
                    "terminus": g.terminus[e],
                    "edge_group": self.edge_groups[e].to_json(),
                    "inclusion_to_terminus": list(self.inclusions[e].image),
                }
                for e in g.edges
            ],
            "tree": sorted(self.tree),
            "orientation": list(g.orientation),
        }


def validate_gog(
    vertex_groups: Mapping[int, FiniteGroup],
    edges: Sequence[Mapping],
    tree: Optional[Iterable[int]] = None,
    orientation: Optional[Iterable[int]] = None,
    name: str = "",
) -> GraphOfGroups:
    """Assemble and check a graph of groups.

    ``edges`` holds mappings with keys ``id, bar, origin, terminus, edge_group``
    (a :class:`FiniteGroup`) and ``inclusion_to_terminus`` (image list).
    Missing orientation defaults to the lower id of each pair; a missing tree
    to the BFS tree from the lowest vertex.
    """
    vertices = tuple(sorted(vertex_groups))
    if not vertices:
        raise Disconnected("graph has no vertices")
    by_id = {int(e["id"]): e for e in edges}
    edge_ids = tuple(sorted(by_id))
    origin = {e: int(by_id[e]["origin"]) for e in edge_ids}
    terminus = {e: int(by_id[e]["terminus"]) for e in edge_ids}
    bar = {e: int(by_id[e]["bar"]) for e in edge_ids}
    for e in edge_ids:
        b = bar[e]
        if b not in bar or b == e or bar[b] != e:
            raise BadInvolution(f"edge {e}: bar is not a fixed-point-free involution")
        if origin[b] != terminus[e] or terminus[b] != origin[e]:
            raise BadInvolution(f"edge {e}: o(ē) ≠ t(e) or t(ē) ≠ o(e)")
        if origin[e] not in vertex_groups or terminus[e] not in vertex_groups:
            raise BadInvolution(f"edge {e}: endpoint is not a vertex")

    edge_groups: dict[int, FiniteGroup] = {}
    for e in edge_ids:
        b = bar[e]
        if b in edge_groups:
            if edge_groups[b] != by_id[e]["edge_group"]:
                raise BadInvolution(f"edge {e}: G_e differs from G_ē")
            edge_groups[e] = edge_groups[b]
        else:
            edge_groups[e] = by_id[e]["edge_group"]
    inclusions: dict[int, GroupHom] = {}
    for e in edge_ids:
        hom = validate_hom(edge_groups[e], vertex_groups[terminus[e]], by_id[e]["inclusion_to_terminus"])
        if not hom.injective:
            raise NonInjectiveEdgeMap(f"edge {e}: inclusion is not injective")
        inclusions[e] = hom

    if orientation is None:
        orient = tuple(e for e in edge_ids if e < bar[e])
    else:
        orient = tuple(int(e) for e in orientation)
        pairs = {frozenset((e, bar[e])) for e in edge_ids}
        if len(set(orient)) != len(orient) or {frozenset((e, bar[e])) for e in orient} != pairs or len(orient) != len(pairs):
            raise BadInvolution("orientation must pick exactly one edge from each pair")

    # connectivity and spanning tree
    seen = {vertices[0]: None}
    queue = deque([vertices[0]])
    bfs_tree: set[int] = set()
    while queue:
        v = queue.popleft()
        for e in edge_ids:
            if origin[e] == v and terminus[e] not in seen:
                seen[terminus[e]] = e
                bfs_tree.update((e, bar[e]))
                queue.append(terminus[e])
    if len(seen) != len(vertices):
        raise Disconnected("graph is not connected")
    if tree is None:
        tree_set = frozenset(bfs_tree)
    else:
        tree_set = frozenset(int(e) for e in tree)
        if any(bar[e] not in tree_set for e in tree_set):
            raise BadInvolution("tree is not closed under bar")
        if any(origin[e] == terminus[e] for e in tree_set):
            raise Disconnected("tree contains a loop")
        if len(tree_set) != 2 * (len(vertices) - 1) or not _spans(vertices, tree_set, origin, terminus):
            raise Disconnected("tree is not a spanning tree")

    graph = SerreGraph(vertices, edge_ids, origin, terminus, bar, orient)
    return GraphOfGroups(graph, dict(vertex_groups), edge_groups, inclusions, tree_set, name)


def _spans(vertices, tree_set, origin, terminus) -> bool:
    reach = {vertices[0]}
    queue = deque(reach)
    while queue:
        v = queue.popleft()
        for e in tree_set:
            if origin[e] == v and terminus[e] not in reach:
                reach.add(terminus[e])
                queue.append(terminus[e])
    return len(reach) == len(vertices)


def tree_bfs_order(gog: GraphOfGroups) -> list[tuple[int, Optional[int]]]:
    """Vertices by distance from the lowest vertex in T, each with the tree
    edge ``e`` satisfying ``t(e) = v`` and ``o(e)`` closer to the base."""
    base = gog.vertices[0]
    order = [(base, None)]
    seen = {base}
    queue = deque([base])
    while queue:
        u = queue.popleft()
        for e in sorted(gog.tree):
            if gog.o(e) == u and gog.t(e) not in seen:
                seen.add(gog.t(e))
                order.append((gog.t(e), e))
                queue.append(gog.t(e))
    return order


# ---------------------------------------------------------------------------
# presentation


@dataclass(frozen=True)
class Presentation:
    # ("vertex", v, g) or ("stable", e)
    generators: tuple[tuple, ...]
    # ("tree", e) meaning s_e = 1, or ("conj", e, g) meaning s_e⁻¹ i_e(g) s_e = i_ē(g)
    relations: tuple[tuple, ...]

    def counts(self) -> dict[str, int]:
        return {
            "tree": sum(1 for r in self.relations if r[0] == "tree"),
            "conj": sum(1 for r in self.relations if r[0] == "conj"),
        }


def presentation(gog: GraphOfGroups) -> Presentation:
    gens: list[tuple] = []
    for v in gog.vertices:
        gens.extend(("vertex", v, g) for g in gog.vertex_groups[v].elements)
    gens.extend(("stable", e) for e in gog.oriented_edges)
    rels: list[tuple] = [("tree", e) for e in gog.oriented_edges if gog.in_tree(e)]
    for e in gog.oriented_edges:
        rels.extend(("conj", e, g) for g in gog.edge_groups[e].elements)
    return Presentation(tuple(gens), tuple(rels))


# ---------------------------------------------------------------------------
# almost actions


@dataclass(frozen=True)
class AlmostAction:
    """A homomorphism from π̄₁(𝒢,T): honest vertex-group actions plus one free
    permutation per oriented edge. Approximateness lives only in R_𝒢."""

    gog: GraphOfGroups
    degree: int
    vertex_actions: Mapping[int, FiniteAction]
    stable_letters: Mapping[int, Perm]

    def letter(self, e: int) -> Perm:
        return self.stable_letters[e]

    def generator_perm(self, gen: tuple) -> Perm:
        if gen[0] == "vertex":
            return self.vertex_actions[gen[1]].perms[gen[2]]
        return self.stable_letters[gen[1]]

    def edge_action(self, e: int) -> FiniteAction:
        """``ρ ∘ i_e`` as a G_e-action (through the vertex t(e))."""
        return self.vertex_actions[self.gog.t(e)].pullback(self.gog.inc(e))

    def edge_action_bar(self, e: int) -> FiniteAction:
        """``ρ ∘ i_ē`` as a G_e-action (through the vertex o(e))."""
        return self.vertex_actions[self.gog.o(e)].pullback(self.gog.inc_bar(e))

    def same_as(self, other: "AlmostAction") -> bool:
        return (
            self.degree == other.degree
            and all(self.vertex_actions[v].perms == other.vertex_actions[v].perms for v in self.gog.vertices)
            and all(tuple(self.stable_letters[e]) == tuple(other.stable_letters[e]) for e in self.gog.oriented_edges)
        )


def check_almost_action(rho: AlmostAction) -> None:
    gog = rho.gog
    for v in gog.vertices:
        act = rho.vertex_actions[v]
        if act.degree != rho.degree:
            raise DegreeMismatch(f"vertex {v} acts on {act.degree} points, expected {rho.degree}")
        try:
            check_action(act)
        except NotAnAction as exc:
            raise VertexActionBroken(f"vertex {v}: {exc}") from exc
    for e in gog.oriented_edges:
        p = rho.stable_letters[e]
        if len(p) != rho.degree or not is_perm(p):
            raise DegreeMismatch(f"stable letter {e} is not a permutation of degree {rho.degree}")


def relation_failures(rho: AlmostAction, rel: tuple) -> int:
    """Number of points where ``rel`` fails."""
    if rel[0] == "tree":
        p = rho.stable_letters[rel[1]]
        return sum(1 for x, y in enumerate(p) if x != y)
    _, e, g = rel
    gog = rho.gog
    s = rho.stable_letters[e]
    a = rho.vertex_actions[gog.t(e)].perms[gog.inc(e).image[g]]
    b = rho.vertex_actions[gog.o(e)].perms[gog.inc_bar(e).image[g]]
    # s⁻¹ a s = b  ⇔  a(s(x)) = s(b(x))
    return sum(1 for x in range(rho.degree) if a[s[x]] != s[b[x]])


def defect(rho: AlmostAction, check: bool = True) -> Fraction:
    """``Σ_{r ∈ R_𝒢} d_X(ρ(r), id)`` as an exact rational."""
    if check:
        check_almost_action(rho)
    if rho.degree == 0:
        return Fraction(0)
    total = 0
    for rel in presentation(rho.gog).relations:
        if rel[0] == "conj" and rel[2] == 0:
            continue
        total += relation_failures(rho, rel)
    return Fraction(total, rho.degree)


def is_exact(rho: AlmostAction) -> bool:
    """Every relation of R_𝒢 holds at every point."""
    check_almost_action(rho)
    return all(relation_failures(rho, rel) == 0 for rel in presentation(rho.gog).relations)


def action_distance(rho: AlmostAction, other: AlmostAction) -> Fraction:
    """``d_{X,S_𝒢}``: sum of normalized Hamming distances over the generators."""
    if rho.degree != other.degree:
        raise DegreeMismatch("actions on sets of different size")
    if rho.degree == 0:
        return Fraction(0)
    total = 0
    for gen in presentation(rho.gog).generators:
        total += disagreements(rho.generator_perm(gen), other.generator_perm(gen))
    return Fraction(total, rho.degree)


def identity_letters(gog: GraphOfGroups, degree: int) -> dict[int, Perm]:
    ident = identity(degree)
    return {e: ident for e in gog.oriented_edges}
