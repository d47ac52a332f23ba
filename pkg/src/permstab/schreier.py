"""Labelled Schreier graphs of free groups, almost-automorphisms of almost
finite order, and their repair through F_d × ℤ/n almost actions."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .correct import CorrectionReport, stabilize
from .cone import DEFAULT_BUDGET
from .errors import InternalInvariantBroken, NotAnAction
from .gog import AlmostAction
from .groups import FiniteAction
from .perms import identity, is_perm, order, power
from . import zoo


@dataclass(frozen=True)
class SchreierGraph:
    """``labels[i][v]`` is the terminus of the edge at ``v`` labelled ``names[i]``.

    Edge ids are ``i * m + v``: every vertex has one out-edge per label.
    """

    vertices: int
    labels: tuple[tuple[int, ...], ...]
    names: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.names:
            object.__setattr__(self, "names", tuple(f"s{i + 1}" for i in range(len(self.labels))))
        if len(self.names) != len(self.labels):
            raise ValueError("one name per label required")
        for name, p in zip(self.names, self.labels):
            if len(p) != self.vertices or not is_perm(p):
                raise NotAnAction(f"label {name} is not a permutation of the {self.vertices} vertices")

    @property
    def rank(self) -> int:
        return len(self.labels)

    @property
    def num_edges(self) -> int:
        return self.rank * self.vertices

    def edge(self, e: int) -> tuple[int, int, int]:
        """``(origin, label index, terminus)``."""
        i, v = divmod(e, self.vertices)
        return v, i, self.labels[i][v]

    def edge_id(self, label: int, origin: int) -> int:
        return label * self.vertices + origin

    def edge_set(self) -> set[tuple[int, int, int]]:
        return {self.edge(e) for e in range(self.num_edges)}

    def to_json(self) -> dict:
        return {
            "vertices": self.vertices,
            "rank": self.rank,
            "labels": {n: list(p) for n, p in zip(self.names, self.labels)},
        }

    @classmethod
    def from_json(cls, data: dict) -> "SchreierGraph":
        labels = data["labels"]
        names = tuple(labels)
        graph = cls(int(data["vertices"]), tuple(tuple(int(x) for x in labels[n]) for n in names), names)
        if "rank" in data and int(data["rank"]) != graph.rank:
            raise ValueError(f"rank {data['rank']} but {graph.rank} labels given")
        return graph


@dataclass(frozen=True)
class AlmostAutomorphism:
    graph: SchreierGraph
    vertex_map: tuple[int, ...]
    n: int
    edge_map: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        m = self.graph.vertices
        if len(self.vertex_map) != m or not is_perm(self.vertex_map):
            raise NotAnAction("vertex map is not a bijection")
        if self.n < 1:
            raise ValueError("n must be positive")
        if self.edge_map is None:
            object.__setattr__(self, "edge_map", induced_edge_map(self.graph, self.vertex_map))
        elif len(self.edge_map) != self.graph.num_edges or not is_perm(self.edge_map):
            raise NotAnAction("edge map is not a bijection")

    @property
    def defect_edges(self) -> set[int]:
        g, a = self.graph, self.vertex_map
        bad = set()
        for e in range(g.num_edges):
            o, c, t = g.edge(e)
            o2, c2, t2 = g.edge(self.edge_map[e])
            if c2 != c or o2 != a[o] or t2 != a[t]:
                bad.add(e)
        return bad

    @property
    def order_defect_vertices(self) -> set[int]:
        p = power(self.vertex_map, self.n)
        return {v for v, w in enumerate(p) if v != w}

    @property
    def is_strict(self) -> bool:
        g, a = self.graph, self.vertex_map
        for e in range(g.num_edges):
            o, c, _ = g.edge(e)
            o2, c2, _ = g.edge(self.edge_map[e])
            if c2 != c or o2 != a[o]:
                return False
        return True

    @property
    def is_exact(self) -> bool:
        return not self.defect_edges and not self.order_defect_vertices

    def delta(self) -> Fraction:
        """Larger of the edge-defect and order-defect fractions."""
        g = self.graph
        return max(
            Fraction(len(self.defect_edges), g.num_edges) if g.num_edges else Fraction(0),
            Fraction(len(self.order_defect_vertices), g.vertices),
        )

    def to_json(self) -> dict:
        return {"vertex_map": list(self.vertex_map), "n": self.n, "edge_map": list(self.edge_map)}

    @classmethod
    def from_json(cls, graph: SchreierGraph, data: dict) -> "AlmostAutomorphism":
        em = data.get("edge_map")
        return cls(graph, tuple(int(x) for x in data["vertex_map"]), int(data["n"]), None if em is None else tuple(int(x) for x in em))


def induced_edge_map(graph: SchreierGraph, vertex_map: Sequence[int]) -> tuple[int, ...]:
    """The out-edge at ``α(o(e))`` carrying the label of ``e``."""
    m = graph.vertices
    return tuple(graph.edge_id(e // m, vertex_map[e % m]) for e in range(graph.num_edges))


def normalize_weak(alpha: AlmostAutomorphism) -> tuple[AlmostAutomorphism, int]:
    """Strict version of ``alpha`` and the number of edges whose image changed."""
    strict = induced_edge_map(alpha.graph, alpha.vertex_map)
    edits = sum(1 for a, b in zip(strict, alpha.edge_map) if a != b)
    return AlmostAutomorphism(alpha.graph, alpha.vertex_map, alpha.n, strict), edits


@dataclass(frozen=True)
class Conversion:
    action: AlmostAction
    # vertices where the ℤ/n generator differs from α
    completion_edits: int


def to_almost_action(graph: SchreierGraph, vertex_map: Sequence[int], n: int) -> Conversion:
    """Almost action of F_d × ℤ/n: label ``i`` is the stable letter of loop ``2i``.

    ℤ/n acts through α on the αⁿ-fixed vertices (an α-invariant set) and
    trivially elsewhere.
    """
    m = graph.vertices
    gog = zoo.free_times_cyclic(graph.rank, n)
    alpha = tuple(vertex_map)
    fixed = [v for v, w in enumerate(power(alpha, n)) if v == w]
    gen = list(range(m))
    for v in fixed:
        gen[v] = alpha[v]
    gen = tuple(gen)
    perms = tuple(power(gen, j) for j in range(n))
    letters = {}
    for i, p in enumerate(graph.labels):
        letters[2 * i] = tuple(p)
    act = AlmostAction(gog, m, {0: FiniteAction(gog.vertex_groups[0], perms)}, letters)
    return Conversion(act, m - len(fixed))


def read_back(rho: AlmostAction, names: Sequence[str] = ()) -> tuple[SchreierGraph, tuple[int, ...]]:
    """Labels from the stable letters of edges ``0, 2, 4, …`` and α from ℤ/n's generator."""
    d = len(rho.gog.oriented_edges)
    labels = tuple(tuple(rho.stable_letters[2 * i]) for i in range(d))
    perms = rho.vertex_actions[0].perms
    alpha = tuple(perms[1]) if len(perms) > 1 else identity(rho.degree)
    return SchreierGraph(rho.degree, labels, tuple(names)), alpha


@dataclass
class RepairReport:
    graph: SchreierGraph
    automorphism: AlmostAutomorphism
    edge_diff: int
    vertex_diff: int
    normalize_edits: int
    completion_edits: int
    input_defect_edges: int
    input_order_defect: int
    correction: CorrectionReport
    exact_order: int
    notes: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "graph": self.graph.to_json(),
            "automorphism": {"vertex_map": list(self.automorphism.vertex_map), "n": self.automorphism.n},
            "diff": {
                "edges": self.edge_diff,
                "vertices": self.vertex_diff,
                "normalize_edits": self.normalize_edits,
                "completion_edits": self.completion_edits,
            },
            "input": {"defect_edges": self.input_defect_edges, "order_defect_vertices": self.input_order_defect},
            "exact_order": self.exact_order,
            "almost_action_defect": str(self.correction.input_defect),
            "notes": self.notes,
        }


def repair(alpha: AlmostAutomorphism, budget: int = DEFAULT_BUDGET) -> RepairReport:
    """Exact automorphism α′ (α′ⁿ = id) of a Schreier graph A′ on the same vertices."""
    graph = alpha.graph
    strict, edits = normalize_weak(alpha)
    conv = to_almost_action(graph, strict.vertex_map, alpha.n)
    report = stabilize(conv.action, budget=budget)
    new_graph, new_alpha = read_back(report.output_action, graph.names)
    out = AlmostAutomorphism(new_graph, new_alpha, alpha.n)
    if not out.is_exact:
        raise InternalInvariantBroken("repaired automorphism is not exact")
    edge_diff = len(graph.edge_set() ^ new_graph.edge_set())
    vertex_diff = sum(1 for a, b in zip(alpha.vertex_map, new_alpha) if a != b)
    exact_order = order(new_alpha)
    notes = []
    if exact_order != alpha.n:
        notes.append(f"automorphism order is {exact_order}, which divides {alpha.n}")
    return RepairReport(
        graph=new_graph,
        automorphism=out,
        edge_diff=edge_diff,
        vertex_diff=vertex_diff,
        normalize_edits=edits,
        completion_edits=conv.completion_edits,
        input_defect_edges=len(alpha.defect_edges),
        input_order_defect=len(alpha.order_defect_vertices),
        correction=report,
        exact_order=exact_order,
        notes=notes,
    )


# ---------------------------------------------------------------------------
# test instances


def random_exact_pair(d: int, n: int, m: int, seed=0) -> AlmostAutomorphism:
    """An honest (A, α): α has order dividing ``n`` and commutes with every label."""
    from .harness import kernel_cone_generators, random_honest_action

    gog = zoo.free_times_cyclic(d, n)
    rho = random_honest_action(gog, m, seed=seed, generators=kernel_cone_generators(gog))
    graph, alpha = read_back(rho)
    return AlmostAutomorphism(graph, alpha, n)


@dataclass(frozen=True)
class PerturbedPair:
    automorphism: AlmostAutomorphism
    vertex_edits: int
    edge_edits: int


def perturb_pair(alpha: AlmostAutomorphism, k: int, seed=0) -> PerturbedPair:
    """``k`` random edits: each either swaps the termini of two same-label edges
    or composes α with a transposition."""
    from .harness import make_rng

    rng = make_rng(seed)
    g = alpha.graph
    m = g.vertices
    labels = [list(p) for p in g.labels]
    amap = list(alpha.vertex_map)
    ve = ee = 0
    if m < 2:
        return PerturbedPair(alpha, 0, 0)
    for _ in range(k):
        x = int(rng.integers(m))
        y = int(rng.integers(m - 1))
        y += y >= x
        if g.rank and rng.integers(2):
            i = int(rng.integers(g.rank))
            labels[i][x], labels[i][y] = labels[i][y], labels[i][x]
            ee += 2
        else:
            amap[x], amap[y] = amap[y], amap[x]
            ve += 2
    graph = SchreierGraph(m, tuple(tuple(p) for p in labels), g.names)
    return PerturbedPair(AlmostAutomorphism(graph, tuple(amap), alpha.n), ve, ee)
