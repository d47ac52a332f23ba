"""Named graphs of groups used by the tests, the benchmark and the CLI."""

from __future__ import annotations

from typing import Callable

from .gog import GraphOfGroups, validate_gog
from .groups import FiniteGroup, cyclic_embedding, cyclic_group, trivial_group


def _edge(eid: int, bar: int, o: int, t: int, group: FiniteGroup, image) -> dict:
    return {"id": eid, "bar": bar, "origin": o, "terminus": t, "edge_group": group, "inclusion_to_terminus": list(image)}


def single_vertex(group: FiniteGroup, name: str = "") -> GraphOfGroups:
    return validate_gog({0: group}, [], name=name or f"vertex(order {group.order})")


def trivial_gog() -> GraphOfGroups:
    return single_vertex(trivial_group(), "trivial")


def sl2z() -> GraphOfGroups:
    """ℤ/4 ∗_{ℤ/2} ℤ/6, amalgamated over the order-2 subgroups."""
    z2 = cyclic_group(2)
    edges = [
        _edge(0, 1, 0, 1, z2, cyclic_embedding(2, 6).image),
        _edge(1, 0, 1, 0, z2, cyclic_embedding(2, 4).image),
    ]
    return validate_gog({0: cyclic_group(4), 1: cyclic_group(6)}, edges, name="SL2Z")


def free_times_cyclic(d: int, n: int) -> GraphOfGroups:
    """F_d × ℤ/n: one ℤ/n vertex with ``d`` loops, identity inclusions."""
    zn = cyclic_group(n)
    ident = list(range(n))
    edges = []
    for k in range(d):
        edges.append(_edge(2 * k, 2 * k + 1, 0, 0, zn, ident))
        edges.append(_edge(2 * k + 1, 2 * k, 0, 0, zn, ident))
    return validate_gog({0: zn}, edges, name=f"F{d}xZ{n}")


def free_product(m: int, n: int) -> GraphOfGroups:
    """ℤ/m ∗ ℤ/n over the trivial edge group."""
    one = trivial_group()
    edges = [_edge(0, 1, 0, 1, one, [0]), _edge(1, 0, 1, 0, one, [0])]
    return validate_gog({0: cyclic_group(m), 1: cyclic_group(n)}, edges, name=f"Z{m}*Z{n}")


def loop_gog() -> GraphOfGroups:
    """ℤ/4 and ℤ/2 joined over ℤ/2, plus a ℤ/2 loop at the ℤ/4 vertex."""
    z2 = cyclic_group(2)
    into_z4 = cyclic_embedding(2, 4).image
    edges = [
        _edge(0, 1, 0, 1, z2, [0, 1]),
        _edge(1, 0, 1, 0, z2, into_z4),
        _edge(2, 3, 0, 0, z2, into_z4),
        _edge(3, 2, 0, 0, z2, into_z4),
    ]
    return validate_gog({0: cyclic_group(4), 1: z2}, edges, name="Z4-Z2+loop")


ZOO: dict[str, Callable[[], GraphOfGroups]] = {
    "SL2Z": sl2z,
    "F2xZ2": lambda: free_times_cyclic(2, 2),
    "F2xZ3": lambda: free_times_cyclic(2, 3),
    "Z2*Z3": lambda: free_product(2, 3),
    "Z4-Z2+loop": loop_gog,
    "F1xZ2": lambda: free_times_cyclic(1, 2),
    "trivial": trivial_gog,
}


def by_name(name: str) -> GraphOfGroups:
    if name in ZOO:
        return ZOO[name]()
    if name.startswith("F") and "xZ" in name:
        d, n = name[1:].split("xZ")
        return free_times_cyclic(int(d), int(n))
    raise KeyError(f"unknown graph of groups {name!r}; known: {sorted(ZOO)}")
