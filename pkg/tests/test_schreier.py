from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from permstab.gog import defect, presentation
from permstab.perms import compose, identity, power
from permstab.schreier import (
    AlmostAutomorphism,
    SchreierGraph,
    normalize_weak,
    perturb_pair,
    random_exact_pair,
    read_back,
    repair,
    to_almost_action,
)
from permstab.errors import NotAnAction


def check_exact(graph: SchreierGraph, alpha, n):
    """α preserves label, origin and terminus on every edge, and αⁿ = id."""
    for p in graph.labels:
        for v in range(graph.vertices):
            assert p[alpha[v]] == alpha[p[v]]
    assert power(tuple(alpha), n) == identity(graph.vertices)


def test_labels_must_be_permutations():
    with pytest.raises(NotAnAction):
        SchreierGraph(3, ((0, 0, 1),))


def test_json_roundtrip():
    a = random_exact_pair(2, 3, 15, seed=1)
    g2 = SchreierGraph.from_json(a.graph.to_json())
    assert g2 == a.graph
    assert AlmostAutomorphism.from_json(g2, a.to_json()) == a


def test_exact_pair_has_no_defects():
    a = random_exact_pair(2, 4, 40, seed=3)
    assert a.is_exact and a.delta() == 0
    check_exact(a.graph, a.vertex_map, 4)


def test_normalize_strict_is_unchanged():
    a = random_exact_pair(2, 2, 10, seed=0)
    strict, edits = normalize_weak(a)
    assert strict == a and edits == 0


def test_normalize_single_relabelled_edge():
    a = random_exact_pair(2, 2, 10, seed=0)
    em = list(a.edge_map)
    # send edge 0 to the image of edge 10 and vice versa: two edges change label
    em[0], em[10] = em[10], em[0]
    weak = AlmostAutomorphism(a.graph, a.vertex_map, 2, tuple(em))
    strict, edits = normalize_weak(weak)
    assert strict.edge_map == a.edge_map
    assert edits == 2
    assert edits <= 2 * len(weak.defect_edges)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 4), st.integers(5, 40), st.integers(0, 10**6), st.integers(1, 6))
def test_normalize_edit_count(n, m, seed, swaps):
    import numpy as np

    a = random_exact_pair(2, n, m, seed=seed)
    rng = np.random.Generator(np.random.PCG64(seed))
    em = list(a.edge_map)
    for _ in range(swaps):
        i, j = (int(x) for x in rng.integers(len(em), size=2))
        em[i], em[j] = em[j], em[i]
    weak = AlmostAutomorphism(a.graph, a.vertex_map, n, tuple(em))
    _, edits = normalize_weak(weak)
    assert edits <= 2 * len(weak.defect_edges)


def test_to_almost_action_exact_input():
    a = random_exact_pair(2, 3, 30, seed=5)
    conv = to_almost_action(a.graph, a.vertex_map, 3)
    assert defect(conv.action) == 0 and conv.completion_edits == 0
    g, alpha = read_back(conv.action, a.graph.names)
    assert g == a.graph and alpha == a.vertex_map


def test_to_almost_action_identity_n1():
    g = SchreierGraph(4, ((1, 2, 3, 0), (0, 1, 3, 2)))
    conv = to_almost_action(g, identity(4), 1)
    assert defect(conv.action) == 0


def test_broken_cycle_defect():
    a = random_exact_pair(1, 3, 12, seed=2)
    amap = list(a.vertex_map)
    # break one 3-cycle by swapping two of its images
    x = next(v for v in range(12) if amap[v] != v)
    y = amap[x]
    amap[x], amap[y] = amap[y], amap[x]
    conv = to_almost_action(a.graph, tuple(amap), 3)
    rels = sum(1 for r in presentation(conv.action.gog).relations if not (r[0] == "conj" and r[2] == 0))
    # the swap leaves a 2-cycle and a fixed point; only the 2-cycle fails α³ = id
    assert conv.completion_edits == 2
    assert defect(conv.action) <= Fraction(conv.completion_edits, 12) * rels * 2


def test_repair_exact_input_is_unchanged():
    a = random_exact_pair(2, 2, 30, seed=9)
    rep = repair(a)
    assert rep.graph == a.graph and rep.automorphism.vertex_map == a.vertex_map
    assert rep.edge_diff == 0 and rep.vertex_diff == 0


def test_repair_d2_n2_v100():
    a = random_exact_pair(2, 2, 100, seed=4)
    p = perturb_pair(a, 2, seed=5)
    rep = repair(p.automorphism)
    check_exact(rep.graph, rep.automorphism.vertex_map, 2)
    assert rep.automorphism.is_exact


def test_order_two_with_n4():
    g = SchreierGraph(4, ((1, 0, 3, 2),))
    alpha = AlmostAutomorphism(g, (1, 0, 3, 2), 4)
    rep = repair(alpha)
    check_exact(rep.graph, rep.automorphism.vertex_map, 4)
    assert rep.exact_order == 2 and rep.notes


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 3), st.integers(2, 4), st.integers(4, 60), st.integers(0, 8), st.integers(0, 10**6))
def test_repair_always_exact(d, n, m, k, seed):
    a = random_exact_pair(d, n, m, seed=seed)
    p = perturb_pair(a, k, seed=seed + 1)
    rep = repair(p.automorphism)
    check_exact(rep.graph, rep.automorphism.vertex_map, n)
    assert rep.graph.vertices == m
