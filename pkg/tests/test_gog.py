from __future__ import annotations

from fractions import Fraction
from itertools import product

import pytest

from permstab import zoo
from permstab.errors import BadInvolution, DegreeMismatch, Disconnected, NonInjectiveEdgeMap, VertexActionBroken
from permstab.gog import (
    AlmostAction,
    action_distance,
    defect,
    identity_letters,
    is_exact,
    presentation,
    relation_failures,
    tree_bfs_order,
    validate_gog,
)
from permstab.groups import FiniteAction, coset_action, cyclic_group, disjoint_union, trivial_action
from permstab.harness import random_honest_action
from permstab.perms import compose, identity, power, transposition


def z2_edge(eid, bar, o, t, image):
    return {"id": eid, "bar": bar, "origin": o, "terminus": t, "edge_group": cyclic_group(2), "inclusion_to_terminus": image}


def test_sl2z_is_valid():
    g = zoo.sl2z()
    assert g.vertices == (0, 1)
    assert g.oriented_edges == (0,)
    assert g.tree == frozenset({0, 1})
    assert g.inc(0).image == (0, 3) and g.inc_bar(0).image == (0, 2)


def test_non_injective_edge_map():
    with pytest.raises(NonInjectiveEdgeMap):
        validate_gog(
            {0: cyclic_group(4), 1: cyclic_group(6)},
            [z2_edge(0, 1, 0, 1, [0, 0]), z2_edge(1, 0, 1, 0, [0, 2])],
        )


def test_bad_involution():
    with pytest.raises(BadInvolution):
        validate_gog({0: cyclic_group(2), 1: cyclic_group(2)}, [z2_edge(0, 1, 0, 1, [0, 1]), z2_edge(1, 1, 1, 0, [0, 1])])


def test_disconnected():
    with pytest.raises(Disconnected):
        validate_gog({0: cyclic_group(2), 1: cyclic_group(2)}, [])


def test_loop_cannot_be_tree():
    with pytest.raises(Disconnected):
        validate_gog({0: cyclic_group(2)}, [z2_edge(0, 1, 0, 0, [0, 1]), z2_edge(1, 0, 0, 0, [0, 1])], tree=[0, 1])


def test_tree_bfs_order_starts_at_base():
    order = tree_bfs_order(zoo.loop_gog())
    assert order[0] == (0, None)
    assert [v for v, _ in order] == [0, 1]


def test_presentation_single_vertex():
    p = presentation(zoo.single_vertex(cyclic_group(2)))
    assert len(p.generators) == 2 and p.relations == ()


def test_presentation_counts():
    # identity-element conjugation relations are emitted, hence |G_e| per edge
    assert presentation(zoo.sl2z()).counts() == {"tree": 1, "conj": 2}
    assert presentation(zoo.free_times_cyclic(2, 2)).counts() == {"tree": 0, "conj": 4}
    assert len(presentation(zoo.sl2z()).generators) == 4 + 6 + 1


def brute_force_direct_product_actions(n, degree):
    """Pairs (a, s) with aⁿ = 1 and as = sa: the F₁ × ℤ/n actions."""
    from itertools import permutations

    perms = list(permutations(range(degree)))
    return {(a, s) for a in perms if power(a, n) == identity(degree) for s in perms if compose(a, s) == compose(s, a)}


def test_free_times_cyclic_relations_are_commutation():
    g = zoo.free_times_cyclic(1, 2)
    exact = set()
    from itertools import permutations

    for a, s in product(permutations(range(3)), repeat=2):
        if power(a, 2) != identity(3):
            continue
        rho = AlmostAction(g, 3, {0: FiniteAction(g.vertex_groups[0], (identity(3), a))}, {0: s})
        if is_exact(rho):
            exact.add((a, s))
    assert exact == brute_force_direct_product_actions(2, 3)


def honest_sl2z_12():
    return random_honest_action(zoo.sl2z(), 12, seed=11)


def test_honest_defect_zero():
    assert defect(honest_sl2z_12()) == 0


def test_one_transposition_on_letter():
    rho = honest_sl2z_12()
    e = 0
    s = compose(rho.stable_letters[e], transposition(12, 0, 5))
    bad = AlmostAction(rho.gog, 12, rho.vertex_actions, {e: s})
    # exact evaluation; 3 relations touch s_e
    d = defect(bad)
    assert 0 < d <= 3 * Fraction(2, 12)
    assert d == Fraction(sum(relation_failures(bad, r) for r in presentation(rho.gog).relations if not (r[0] == "conj" and r[2] == 0)), 12)


def test_identity_letters_mismatched_types_positive():
    g = zoo.sl2z()
    z4, z6 = g.vertex_groups[0], g.vertex_groups[1]
    # ℤ/4 regular (order-2 element acts freely), ℤ/6 trivial
    rho = AlmostAction(g, 4, {0: coset_action(z4, [0]), 1: trivial_action(z6, 4)}, identity_letters(g, 4))
    assert defect(rho) == Fraction(4, 4)


def test_vertex_action_must_be_honest():
    g = zoo.single_vertex(cyclic_group(2))
    with pytest.raises(VertexActionBroken):
        defect(AlmostAction(g, 3, {0: FiniteAction(g.vertex_groups[0], (identity(3), (1, 2, 0)))}, {}))


def test_distance_degree_mismatch():
    a = random_honest_action(zoo.sl2z(), 6, seed=1)
    b = random_honest_action(zoo.sl2z(), 7, seed=1)
    with pytest.raises(DegreeMismatch):
        action_distance(a, b)


def test_distance_counts_generators():
    rho = honest_sl2z_12()
    other = AlmostAction(rho.gog, 12, rho.vertex_actions, {0: transposition(12, 1, 2)})
    assert action_distance(rho, other) == Fraction(2, 12)
    assert action_distance(rho, rho) == 0
