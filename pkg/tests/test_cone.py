from __future__ import annotations

from fractions import Fraction
from itertools import product

import numpy as np
from hypothesis import given, settings, strategies as st

from permstab.cone import (
    ConeProblem,
    integer_kernel_point,
    kernel_lattice_basis,
    lattice_coordinates,
    nearest_kernel_point,
    solve_lp,
)


def problem(matrix, lam, weights=None):
    n = len(lam)
    return ConeProblem(
        matrix=tuple(tuple(r) for r in matrix),
        source_weights=tuple(weights or [1] * n),
        target_weights=tuple([1] * len(matrix)),
        lam=tuple(lam),
    )


def oracle_optimum(p: ConeProblem) -> Fraction:
    """Least distance over every integer kernel point of the cone with norm ≤ ‖λ‖."""
    cap = sum(w * a for w, a in zip(p.source_weights, p.lam))
    best = None
    ranges = [range(cap // w + 1) for w in p.source_weights]
    for y in product(*ranges):
        if sum(w * a for w, a in zip(p.source_weights, y)) > cap:
            continue
        if any(v for v in p.apply(y)):
            continue
        d = p.distance(p.lam, y)
        if best is None or d < best:
            best = d
    return best


def test_lp_small():
    # min -x1 - x2  s.t. x1 + 2 x2 + s = 4, 3 x1 + x2 + t = 6
    res = solve_lp([[1, 2, 1, 0], [3, 1, 0, 1]], [4, 6], [-1, -1, 0, 0])
    assert res.status == "optimal"
    assert res.value == Fraction(-14, 5)
    assert res.x[:2] == [Fraction(8, 5), Fraction(6, 5)]


def test_lp_infeasible_and_unbounded():
    assert solve_lp([[1, 1]], [-1], [0, 0]).status == "infeasible"
    assert solve_lp([[1, -1]], [0], [-1, 0]).status == "unbounded"


def test_nearest_point_diagonal():
    x, d = nearest_kernel_point(problem([[1, -1]], [3, 1]))
    assert x == [2, 2] and d == 2


def test_nearest_point_axis():
    x, d = nearest_kernel_point(problem([[1, 0]], [1, 5]))
    assert x == [0, 5] and d == 1


def test_nearest_point_in_kernel():
    x, d = nearest_kernel_point(problem([[1, -1]], [4, 4]))
    assert x == [4, 4] and d == 0


def test_integer_point_examples():
    sol = integer_kernel_point(problem([[1, -1]], [3, 1]))
    assert sol.lambda_prime == (2, 2) and sol.distance == 2
    sol = integer_kernel_point(problem([[1, -1]], [1, 0]))
    assert sol.lambda_prime == (0, 0)
    sol = integer_kernel_point(problem([[1, -1]], [5, 5]))
    assert sol.lambda_prime == (5, 5) and sol.achieved_ratio == 0
    assert all(sol.certified.values())


def test_integer_point_oracle_diagonal():
    p = problem([[1, -1]], [3, 1])
    assert oracle_optimum(p) == 2


matrices = st.integers(1, 3).flatmap(
    lambda m: st.integers(1, 4).flatmap(
        lambda n: st.lists(st.lists(st.integers(-3, 3), min_size=n, max_size=n), min_size=m, max_size=m)
    )
)


@settings(max_examples=80, deadline=None)
@given(matrices)
def test_kernel_basis_is_saturated(matrix):
    n = len(matrix[0])
    basis = kernel_lattice_basis(matrix, n)
    rank = np.linalg.matrix_rank(np.array(matrix, dtype=float)) if any(any(r) for r in matrix) else 0
    assert len(basis) == n - rank
    for row in basis:
        assert all(sum(a * b for a, b in zip(mrow, row)) == 0 for mrow in matrix)
    # every small integer kernel vector has integer coordinates
    for y in product(range(-3, 4), repeat=n):
        if all(sum(a * b for a, b in zip(mrow, y)) == 0 for mrow in matrix):
            coeffs = lattice_coordinates(basis, y)
            assert all(c.denominator == 1 for c in coeffs)
            back = [sum(c * row[j] for c, row in zip(coeffs, basis)) for j in range(n)]
            assert back == list(y)


@settings(max_examples=60, deadline=None)
@given(matrices, st.data())
def test_integer_point_matches_exhaustive_optimum(matrix, data):
    n = len(matrix[0])
    lam = data.draw(st.lists(st.integers(0, 6), min_size=n, max_size=n))
    p = problem(matrix, lam)
    sol = integer_kernel_point(p)
    assert all(sol.certified.values())
    if not sol.diagnostics["budget_exhausted"]:
        assert sol.distance == oracle_optimum(p)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(0, 5), min_size=3, max_size=3), st.lists(st.integers(1, 4), min_size=3, max_size=3))
def test_weighted_problem_certified(lam, weights):
    p = problem([[1, -1, 0], [0, 2, -1]], lam, weights)
    sol = integer_kernel_point(p)
    assert all(sol.certified.values())
    assert sol.distance == oracle_optimum(p)
