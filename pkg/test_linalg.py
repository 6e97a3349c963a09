import numpy as np
import pytest

from conftest import random_scalar
from linalg import (
    dense_nullspace_mod_p,
    echelon,
    normalize_vector,
    nullspace,
    rank,
    same_span,
    solve,
    solve_mod_p,
    span_contains,
)
from scalars import FieldDescriptor


def _dot(row, vector, field):
    total = field.zero()
    for column, value in row.items():
        total = total + value * vector[column]
    return total


def test_nullspace_over_rational_functions(rng):
    field = FieldDescriptor(3, ("t",))
    for _ in range(40):
        ncols = rng.randint(1, 5)
        rows = [{j: random_scalar(rng, field) for j in range(ncols) if rng.random() < 0.7}
                for _ in range(rng.randint(1, 4))]
        basis = nullspace(rows, ncols, field)
        assert len(basis) == ncols - rank(rows)
        for vector in basis:
            assert any(vector)
            for row in rows:
                assert _dot(row, vector, field) == field.zero()


def test_solve_finds_a_solution(rng):
    field = FieldDescriptor(2, ("t1", "t2"))
    for _ in range(40):
        ncols = rng.randint(1, 4)
        x = [random_scalar(rng, field) for _ in range(ncols)]
        rows = [{j: random_scalar(rng, field) for j in range(ncols)} for _ in range(rng.randint(1, 4))]
        rhs = [_dot(row, x, field) for row in rows]
        solution = solve(rows, rhs, ncols, field)
        assert solution is not None
        assert [_dot(row, solution, field) for row in rows] == rhs


def test_solve_detects_inconsistency():
    field = FieldDescriptor(3, ("t",))
    t = field.param("t")
    rows = [{0: field.one(), 1: t}, {0: t, 1: t * t}]
    assert solve(rows, [field.one(), field.zero()], 2, field) is None


def test_echelon_pivots_increase():
    field = FieldDescriptor(5, ("t",))
    t = field.param("t")
    one = field.one()
    rows = [{1: t, 2: one}, {0: one, 1: one}, {0: t, 1: t + one}, {0: one, 1: t + one, 2: one}]
    pivots = echelon(rows)
    assert [col for col, _ in pivots] == [0, 1, 2]
    assert rank(rows[:2] + rows[3:]) == 2


def test_normalize_vector():
    field = FieldDescriptor(3, ("t",))
    t = field.param("t")
    vector = normalize_vector([field.zero(), t / (t + field.one()), field.constant(2) / (t + field.one())])
    assert vector == [field.zero(), t, field.constant(2)]


def test_span_helpers():
    field = FieldDescriptor(2, ("t",))
    t, one, zero = field.param("t"), field.one(), field.zero()
    basis = [[one, t, zero], [zero, one, one]]
    assert span_contains(basis, [one, t + one, one])
    assert not span_contains(basis, [zero, zero, one])
    assert same_span(basis, [[one, t + one, one], [zero, one, one]])


def test_rank_matches_dense_oracle(rng):
    np_rng = np.random.default_rng(7)
    for p in (2, 3, 5):
        field = FieldDescriptor(p)
        for _ in range(20):
            nrows, ncols = int(np_rng.integers(1, 7)), int(np_rng.integers(1, 7))
            matrix = np_rng.integers(0, p, size=(nrows, ncols))
            rows = [{j: field.constant(int(matrix[i, j])) for j in range(ncols)} for i in range(nrows)]
            oracle = dense_nullspace_mod_p(matrix, p)
            assert rank(rows) == ncols - oracle.shape[0]
            assert not ((matrix @ oracle.T) % p).any()


def test_solve_mod_p(rng):
    for _ in range(200):
        p = rng.choice([2, 3, 5, 7])
        ncols = rng.randint(1, 8)
        nrows = rng.randint(1, 8)
        x = [rng.randrange(p) for _ in range(ncols)]
        rows = [{j: rng.randrange(p) for j in range(ncols) if rng.random() < 0.6} for _ in range(nrows)]
        rhs = [sum(v * x[j] for j, v in row.items()) % p for row in rows]
        solution = solve_mod_p(rows, rhs, p)
        assert solution is not None
        for row, value in zip(rows, rhs):
            assert sum(v * solution.get(j, 0) for j, v in row.items()) % p == value


def test_solve_mod_p_inconsistent():
    assert solve_mod_p([{0: 1, 1: 1}, {0: 1, 1: 1}], [0, 1], 2) is None


def test_nullspace_rejects_out_of_range_columns():
    field = FieldDescriptor(2)
    with pytest.raises(ValueError):
        nullspace([{3: field.one()}], 2, field)
