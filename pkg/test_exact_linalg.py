"""
Tests for sparse integer matrices, Smith normal forms and exact solves.
Invariant factors are cross-checked against sympy.
"""

import random

import pytest
from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_form as sympy_smith_normal_form
from sympy.polys.domains import ZZ as SYMPY_ZZ

import exact_linalg
from errors import DimensionError, PreconditionError
from exact_linalg import (
    ZZ,
    CoefficientRing,
    IntMatrix,
    columns_matrix,
    rank_mod_p,
    rank_over_rationals,
    smith_normal_form,
    solve_in_image,
)


def _sympy_invariants(data):
    if not data or not data[0]:
        return []
    D = sympy_smith_normal_form(Matrix(data), domain=SYMPY_ZZ)
    return sorted(abs(int(D[k, k])) for k in range(min(D.shape)) if D[k, k] != 0)


def test_known_smith_form():
    M = IntMatrix.from_dense([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    snf = smith_normal_form(M)
    assert snf.diagonal == [2, 6, 12]
    assert snf.rank == 3
    assert snf.reconstructs(M)


def test_transform_inverses():
    M = IntMatrix.from_dense([[1, 2, 3], [4, 5, 6], [7, 8, 9]])
    snf = smith_normal_form(M)
    assert (snf.U @ snf.U_inv) == IntMatrix.identity(3)
    assert (snf.V @ snf.V_inv) == IntMatrix.identity(3)
    assert snf.diagonal == [1, 3]


@pytest.mark.parametrize("seed", range(40))
def test_random_matrices_match_sympy(seed):
    rng = random.Random(seed)
    rows, cols = rng.randint(1, 6), rng.randint(1, 6)
    data = [[rng.choice([0, 0, 1, -1, 2, 3, -4]) for _ in range(cols)] for _ in range(rows)]
    M = IntMatrix.from_dense(data)
    snf = smith_normal_form(M)
    assert snf.reconstructs(M)
    assert sorted(snf.diagonal) == _sympy_invariants(data)
    for a, b in zip(snf.diagonal, snf.diagonal[1:]):
        assert b % a == 0


def test_field_smith_form_has_unit_diagonal():
    M = IntMatrix.from_dense([[2, 4], [6, 8]])
    snf = smith_normal_form(M, CoefficientRing(5))
    assert snf.diagonal == [1, 1]
    assert snf.reconstructs(M)


def test_ranks():
    M = IntMatrix.from_dense([[2, 0], [0, 1]])
    assert rank_over_rationals(M) == 2
    assert rank_mod_p(M, 2) == 1
    assert rank_over_rationals(IntMatrix.zero(3, 2)) == 0


def test_solve_in_image():
    M = IntMatrix.from_dense([[2, 0], [0, 3]])
    assert solve_in_image(M, [4, 9]) == [2, 3]
    assert solve_in_image(M, [1, 0]) is None
    x = solve_in_image(M, [1, 0], CoefficientRing(5))
    assert M.matvec(x)[0] % 5 == 1
    with pytest.raises(DimensionError):
        solve_in_image(M, [1, 2, 3])


def test_solve_detects_rows_outside_the_image():
    M = IntMatrix.from_dense([[1], [1]])
    assert solve_in_image(M, [1, 1]) == [1]
    assert solve_in_image(M, [1, 0]) is None


def test_columns_matrix():
    M = columns_matrix(3, [{0: 1, 2: 5}, {1: -1}])
    assert M.to_dense() == [[1, 0], [0, -1], [5, 0]]
    assert columns_matrix(2, []).cols == 0


def test_coefficient_ring_parsing():
    assert CoefficientRing.parse("Z") == ZZ
    assert CoefficientRing.parse("Zp:3").p == 3
    assert CoefficientRing.parse("Zp:3").label == "Zp:3"
    with pytest.raises(PreconditionError):
        CoefficientRing.parse("Zp:4")
    with pytest.raises(PreconditionError):
        CoefficientRing.parse("Q")


def test_matrix_shape_errors():
    with pytest.raises(DimensionError):
        IntMatrix(2, 2, {(2, 0): 1})
    with pytest.raises(DimensionError):
        IntMatrix.identity(2) @ IntMatrix.identity(3)


def test_small_rank_and_solve_cases():
    M = IntMatrix.from_dense([[2, 4], [6, 8]])
    assert rank_mod_p(M, 2) == 0
    assert rank_mod_p(M, 3) == 2
    assert smith_normal_form(M).diagonal == [2, 4]
    assert smith_normal_form(IntMatrix.zero(2, 3)).rank == 0
    assert solve_in_image(IntMatrix.from_dense([[2]]), [3]) is None
    assert solve_in_image(IntMatrix.from_dense([[2]]), [3], CoefficientRing(5)) == [4]


def _sparse_matrix(rng, rows, cols, per_row=3):
    entries = {}
    for i in range(rows):
        for j in rng.sample(range(cols), min(per_row, cols)):
            entries[(i, j)] = rng.choice([1, -1, 1, 2, 3, -2])
    return IntMatrix(rows, cols, entries)


@pytest.mark.parametrize("seed", range(20))
def test_sparse_and_dense_elimination_agree(seed, monkeypatch):
    M = _sparse_matrix(random.Random(seed), 12, 15)
    results = []
    for threshold in (0.0, 0.3, 1.0):
        monkeypatch.setattr(exact_linalg, "DENSE_FILL", threshold)
        snf = smith_normal_form(M)
        assert snf.reconstructs(M)
        results.append(snf.diagonal)
    assert results[0] == results[1] == results[2]
    assert sorted(results[0]) == _sympy_invariants(M.to_dense())


def test_one_sided_transforms():
    M = IntMatrix.from_dense([[2, 4, 4], [-6, 6, 12], [10, -4, -16]])
    left = smith_normal_form(M, left=True, right=False)
    right = smith_normal_form(M, left=False, right=True)
    assert left.V is None and left.V_inv is None
    assert right.U is None and right.U_inv is None
    assert left.diagonal == right.diagonal == [2, 6, 12]
    assert (left.U @ left.U_inv) == IntMatrix.identity(3)
    assert (right.V @ right.V_inv) == IntMatrix.identity(3)
    with pytest.raises(PreconditionError):
        left.reconstructs(M)


def test_long_cycle_coboundary_stays_sparse():
    n = 300
    entries = {}
    for i in range(n):
        entries[(i, i)] = -1
        entries[(i, (i + 1) % n)] = 1
    M = IntMatrix(n, n, entries)
    snf = smith_normal_form(M)
    assert snf.rank == n - 1
    assert set(snf.diagonal) == {1}
    assert snf.reconstructs(M)
    assert rank_mod_p(M, 7) == n - 1


@pytest.mark.parametrize("seed", range(30))
def test_rational_rank_bounds_every_modular_rank(seed):
    rng = random.Random(seed)
    data = [[rng.choice([0, 2, 3, -6, 1, 0]) for _ in range(5)] for _ in range(4)]
    M = IntMatrix.from_dense(data)
    rational = rank_over_rationals(M)
    for p in (2, 3, 5):
        assert rank_mod_p(M, p) <= rational


@pytest.mark.parametrize("seed", range(20))
def test_smith_form_ignores_row_and_column_order(seed):
    rng = random.Random(seed)
    data = [[rng.choice([0, 1, -1, 2, 4, 6]) for _ in range(5)] for _ in range(4)]
    rows, cols = list(range(4)), list(range(5))
    rng.shuffle(rows)
    rng.shuffle(cols)
    shuffled = [[data[i][j] for j in cols] for i in rows]
    assert smith_normal_form(IntMatrix.from_dense(data)).diagonal == \
        smith_normal_form(IntMatrix.from_dense(shuffled)).diagonal
