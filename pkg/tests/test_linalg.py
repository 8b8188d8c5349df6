# tests/test_linalg.py

import pytest

from engine import linalg
from engine.errors import DimensionMismatch, FieldError


@pytest.fixture
def gf3():
    return linalg.field(3)


@pytest.mark.parametrize("p", [0, 1, 4, 9, 257])
def test_field_rejects_bad_moduli(p):
    with pytest.raises(FieldError):
        linalg.field(p)


def test_mixed_fields_are_rejected():
    a = linalg.identity(linalg.field(2), 2)
    b = linalg.identity(linalg.field(3), 2)
    with pytest.raises(FieldError):
        linalg.mul(a, b)


def test_matrix_reduces_entries(gf3):
    m = linalg.matrix(gf3, [[-1, 4], [3, 5]])
    assert linalg.to_lists(m) == [[2, 1], [0, 2]]


def test_rank_and_nullity(gf3):
    m = linalg.matrix(gf3, [[1, 2, 0], [2, 1, 0], [0, 0, 1]])
    # rows 1 and 2 agree over F_3 up to a scalar: 2 * (1, 2) = (2, 1)
    assert linalg.rank(m) == 2
    assert linalg.nullity(m) == 1


def test_kernel_basis_spans_null_space(gf3):
    m = linalg.matrix(gf3, [[1, 1, 1], [0, 1, 2]])
    k = linalg.kernel_basis(m)
    assert k.shape == (3, 1)
    assert linalg.is_zero(linalg.mul(m, k))


def test_solve_consistent_and_inconsistent(gf3):
    a = linalg.matrix(gf3, [[1, 0], [0, 0]])
    x = linalg.solve(a, linalg.matrix(gf3, [[2], [0]]))
    assert linalg.equal(linalg.mul(a, x), linalg.matrix(gf3, [[2], [0]]))
    assert linalg.solve(a, linalg.matrix(gf3, [[0], [1]])) is None


def test_inverse_round_trip(gf3):
    m = linalg.matrix(gf3, [[1, 2], [1, 1]])
    assert linalg.equal(linalg.mul(m, linalg.inverse(m)), linalg.identity(gf3, 2))


def test_inverse_of_singular_matrix_raises(gf3):
    with pytest.raises(DimensionMismatch):
        linalg.inverse(linalg.matrix(gf3, [[1, 2], [2, 1]]))


def test_coordinates_outside_span_raise(gf3):
    basis = linalg.matrix(gf3, [[1], [0]])
    with pytest.raises(DimensionMismatch):
        linalg.coordinates(basis, linalg.matrix(gf3, [[0], [1]]))


def test_complement_columns_completes_a_basis(gf3):
    sub = linalg.matrix(gf3, [[1], [1], [0]])
    comp = linalg.complement_columns(sub, 3)
    assert comp.shape == (3, 2)
    assert linalg.is_invertible(linalg.hstack(gf3, [sub, comp], 3))


def test_kron_and_block_diag_shapes(gf3):
    a = linalg.matrix(gf3, [[1, 2]])
    b = linalg.identity(gf3, 2)
    assert linalg.kron(a, b).shape == (2, 4)
    assert linalg.block_diag(gf3, [a, b]).shape == (3, 4)


def test_flatten_is_row_major(gf3):
    m = linalg.matrix(gf3, [[1, 2], [0, 1]])
    assert linalg.to_lists(linalg.flatten(m)) == [[1], [2], [0], [1]]
    assert linalg.equal(linalg.unflatten(linalg.flatten(m), 2, 2), m)
