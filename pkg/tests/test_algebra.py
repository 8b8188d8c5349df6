# tests/test_algebra.py

import numpy as np
import pytest

from engine.algebra import (BasedAlgebra, Quiver, cartan_determinant, cartan_matrix, opposite, path_algebra,
                            semisimple_algebra)
from engine.errors import AlgebraError


def test_fixture_dimensions(a2, a3, dual):
    assert (a2.algebra.dim, len(a2.algebra.idempotents)) == (3, 2)
    assert (a3.algebra.dim, len(a3.algebra.idempotents)) == (6, 3)
    assert (dual.algebra.dim, len(dual.algebra.idempotents)) == (2, 1)


def test_path_product_is_first_then(a2):
    a = a2.algebra
    e1, e2, arrow = (a.labels.index(x) for x in ("e1", "e2", "a"))
    # a = e2 * a * e1
    assert np.array_equal(a.multiply(a.basis_vector(e2), a.basis_vector(arrow)), a.basis_vector(arrow))
    assert np.array_equal(a.multiply(a.basis_vector(arrow), a.basis_vector(e1)), a.basis_vector(arrow))
    assert not np.any(a.multiply(a.basis_vector(arrow), a.basis_vector(e2)))


def test_relations_kill_paths(dual):
    a = dual.algebra
    x = a.labels.index("x")
    assert not np.any(a.multiply(a.basis_vector(x), a.basis_vector(x)))


def test_opposite_is_an_involution(a3):
    op = opposite(a3.algebra)
    assert op is not a3.algebra
    assert opposite(op) is a3.algebra
    assert op.name == "A3^op"


def test_cartan_matrices(a2, dual):
    assert cartan_matrix(a2.algebra) == [[1, 0], [1, 1]]
    assert cartan_determinant(a2.algebra) == 1
    assert cartan_matrix(dual.algebra) == [[2]]
    assert cartan_determinant(dual.algebra) == 2


def test_semisimple_algebra():
    k3 = semisimple_algebra(3, 5)
    assert k3.dim == 3
    assert cartan_matrix(k3) == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]


def test_arrow_presentation_of_dual_numbers(dual):
    arrows = dual.algebra.presentation.arrows
    assert arrows == [("x", 0, 0)]


def test_loop_without_relations_is_infinite_dimensional():
    q = Quiver(("1",), (("x", "1", "1"),))
    with pytest.raises(AlgebraError):
        path_algebra(q, 2)


def test_relation_must_be_admissible():
    with pytest.raises(AlgebraError):
        Quiver(("1", "2"), (("a", "1", "2"),), (((1, ("a",)),),))


def test_idempotents_must_sum_to_unit():
    constants = np.zeros((2, 2, 2), dtype=np.int64)
    constants[0, 0, 0] = 1
    with pytest.raises(AlgebraError):
        BasedAlgebra(2, ["e", "x"], constants, [0])
