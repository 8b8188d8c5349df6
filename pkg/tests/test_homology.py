# tests/test_homology.py

import pytest

from app_config import WorkbenchConfig, use_config
from engine.algebra import opposite
from engine.errors import AlgebraError, UndecidedError
from engine.homology import (ext, ext_table, euler_form, gldim, idim, left_approximation, minimal_resolution,
                             pdim, projective_cover, right_approximation, syzygy, tensor_dim, tor)
from engine.modcat import hom_dim, is_injective, is_isomorphic, is_surjective, simples
from engine.verdict import DimResult


def test_ext_between_simples_of_a2(a2):
    s1, s2, p1 = a2.modules_named(["S1", "S2", "P1"])
    assert ext(s1, s2, 1) == 1
    assert ext(s2, s1, 1) == 0
    assert ext(s1, p1, 1) == 0
    assert ext(s1, s2, 2) == 0


def test_ext_table_starts_with_hom(a2):
    s1, s2 = a2.modules_named(["S1", "S2"])
    assert ext_table(s1, s2, 2).dims == [0, 1, 0]
    assert ext_table(s1, s1, 1).dims == [1, 0]


def test_negative_degree_is_rejected(a2):
    s1 = a2.module("S1")
    with pytest.raises(ValueError):
        ext(s1, s1, -1)


@pytest.mark.parametrize("universe", ["a2_universe", "a3_universe"])
def test_euler_form_matches_hom_minus_ext(request, universe):
    members = list(request.getfixturevalue(universe))
    for m in members:
        for n in members:
            assert hom_dim(m, n) - ext(m, n, 1) == euler_form(m, n), (m.name, n.name)


def test_euler_form_needs_a_path_algebra(dual):
    s = dual.module("S")
    with pytest.raises(AlgebraError):
        euler_form(s, s)


def test_projective_cover_and_syzygy(a2):
    s1, p1, p2 = a2.modules_named(["S1", "P1", "P2"])
    cover = projective_cover(s1)
    assert is_surjective(cover)
    assert is_isomorphic(cover.source, p1)
    assert is_isomorphic(syzygy(s1, 1), p2)
    assert syzygy(s1, 2).dim == 0


def test_minimal_resolution_flags(a2, dual):
    assert str(minimal_resolution(a2.module("S1")).flag) == "finite(1)"
    assert str(minimal_resolution(a2.module("P1")).flag) == "finite(0)"
    res = minimal_resolution(dual.module("S"))
    assert res.flag.kind == "periodic"
    assert (res.flag.period, res.flag.entry) == (1, 1)


def test_periodic_resolution_answers_every_degree(dual):
    s = dual.module("S")
    assert [ext(s, s, i) for i in range(6)] == [1] * 6


def test_truncated_resolution_is_undecided(a3):
    res = minimal_resolution(a3.module("S1"), cutoff=0)
    assert str(res.flag) == "truncated_at(0)"
    with pytest.raises(UndecidedError):
        res.reduce_degree(5)


def test_negative_cutoff_is_rejected(a2):
    with pytest.raises(ValueError):
        minimal_resolution(a2.module("S1"), cutoff=-1)


def test_pdim_idim_and_gldim(a2, a3, dual):
    assert pdim(a2.module("S1")) == DimResult.finite(1, "finite(1)")
    assert pdim(a2.module("P1")).value == 0
    assert idim(a2.module("S1")).value == 0
    assert idim(a2.module("S2")).value == 1
    assert gldim(a2.algebra).value == 1
    assert gldim(a3.algebra).value == 1
    assert pdim(dual.module("S")).kind == "infinite"
    assert gldim(dual.algebra).kind == "infinite"


def test_tor_over_the_dual_numbers(dual):
    a = dual.algebra
    s = dual.module("S")
    s_op = simples(opposite(a))[0]
    assert tensor_dim(s_op, s) == 1
    assert [tor(s_op, s, i) for i in range(4)] == [1, 1, 1, 1]


def test_tor_vanishes_above_the_global_dimension(a2):
    s1 = a2.module("S1")
    for y in simples(opposite(a2.algebra)):
        assert tor(y, s1, 2) == 0


def test_tor_rejects_left_modules(a2):
    s1 = a2.module("S1")
    with pytest.raises(AlgebraError):
        tor(s1, s1, 0)


def test_approximations(a3):
    p1, p2, s1, m12 = a3.modules_named(["P1", "P2", "S1", "M12"])
    right = right_approximation(s1, [p1, p2])
    assert is_surjective(right)
    assert is_isomorphic(right.source, p1)
    left = left_approximation(p2, [p1])
    assert is_injective(left)
    assert is_isomorphic(left.target, p1)
    # a summand approximates itself
    assert right_approximation(m12, [m12]).source is m12


def test_cutoff_comes_from_settings(a3):
    with use_config(WorkbenchConfig(cutoff=0)):
        assert pdim(a3.module("S2")).kind == "undecided"
    assert pdim(a3.module("S2")).value == 1
