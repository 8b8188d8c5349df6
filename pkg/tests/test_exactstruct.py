# tests/test_exactstruct.py

import pytest

from app_config import WorkbenchConfig, use_config
from engine.errors import BudgetExceeded, PreconditionError
from engine.exactstruct import (Conflation, ExactStructure, count_extension_classes, extension_basis, extensions,
                                is_conflation, relative_ext, relative_gldim, relative_pdim, relative_projectives,
                                structure_check)
from engine.homology import ext
from engine.modcat import is_isomorphic


@pytest.fixture(scope="module")
def dual_relative(dual):
    return dual.structure("relative", ["S"])


def test_extension_count_matches_ext(a2_universe, a3_universe):
    for universe in (a2_universe, a3_universe):
        members = list(universe)
        for x in members:
            for z in members:
                if x.dim + z.dim > 3:
                    continue
                p = x.algebra.p
                assert count_extension_classes(x, z) == p ** ext(z, x, 1), (x.name, z.name)
                assert len(extension_basis(x, z)) == ext(z, x, 1)


def test_extensions_list_split_class_first(a2):
    s1, s2, p1 = a2.modules_named(["S1", "S2", "P1"])
    split, nonsplit = extensions(s2, s1)
    assert split.middle.dim_vector == (1, 1)
    assert not is_isomorphic(split.middle, p1)
    assert is_isomorphic(nonsplit.middle, p1)


def test_extension_budget(a2):
    s1, s2 = a2.modules_named(["S1", "S2"])
    with use_config(WorkbenchConfig(extension_budget=1)):
        with pytest.raises(BudgetExceeded) as info:
            extensions(s2, s1)
    assert info.value.budget == "extension_budget"


def test_relative_structure_rejects_the_nonsplit_sequence(dual, dual_relative):
    s = dual.module("S")
    abelian = ExactStructure.abelian(dual.algebra)
    assert len(extension_basis(s, s)) == 1
    split, nonsplit = extensions(s, s)
    assert is_isomorphic(nonsplit.middle, dual.module("P"))
    assert is_conflation(abelian, nonsplit.conflation)
    verdict = is_conflation(dual_relative, nonsplit.conflation)
    assert verdict.is_false
    assert verdict.witness["generator"] == "S"
    assert verdict.checks[0].value == [1, 1, 1]
    assert is_conflation(dual_relative, split.conflation)


def test_relative_projectives_and_gldim(dual, dual_universe, dual_relative):
    names = sorted(m.name for m in relative_projectives(dual_relative, list(dual_universe)))
    assert names == ["P", "S"]
    assert relative_gldim(dual_relative, list(dual_universe)).value == 0
    assert relative_pdim(dual_relative, dual.module("S")).value == 0
    assert relative_ext(dual_relative, dual.module("S"), dual.module("S"), 1) == 0


def test_relative_operations_refuse_the_abelian_structure(a2):
    abelian = ExactStructure.abelian(a2.algebra)
    s1 = a2.module("S1")
    with pytest.raises(PreconditionError):
        relative_ext(abelian, s1, s1, 1)
    with pytest.raises(PreconditionError):
        relative_projectives(abelian, [s1])


def test_relative_structure_needs_generators(a2):
    with pytest.raises(PreconditionError):
        ExactStructure.relative(a2.algebra, [])


def test_projective_generators_give_back_the_abelian_structure(a2, a2_universe):
    relative = a2.structure("relative", ["P1", "P2"])
    members = list(a2_universe)
    for m in members:
        for n in members:
            assert relative_ext(relative, m, n, 1) == ext(m, n, 1)
    assert relative_gldim(relative, members).value == 1


def test_conflation_needs_composable_exact_maps(a2):
    s1, s2 = a2.modules_named(["S1", "S2"])
    split, _ = extensions(s2, s1)
    abelian = ExactStructure.abelian(a2.algebra)
    assert is_conflation(abelian, Conflation(split.inflation, split.deflation))
    assert not abelian.is_deflation(split.inflation)


def test_structure_check_summaries(dual, dual_universe, dual_relative, a2, a2_universe):
    verdict = structure_check(dual_relative, list(dual_universe))
    assert verdict
    assert verdict.witness["gldim"] == {"kind": "finite", "value": 0}
    assert {"A": "S", "C": "S", "generator": "S"} in verdict.witness["rejected_extensions"]

    abelian = structure_check(ExactStructure.abelian(a2.algebra), list(a2_universe))
    assert abelian.witness["rejected_extensions"] == []
    assert abelian.witness["gldim"]["value"] == 1
