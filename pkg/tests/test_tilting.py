# tests/test_tilting.py

from itertools import combinations

import pytest

from engine.errors import PreconditionError
from engine.homology import minimal_resolution
from engine.modcat import compose
from engine.subcat import SubcatSpec, Universe
from engine.verdict import Verdict
from tilting import (Mutation, NotMutable, check_tilting, check_tilting_T1T2, enumerate_tilting, leq, mutate,
                     special_tilting)
from tilting.tilting import TiltingReport, finitistic_pdim, in_thick_of_tilting, perp_category, pushout_coresolve


def spec(workbench, names):
    return SubcatSpec.of(workbench.modules_named(names))


# ==============================
# Deciding tilting
# ==============================

def test_projectives_are_zero_tilting(a2):
    report = check_tilting(spec(a2, ["P1", "P2"]), 0, a2.structure())
    assert report.overall
    assert report.level == 0


def test_p1_s1_is_one_tilting(a2):
    report = check_tilting(spec(a2, ["P1", "S1"]), 1, a2.structure())
    assert report.overall
    assert report.level == 1
    assert report.t2.witness["pdims"] == {"P1": "finite(0)", "S1": "finite(1)"}
    # but not 0-tilting: pdim S1 = 1
    below = check_tilting(spec(a2, ["P1", "S1"]), 0, a2.structure())
    assert below.t2.is_false
    assert below.t2.witness["exceeds"] == ["S1"]


def test_simples_fail_self_orthogonality(a2):
    report = check_tilting(spec(a2, ["S1", "S2"]), 1, a2.structure())
    assert not report.overall
    failure = report.t1.first_failure()
    assert failure.witness["ext"] == {"M": "S1", "N": "S2", "i": 1, "dim": 1}
    assert report.verdict.witness["candidate"] == ["S1", "S2"]


def test_negative_level_is_rejected(a2):
    with pytest.raises(ValueError):
        check_tilting(spec(a2, ["P1"]), -1, a2.structure())


def test_infinite_pdim_fails_t2(dual):
    report = check_tilting(spec(dual, ["S"]), 4, dual.structure())
    assert report.t2.is_false
    assert report.level is None


@pytest.mark.parametrize("names, expected", [(["P1", "S1"], True), (["S1", "S2"], False), (["P1", "P2"], True)])
def test_universe_criterion_agrees(a2, a2_universe, names, expected):
    report = check_tilting_T1T2(spec(a2, names), 1, a2_universe)
    assert report.overall == expected
    assert report.cross_check
    assert report.verdict.parts["cross_check"]


@pytest.mark.parametrize("workbench, universe", [("a2", "a2_universe"), ("a3", "a3_universe"),
                                                 ("dual", "dual_universe")])
def test_both_criteria_agree_on_every_candidate(request, workbench, universe):
    wb, modules = request.getfixturevalue(workbench), request.getfixturevalue(universe)
    size = len(wb.structure().projective_summands)
    candidates = list(combinations(modules.modules, size))
    assert len(candidates) == {"a2": 3, "a3": 20, "dual": 2}[workbench]
    for c in candidates:
        t = SubcatSpec.of(list(c))
        direct = check_tilting(t, 1, modules.structure)
        report = check_tilting_T1T2(t, 1, modules)
        assert report.cross_check, t.name
        assert report.overall == direct.overall, t.name


def test_criteria_disagreement_is_undecided(a2, a2_universe, monkeypatch):
    def rejecting(t, n, s, cutoff=None):
        return TiltingReport(t, n, s, Verdict.of("t1", False), Verdict.of("t2", True), Verdict.of("t3", True))

    monkeypatch.setattr("tilting.tilting.check_tilting", rejecting)
    report = check_tilting_T1T2(spec(a2, ["P1", "S1"]), 1, a2_universe)
    assert report.cross_check is False
    assert report.verdict.is_undecided
    assert not report.overall
    agreement = report.verdict.parts["cross_check"]
    assert agreement.witness["perp_criterion"] == "true"
    assert agreement.witness["t1_t3"] == "false"


def test_perp_category_members_carry_gen_chains(a2, a2_universe):
    members = perp_category(spec(a2, ["P1", "S1"]), 1, a2_universe)
    assert sorted(m.module.name for m in members) == ["P1", "S1"]
    assert all(m.gen_witness for m in members)


def test_thick_subcategory_of_a_tilting_module(a2, dual):
    t = spec(a2, ["P1", "S1"])
    assert in_thick_of_tilting(t, a2.module("S2"), a2.structure())
    verdict = in_thick_of_tilting(spec(dual, ["P"]), dual.module("S"), dual.structure())
    assert verdict.is_false
    assert verdict.witness["pdim"] == "infinite"
    with pytest.raises(PreconditionError):
        in_thick_of_tilting(spec(a2, ["S1", "S2"]), a2.module("P1"), a2.structure())


def test_finitistic_dimension(a2_universe, dual_universe):
    assert finitistic_pdim(a2_universe) == 1
    assert finitistic_pdim(dual_universe) == 0


# ==============================
# Constructions
# ==============================

def test_special_tilting_completes_p1(a2):
    result = special_tilting(spec(a2, ["P1"]), 1, a2.structure())
    assert result.report.overall
    assert result.spec.same_as(spec(a2, ["P1", "S1"]))
    assert len(result.coresolutions["P2"]) == 1


def test_special_tilting_needs_self_orthogonal_input(a2):
    with pytest.raises(PreconditionError):
        special_tilting(spec(a2, ["S1", "S2"]), 1, a2.structure())


def test_mutation_needs_an_inflation(a2):
    result = mutate(spec(a2, ["P1", "S1"]), spec(a2, ["P1"]), a2.structure())
    assert isinstance(result, NotMutable)
    assert result.witness["summand"] == "S1"


def test_mutation_with_nothing_to_replace(a2):
    t = spec(a2, ["P1", "S1"])
    result = mutate(t, t, a2.structure())
    assert isinstance(result, Mutation)
    assert result.spec is t
    assert result.verdict.witness["replaced"] == []


def test_mutation_of_a_radical_square_zero_algebra(a3_rad2, a3_rad2_universe):
    s = a3_rad2.structure()
    t = spec(a3_rad2, ["P1", "P2", "S2"])
    result = mutate(t, spec(a3_rad2, ["P1", "P2"]), s, a3_rad2_universe)
    assert isinstance(result, Mutation), result
    assert result.verdict
    # the injectives, 2-tilting, below T
    assert result.spec.same_as(spec(a3_rad2, ["P1", "P2", "S1"]))
    assert result.verdict.witness["level"] == 2
    assert result.verdict.witness["replaced"] == ["S2"]
    assert bool(leq(result.spec, t, s, a3_rad2_universe))
    # S1 embeds in neither P1 nor P2, yet the mutation exists
    assert list(result.verdict.witness["cogen"].values()) == [False]
    assert result.verdict.witness["omega"] == {"S2": True}
    poset = enumerate_tilting(a3_rad2_universe, n_max=2)
    assert any(result.spec.same_as(e) for e in poset.elements)


def _mutations(poset, universe):
    s = universe.structure
    for t in poset.elements:
        for size in range(1, len(t) + 1):
            for kept in combinations(t.summands, size):
                yield t, mutate(t, SubcatSpec.of(list(kept)), s, universe)


@pytest.mark.parametrize("universe, n_max", [("a3_universe", 1), ("a3_rad2_universe", 2)])
def test_every_mutation_stays_in_the_poset_below_t(request, universe, n_max):
    modules = request.getfixturevalue(universe)
    poset = enumerate_tilting(modules, n_max=n_max)
    replaced = 0
    for t, result in _mutations(poset, modules):
        if isinstance(result, NotMutable):
            continue
        assert result.verdict, result.verdict.first_failure()
        assert any(result.spec.same_as(e) for e in poset.elements), result.names
        assert leq(result.spec, t, modules.structure, modules)
        replaced += bool(result.verdict.witness["replaced"])
    if universe == "a3_rad2_universe":
        assert replaced >= 1


def test_mutation_rejects_foreign_summands_and_non_tilting(a2):
    t = spec(a2, ["P1", "S1"])
    assert isinstance(mutate(t, spec(a2, ["P2"]), a2.structure()), NotMutable)
    assert isinstance(mutate(spec(a2, ["S1", "S2"]), spec(a2, ["S1"]), a2.structure()), NotMutable)


def test_leq(a2, a2_universe):
    s = a2.structure()
    projectives, t = spec(a2, ["P1", "P2"]), spec(a2, ["P1", "S1"])
    below = leq(t, projectives, s, a2_universe)
    assert below
    assert below.witness["perp_inclusion"] is True
    assert not leq(projectives, t, s, a2_universe)


def test_leq_disagreement_is_undecided(a2, a2_universe, monkeypatch):
    s = a2.structure()
    projectives, t = spec(a2, ["P1", "P2"]), spec(a2, ["P1", "S1"])

    def skewed(x, universe, cutoff=None):
        return list(universe.modules) if x is t else []

    monkeypatch.setattr("tilting.tilting.perp_members", skewed)
    verdict = leq(t, projectives, s, a2_universe)
    assert verdict.is_undecided
    assert verdict.witness["summand_test"] == "true"
    assert verdict.witness["perp_inclusion"] is False
    assert verdict.witness["only_in_lower_perp"] == sorted(x.name for x in a2_universe.modules)


def test_pushout_coresolution(a2):
    t = spec(a2, ["P1", "S1"])
    s = a2.structure()
    result = pushout_coresolve(t, minimal_resolution(a2.module("S1")), s)
    assert len(result.terms) == 2
    assert all(t.contains(x) for x in result.terms)
    assert compose(result.maps[1], result.maps[0]).is_zero()

    trivial = pushout_coresolve(t, minimal_resolution(a2.module("P1")), s)
    assert trivial.result is a2.module("P1")
    assert len(trivial.terms) == 1


# ==============================
# Poset
# ==============================

def test_a2_poset(a2_universe):
    poset = enumerate_tilting(a2_universe, n_max=1)
    assert len(poset) == 2
    assert poset.candidates == 3
    assert poset.axioms()
    top = poset.elements[poset.maximum]
    assert sorted(top.names) == ["P1", "P2"]
    assert sorted(poset.levels) == [0, 1]
    assert len(poset.hasse_edges) == 1
    assert poset.is_connected


def test_a3_poset(a3_universe):
    poset = enumerate_tilting(a3_universe, n_max=1)
    assert len(poset) == 5
    assert poset.axioms()
    assert poset.undecided == []


def test_dual_poset(dual_universe):
    poset = enumerate_tilting(dual_universe, n_max=1)
    assert [sorted(e.names) for e in poset.elements] == [["P"]]


def test_relative_dual_poset(dual, dual_universe):
    relative = Universe(list(dual_universe), dual.structure("relative", ["S"]))
    poset = enumerate_tilting(relative, n_max=1)
    assert [sorted(e.names) for e in poset.elements] == [["P", "S"]]
    assert poset.axioms()


def test_widened_search_finds_nothing_new(a2_universe):
    poset = enumerate_tilting(a2_universe, n_max=1, widen=True)
    assert poset.candidates == 7
    assert len(poset) == 2
