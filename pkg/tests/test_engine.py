# tests/test_engine.py

import os

import pandas as pd
import pytest

from app_config import WorkbenchConfig
from engine.engine import COMMANDS, WorkbenchEngine
from engine.errors import PreconditionError
from engine.verdict import Verdict
from tilting.tilting import TiltingReport


@pytest.fixture
def a2_engine(a2):
    return WorkbenchEngine(a2, WorkbenchConfig())


def test_check_tilting_report(a2_engine):
    result = a2_engine.run("check-tilting", T=["P1", "S1"], n=1, universe=True)
    assert result.value == "true"
    assert result.exit_code == 0
    report = result.report
    assert report["schema"] == 1
    assert report["command"] == "check-tilting"
    assert report["structure"] == {"kind": "abelian"}
    assert report["T1T2"]["agrees"] is True
    assert "failure" not in report


def test_failed_check_names_the_failing_part(a2_engine):
    result = a2_engine.run("check-tilting", T=["S1", "S2"], n=1)
    assert result.exit_code == 1
    assert result.report["failure"]["witness"]["ext"]["N"] == "S2"


def test_level_defaults_to_the_largest_pdim(a2_engine):
    result = a2_engine.run("check-tilting", T=["P1", "S1"])
    assert result.report["n"] == 1


def test_unknown_command(a2_engine):
    with pytest.raises(ValueError):
        a2_engine.run("summary")


def test_perp_and_enumerate(a2_engine):
    perp = a2_engine.run("perp", T=["P1", "S1"], n=1, bound=[1, 1])
    assert sorted(m["module"] for m in perp.report["members"]) == ["P1", "S1"]
    assert perp.report["bazzoni"]["agree"] is True

    enumerated = a2_engine.run("enumerate", bound=[1, 1], n_max=1)
    assert enumerated.value == "true"
    assert len(enumerated.report["elements"]) == 2
    assert enumerated.report["connected"] is True


def test_mutate_special_tilt_and_endo(a2_engine):
    mutated = a2_engine.run("mutate", T=["P1", "S1"], M=["P1"])
    assert mutated.exit_code == 1
    assert mutated.report["mutable"] is False

    special = a2_engine.run("special-tilt", M=["P1"], n=1)
    assert special.value == "true"
    assert len(special.report["spec"]) == 2

    endo = a2_engine.run("endo", T=["P1", "S1"])
    assert endo.report["gamma"]["dim"] == 3
    assert endo.report["gamma"]["cartan_determinant"] == 1

    one_tilt = a2_engine.run("endo", M=["S1"], Q=["P1"])
    assert one_tilt.value == "true"
    with pytest.raises(ValueError):
        a2_engine.run("endo", M=["S1"])


def test_miyashita_verify(a2_engine):
    result = a2_engine.run("miyashita-verify", T=["P1", "S1"], bound=[1, 1])
    assert result.value == "true", result.report["verdict"]
    assert result.report["gamma"]["idempotents"] == 2
    with pytest.raises(PreconditionError):
        a2_engine.run("miyashita-verify", T=["S1", "S2"])


def test_criteria_disagreement_makes_check_tilting_undecided(a2_engine, monkeypatch):
    def rejecting(t, n, s, cutoff=None):
        return TiltingReport(t, n, s, Verdict.of("t1", False), Verdict.of("t2", True), Verdict.of("t3", True))

    monkeypatch.setattr("tilting.tilting.check_tilting", rejecting)
    result = a2_engine.run("check-tilting", T=["P1", "S1"], n=1, universe=True)
    assert result.exit_code == 2
    assert result.report["overall"] == "undecided"
    assert result.report["T1T2"]["agrees"] is False
    assert result.report["failure"]["label"] == "cross_check"


def test_successful_mutation_report(a3_rad2):
    engine = WorkbenchEngine(a3_rad2, WorkbenchConfig())
    result = engine.run("mutate", T=["P1", "P2", "S2"], M=["P1", "P2"])
    assert result.exit_code == 0
    report = result.report
    assert report["mutable"] is True
    assert len(report["mutated"]) == 3
    assert report["verdict"]["value"] == "true"
    assert report["verdict"]["witness"]["omega"] == {"S2": True}


def test_dual_commands(dual):
    engine = WorkbenchEngine(dual, WorkbenchConfig())
    assert engine.run("gldim").report["gldim"]["kind"] == "infinite"
    resolved = engine.run("resolve", module="S")
    assert resolved.report["length_flag"] == "periodic(1, 1)"
    relative = WorkbenchEngine(dual, WorkbenchConfig(), "relative", ["S"])
    assert relative.run("gldim").report["gldim"] == {"kind": "finite", "value": 0}
    check = relative.run("structure-check")
    assert check.report["structure"] == {"kind": "relative", "generators": ["S"]}
    assert check.report["verdict"]["witness"]["relative_projectives"]


def test_truncated_resolution_is_undecided(a3):
    engine = WorkbenchEngine(a3, WorkbenchConfig(cutoff=0))
    result = engine.run("resolve", module="S1")
    assert result.exit_code == 2


def test_summary_tables(a2_engine, tmp_path):
    a2_engine.output_dir = str(tmp_path)
    empty, by_command = a2_engine.summary()
    assert empty.empty and by_command.empty

    a2_engine.run("check-tilting", T=["P1", "S1"], n=1)
    a2_engine.run("check-tilting", T=["S1", "S2"], n=1)
    a2_engine.run("gldim")
    df, by_command = a2_engine.summary(export_csv=True)
    assert len(df) == 3
    row = by_command.set_index("command").loc["check-tilting"]
    assert (row["runs"], row["true"], row["false"]) == (2, 1, 1)
    written = [f for f in os.listdir(tmp_path) if f.endswith(".csv")]
    assert len(written) == 2
    assert isinstance(pd.read_csv(os.path.join(tmp_path, sorted(written)[0])), pd.DataFrame)


def test_every_command_has_a_handler(a2_engine):
    for command in COMMANDS:
        assert callable(getattr(a2_engine, command.replace("-", "_")))
