# tests/test_cli.py

import json
import os

import pytest

from conftest import fixture_path
from golden_transcripts import GOLDEN_DIR, TRANSCRIPTS, transcript
from main import main, run
from utils.report_generator import dumps

A2 = fixture_path("fix_a2.txt")
A3 = fixture_path("fix_a3.txt")
DUAL = fixture_path("fix_dual.txt")


@pytest.mark.parametrize("path, command, argv, code", [
    (A2, "check-tilting", ["--T", "P1,S1", "--n", "1"], 0),
    (A2, "check-tilting", ["--T", "S1,S2", "--n", "1"], 1),
    (A2, "special-tilt", ["--M", "P1"], 0),
    (A2, "mutate", ["--T", "P1,S1", "--M", "P1"], 1),
    (DUAL, "gldim", [], 0),
    (DUAL, "check-tilting", ["--T", "P,S", "--structure", "relative", "--generators", "S"], 0),
    (A3, "resolve", ["--module", "S1", "--cutoff", "0"], 2),
])
def test_exit_codes(path, command, argv, code):
    got, report = run(path, command, argv)
    assert got == code
    assert report["command"] == command
    assert report["value"] == {0: "true", 1: "false", 2: "undecided"}[code]


def test_parse_error_report(tmp_path):
    path = tmp_path / "broken.txt"
    path.write_text("field 2\nvertex 1\nvertex 1\n")
    code, report = run(str(path), "gldim")
    assert code == 1
    assert report["error"]["type"] == "ParseError"
    assert report["error"]["line"] == 3


@pytest.mark.parametrize("argv, error", [
    (["--T", "P1,X9"], "UnknownNameError"),
    ([], "ValueError"),
    (["--T", "P1,S1", "--bound", "1,x", "--universe"], "ValueError"),
])
def test_user_errors_exit_one(argv, error):
    code, report = run(A2, "check-tilting", argv)
    assert code == 1
    assert report["error"]["type"] == error


def test_precondition_failure():
    code, report = run(A2, "special-tilt", ["--M", "S1,S2"])
    assert code == 1
    assert report["error"]["type"] == "PreconditionError"


def test_bad_config(tmp_path):
    path = tmp_path / "bad.yml"
    path.write_text("jobs: 0\n")
    code, report = run(A2, "gldim", ["--config", str(path)])
    assert code == 1
    assert report["error"]["type"] == "ConfigError"
    code, report = run(A2, "gldim", ["--config", str(tmp_path / "missing.yml")])
    assert code == 1


def test_budget_exhaustion_is_undecided(tmp_path):
    path = tmp_path / "tight.yml"
    path.write_text("enumeration_budget: 1\n")
    code, report = run(A2, "enumerate", ["--config", str(path), "--bound", "1,1"])
    assert code == 2
    assert report["error"]["budget"] == "enumeration_budget"


def test_reports_do_not_depend_on_jobs():
    argv = ["--bound", "1,1,1", "--n-max", "1"]
    _, serial = run(A3, "enumerate", argv + ["--jobs", "1"])
    _, parallel = run(A3, "enumerate", argv + ["--jobs", "2"])
    assert dumps(serial) == dumps(parallel)


@pytest.mark.parametrize("path, command, argv", [
    (A2, "check-tilting", ["--T", "S1,S2", "--n", "1"]),
    (A2, "check-tilting", ["--T", "P1,S1", "--universe", "--bound", "1,1"]),
    (A2, "perp", ["--T", "P1,S1", "--bound", "1,1"]),
    (A2, "enumerate", ["--bound", "1,1", "--n-max", "1"]),
    (A2, "mutate", ["--T", "P1,S1", "--M", "P1"]),
    (A2, "special-tilt", ["--M", "P1"]),
    (A2, "endo", ["--M", "S1", "--Q", "P1"]),
    (A3, "miyashita-verify", ["--T", "P1,M12,S1", "--bound", "1,1,1"]),
    (A3, "gldim", []),
    (A3, "resolve", ["--module", "S1"]),
    (DUAL, "structure-check", ["--structure", "relative", "--generators", "S"]),
    (DUAL, "resolve", ["--module", "S"]),
], ids=["check-tilting-rejected", "check-tilting-universe", "perp", "enumerate", "mutate", "special-tilt",
        "endo", "miyashita-verify", "gldim", "resolve", "structure-check", "resolve-periodic"])
def test_witness_replay(path, command, argv):
    plain, _ = run(path, command, argv)
    code, report = run(path, command, argv + ["--verify-witness"])
    replay = report["witness_replay"]
    assert replay["failures"] == []
    assert code == plain


def test_witness_replay_counts_checks():
    _, report = run(A2, "check-tilting", ["--T", "S1,S2", "--n", "1", "--verify-witness"])
    assert report["witness_replay"]["replayed"] > 0


def test_main_prints_json_and_writes_output(tmp_path, capsys):
    out = tmp_path / "report.json"
    code = main([A2, "check-tilting", "--T", "P1,S1", "--output", str(out)])
    assert code == 0
    printed = json.loads(capsys.readouterr().out)
    assert printed["value"] == "true"
    assert json.loads(out.read_text(encoding="utf-8")) == printed


@pytest.mark.parametrize("fixture, name, command, argv", TRANSCRIPTS, ids=[t[1] for t in TRANSCRIPTS])
def test_golden_transcripts(fixture, name, command, argv):
    path = os.path.join(GOLDEN_DIR, f"{name}.json")
    assert os.path.exists(path), f"{name}.json is missing from docs/golden"
    with open(path, "r", encoding="utf-8") as handle:
        expected = handle.read()
    _, first = transcript(fixture, command, argv)
    _, again = transcript(fixture, command, argv)
    _, serial = transcript(fixture, command, argv + ["--jobs", "1"])
    _, parallel = transcript(fixture, command, argv + ["--jobs", "2"])
    assert first == expected
    assert again == serial == parallel == expected


def test_every_fixture_has_a_golden_transcript():
    assert {t[0] for t in TRANSCRIPTS} == {"fix_a2.txt", "fix_a3.txt", "fix_dual.txt"}
    assert sorted(f"{t[1]}.json" for t in TRANSCRIPTS) == sorted(os.listdir(GOLDEN_DIR))
