# tests/test_report_generator.py

import copy
import json

import numpy as np

from engine.subcat import SubcatSpec, in_cores_n
from engine.verdict import Check, DimResult, Verdict
from utils.report_generator import (SCHEMA, chain_to_dict, dumps, make_report, module_to_dict, replay_witnesses,
                                    save_report, verdict_to_dict)


def test_module_serialization(a2):
    data = module_to_dict(a2.module("P1"))
    assert data["name"] == "P1"
    assert data["dim_vector"] == [1, 1]
    assert data["modulus"] == 2
    assert set(data["action"]) == set(a2.algebra.labels)


def test_dumps_is_sorted_and_handles_workbench_types(a2):
    report = make_report("demo", "x.txt", {"z": DimResult.finite(2), "a": np.int64(3), "m": a2.module("S1"),
                                           "s": {"b", "a"}}, "true")
    text = dumps(report)
    data = json.loads(text)
    assert data["schema"] == SCHEMA
    assert data["z"] == {"kind": "finite", "value": 2}
    assert data["a"] == 3
    assert data["m"] == "S1"
    assert data["s"] == ["a", "b"]
    assert list(data) == sorted(data)


def test_verdict_with_a_chain(a2):
    t = SubcatSpec.of(a2.modules_named(["P1", "S1"]))
    verdict = in_cores_n(t, a2.module("P2"), 1, a2.structure())
    out = verdict_to_dict(verdict)
    assert out["value"] == "true"
    assert out["chain"]["direction"] == "left"
    assert out["chain"] == chain_to_dict(verdict.data)


def test_replay_accepts_honest_reports(a2):
    t = SubcatSpec.of(a2.modules_named(["P1", "S1"]))
    verdict = in_cores_n(t, a2.module("P2"), 1, a2.structure())
    body = {"verdict": verdict_to_dict(verdict),
            "extra": verdict_to_dict(Verdict.of("ext", False, checks=[Check("ext", {"M": "S1", "N": "S2", "i": 1}, 1)]))}
    replay = replay_witnesses(make_report("demo", a2.source, body, "true"), a2)
    assert replay
    assert replay.witness["replayed"] == 2


def test_replay_catches_tampering(a2):
    checks = [Check("ext", {"M": "S1", "N": "S2", "i": 1}, 1), Check("hom", {"M": "P2", "N": "P1"}, 1),
              Check("pdim", {"M": "S1"}, "finite(1)"), Check("ext", {"M": "Ω1(S1)", "N": "S2", "i": 1}, 0)]
    report = make_report("demo", a2.source, {"verdict": verdict_to_dict(Verdict.of("x", True, checks=checks))},
                         "true")
    honest = replay_witnesses(report, a2)
    assert honest
    assert honest.witness == {"replayed": 3, "skipped": 1, "failures": []}

    forged = copy.deepcopy(report)
    forged["verdict"]["checks"][0]["value"] = 0
    replay = replay_witnesses(forged, a2)
    assert replay.is_false
    assert replay.witness["failures"][0]["M"] == "S1"


def test_save_report(tmp_path, a2):
    path = tmp_path / "out.json"
    save_report(make_report("demo", "x", {}, "false"), str(path))
    assert json.loads(path.read_text(encoding="utf-8"))["value"] == "false"
