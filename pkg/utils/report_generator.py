# utils/report_generator.py
"""
JSON reports (schema 1) and witness replay.

Reports are plain dicts; ``dumps`` fixes the byte layout (sorted keys,
two-space indent) so identical runs give identical files.
"""

import json
from typing import Any, Dict, List, Optional

import numpy as np

from engine import linalg
from engine.errors import WorkbenchError
from engine.exactstruct import ExactStructure, relative_ext
from engine.homology import ext, pdim, tor
from engine.modcat import Module, ModuleMap, hom_dim
from engine.subcat import Chain, SubcatSpec, chain_is_exact
from engine.verdict import Check, DimResult, Verdict
from utils.logger import get_logger

SCHEMA = 1

logger = get_logger("report")


# ===============================
# 📄 Serialization
# ===============================

def module_to_dict(m: Module) -> Dict[str, Any]:
    return {"name": m.name, "dim_vector": list(m.dim_vector), "modulus": m.algebra.p, "action": m.matrices()}


def map_to_dict(f: ModuleMap) -> Dict[str, Any]:
    return {"source": f.source.name, "target": f.target.name, "matrix": linalg.to_lists(f.matrix)}


def chain_to_dict(chain: Chain) -> Dict[str, Any]:
    modules = {}
    for f in list(chain.maps) + list(chain.links):
        for x in (f.source, f.target):
            modules.setdefault(x.name, module_to_dict(x))
    modules.setdefault(chain.start.name, module_to_dict(chain.start))
    return {"direction": chain.direction, "start": chain.start.name, "modules": modules,
            "maps": [map_to_dict(f) for f in chain.maps], "links": [map_to_dict(f) for f in chain.links]}


def check_to_dict(c: Check) -> Dict[str, Any]:
    return {"op": c.op, **c.args, "value": c.value}


def verdict_to_dict(v: Verdict) -> Dict[str, Any]:
    out = {"label": v.label, "value": v.value, "witness": v.witness,
           "checks": [check_to_dict(c) for c in v.checks]}
    if v.parts:
        out["parts"] = {label: verdict_to_dict(p) for label, p in v.parts.items()}
    if isinstance(v.data, Chain):
        out["chain"] = chain_to_dict(v.data)
    return out


def _jsonable(obj):
    if isinstance(obj, Verdict):
        return verdict_to_dict(obj)
    if isinstance(obj, DimResult):
        return obj.to_dict()
    if isinstance(obj, Module):
        return obj.name
    if isinstance(obj, ModuleMap):
        return map_to_dict(obj)
    if isinstance(obj, SubcatSpec):
        return obj.names
    if isinstance(obj, ExactStructure):
        return obj.describe()
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return np.asarray(obj, dtype=np.int64).tolist()
    if isinstance(obj, (set, frozenset)):
        return sorted(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def make_report(command: str, source: str, body: Dict[str, Any], value: str) -> Dict[str, Any]:
    return {"schema": SCHEMA, "command": command, "input": source, "value": value, **body}


def dumps(report: Dict[str, Any]) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False, default=_jsonable)


def save_report(report: Dict[str, Any], path: str):
    with open(path, "w", encoding="utf-8") as handle:
        handle.write(dumps(report) + "\n")
    logger.info(f"💾 report written to {path}")


# ===============================
# 🔁 Witness replay
# ===============================

def _walk(node, found: Dict[str, List]):
    if isinstance(node, dict):
        if "op" in node and "value" in node:
            found["checks"].append(node)
        if "direction" in node and "maps" in node and "modules" in node:
            found["chains"].append(node)
        for value in node.values():
            _walk(value, found)
    elif isinstance(node, list):
        for value in node:
            _walk(value, found)


def _rebuild_module(workbench, data: Dict[str, Any]) -> Module:
    a = workbench.algebra
    if sorted(data["action"]) != sorted(a.labels) or data["modulus"] != a.p:
        raise LookupError(f"{data['name']} is not over {a.name}")
    n = sum(data["dim_vector"])
    action = [linalg.matrix(a.gf, data["action"][label], (n, n)) for label in a.labels]
    return Module(a, action, name=data["name"])


def _replay_chain(workbench, data: Dict[str, Any]) -> bool:
    modules = {name: _rebuild_module(workbench, m) for name, m in data["modules"].items()}

    def rebuild(f):
        source, target = modules[f["source"]], modules[f["target"]]
        return ModuleMap(source, target, linalg.matrix(workbench.algebra.gf, f["matrix"], (target.dim, source.dim)))

    chain = Chain(data["direction"], modules[data["start"]], [rebuild(f) for f in data["maps"]],
                  [rebuild(f) for f in data["links"]])
    return chain_is_exact(chain)


def _replay_check(workbench, structure: ExactStructure, c: Dict[str, Any]) -> Optional[bool]:
    op = c["op"]
    if op == "ext":
        return ext(workbench.module(c["M"]), workbench.module(c["N"]), c["i"]) == c["value"]
    if op == "relative_ext":
        return relative_ext(structure, workbench.module(c["M"]), workbench.module(c["N"]), c["i"]) == c["value"]
    if op == "hom":
        return hom_dim(workbench.module(c["M"]), workbench.module(c["N"])) == c["value"]
    if op == "hom_dims":
        g = workbench.module(c["generator"])
        return [hom_dim(g, workbench.module(x)) for x in c["modules"]] == c["value"]
    if op == "pdim":
        return str(pdim(workbench.module(c["M"]), None if structure.is_abelian else structure)) == c["value"]
    if op == "tor":
        return tor(workbench.module(c["Y"]), workbench.module(c["M"]), c["i"]) == c["value"]
    return None


def replay_witnesses(report: Dict[str, Any], workbench, structure: Optional[ExactStructure] = None) -> Verdict:
    """
    Recompute every check record and rebuild every serialized chain in a
    report. Records naming modules the workbench cannot resolve (syzygies,
    modules over Γ) are counted as skipped.
    """
    structure = structure or ExactStructure.abelian(workbench.algebra)
    found = {"checks": [], "chains": []}
    _walk(json.loads(dumps(report)), found)
    replayed, skipped, failures = 0, 0, []
    for c in found["checks"]:
        try:
            ok = _replay_check(workbench, structure, c)
        except (WorkbenchError, KeyError, LookupError):
            ok = None
        if ok is None:
            skipped += 1
            continue
        replayed += 1
        if not ok:
            failures.append(c)
    for chain in found["chains"]:
        try:
            ok = _replay_chain(workbench, chain)
        except (WorkbenchError, KeyError, LookupError):
            skipped += 1
            continue
        replayed += 1
        if not ok:
            failures.append({"chain": chain["start"], "direction": chain["direction"]})
    if failures:
        logger.error(f"❌ {len(failures)} witnesses failed to replay")
    else:
        logger.info(f"✅ replayed {replayed} witnesses ({skipped} skipped)")
    return Verdict.of("witness_replay", not failures,
                      witness={"replayed": replayed, "skipped": skipped, "failures": failures})
