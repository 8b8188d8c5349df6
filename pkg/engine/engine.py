# engine/engine.py

import os
import time
from dataclasses import dataclass
from datetime import datetime
from typing import Any, Dict, List, Optional, Sequence, Tuple

import pandas as pd

from app_config import WorkbenchConfig, settings, use_config
from data.data_loader import Workbench
from engine.algebra import cartan_determinant, cartan_matrix
from engine.exactstruct import ABELIAN, ExactStructure, relative_gldim, structure_check
from engine.homology import gldim
from engine.modcat import decompose, enumerate_indecomposables
from engine.subcat import SubcatSpec, bazzoni_sets
from engine.verdict import FALSE, TRUE, UNDECIDED, Verdict
from tilting.miyashita import (TransportContext, cartan_check, endo_algebra, endo_special_one_tilt,
                               gldim_transfer_check, resolving_depth, verify_adjunction, verify_miyashita)
from tilting.tilting import (NotMutable, check_tilting, check_tilting_T1T2, enumerate_tilting, mutate,
                             perp_category, special_tilting)
from utils.logger import get_logger
from utils.report_generator import make_report, module_to_dict, verdict_to_dict

logger = get_logger("engine")

EXIT_CODES = {TRUE: 0, FALSE: 1, UNDECIDED: 2}


@dataclass
class CommandResult:
    command: str
    value: str
    report: Dict[str, Any]
    seconds: float

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.value]


class WorkbenchEngine:
    """Runs workbench commands against one loaded file and keeps a record of every result."""

    def __init__(self, workbench: Workbench, config: Optional[WorkbenchConfig] = None,
                 structure: str = ABELIAN, generators: Sequence[str] = ()):
        self.workbench = workbench
        self.config = config or settings()
        self.structure: ExactStructure = workbench.structure(structure, generators)
        self.results: List[CommandResult] = []
        self.output_dir = self.config.output_dir

    # ===============================
    # 🧰 Helpers
    # ===============================

    def spec(self, names: Sequence[str], label: Optional[str] = None) -> SubcatSpec:
        return SubcatSpec.of(self.workbench.modules_named(names), name=label or f"add({'⊕'.join(names)})")

    def universe(self, bound: Optional[Sequence[int]] = None):
        return self.workbench.universe(bound, self.structure, jobs=self.config.jobs)

    def _level(self, t: SubcatSpec, n: Optional[int]) -> int:
        if n is not None:
            return n
        dims = [self.structure.pdim(x, self.config.cutoff) for x in t.summands]
        return max((d.value for d in dims if d.is_finite), default=0)

    def _record(self, command: str, body: Dict[str, Any], value: str, started: float) -> CommandResult:
        report = make_report(command, self.workbench.source, {"structure": self.structure.describe(), **body}, value)
        result = CommandResult(command, value, report, time.time() - started)
        self.results.append(result)
        icon = {TRUE: "✅", FALSE: "❌", UNDECIDED: "⚠️"}[value]
        logger.info(f"{icon} {command}: {value} ({result.seconds:.2f}s)")
        return result

    # ===============================
    # 🚀 Commands
    # ===============================

    def run(self, command: str, **kw) -> CommandResult:
        handler = getattr(self, command.replace("-", "_"), None)
        if command not in COMMANDS or handler is None:
            raise ValueError(f"unknown command {command!r}")
        with use_config(self.config):
            return handler(**kw)

    def check_tilting(self, T: Sequence[str], n: Optional[int] = None, universe: bool = False,
                      bound: Optional[Sequence[int]] = None) -> CommandResult:
        started = time.time()
        t = self.spec(T)
        n = self._level(t, n)
        report = check_tilting(t, n, self.structure, self.config.cutoff)
        verdict = report.verdict
        body = {"candidate": t.names, "n": n, "verdict": verdict_to_dict(verdict),
                "pdims": {k: d.to_dict() for k, d in report.pdims.items()}}
        if universe:
            direct = check_tilting_T1T2(t, n, self.universe(bound), self.config.cutoff)
            body["T1T2"] = {"verdict": verdict_to_dict(direct.verdict), "agrees": direct.cross_check}
            verdict = Verdict.all_of(verdict.label, [verdict, direct.agreement], witness=verdict.witness)
        failure = verdict.first_failure()
        if failure is not None:
            body["failure"] = {"label": failure.label, "witness": failure.witness}
        body["overall"] = verdict.value
        return self._record("check-tilting", body, verdict.value, started)

    def perp(self, T: Sequence[str], n: Optional[int] = None, bound: Optional[Sequence[int]] = None) -> CommandResult:
        started = time.time()
        t = self.spec(T)
        n = self._level(t, n)
        universe = self.universe(bound)
        members = perp_category(t, n, universe, self.config.cutoff)
        sets = bazzoni_sets(t, n, universe, self.config.cutoff)
        body = {"candidate": t.names, "n": n,
                "members": [{"module": m.module.name, "gen": verdict_to_dict(m.gen_witness)} for m in members],
                "bazzoni": {"perp": sets.perp, "pres_lower": sets.pres_lower, "pres_n": sets.pres_n,
                            "gen_lower": sets.gen_lower, "agree": sets.agree}}
        value = TRUE if all(m.gen_witness for m in members) else FALSE
        return self._record("perp", body, value, started)

    def enumerate(self, bound: Optional[Sequence[int]] = None, n_max: Optional[int] = None,
                  widen_search: Optional[bool] = None) -> CommandResult:
        started = time.time()
        universe = self.universe(bound)
        poset = enumerate_tilting(universe, n_max, widen_search, self.config.cutoff, self.config.jobs)
        axioms = poset.axioms()
        body = {"universe": [m.name for m in universe.modules], "candidates": poset.candidates,
                "elements": [{"summands": e.names, "level": lvl} for e, lvl in zip(poset.elements, poset.levels)],
                "order": poset.order, "hasse_edges": [list(e) for e in poset.hasse_edges],
                "connected": poset.is_connected, "maximum": poset.maximum,
                "undecided": poset.undecided, "axioms": verdict_to_dict(axioms)}
        value = UNDECIDED if poset.undecided else axioms.value
        return self._record("enumerate", body, value, started)

    def mutate(self, T: Sequence[str], M: Sequence[str], bound: Optional[Sequence[int]] = None) -> CommandResult:
        started = time.time()
        t, m = self.spec(T), self.spec(M)
        universe = self.universe(bound) if bound is not None else None
        result = mutate(t, m, self.structure, universe, self.config.cutoff)
        if isinstance(result, NotMutable):
            body = {"candidate": t.names, "M": m.names, "mutable": False, "reason": result.reason,
                    "witness": result.witness}
            return self._record("mutate", body, FALSE, started)
        body = {"candidate": t.names, "M": m.names, "mutable": True, "mutated": result.names,
                "modules": [module_to_dict(x) for x in result.summands], "verdict": verdict_to_dict(result.verdict)}
        return self._record("mutate", body, result.verdict.value, started)

    def special_tilt(self, M: Sequence[str], n: int = 1) -> CommandResult:
        started = time.time()
        m = self.spec(M)
        result = special_tilting(m, n, self.structure, self.config.cutoff)
        verdict = result.report.verdict
        body = {"M": m.names, "n": n, "spec": result.spec.names, "coresolutions": result.coresolutions,
                "modules": [module_to_dict(x) for x in result.spec.summands], "verdict": verdict_to_dict(verdict)}
        return self._record("special-tilt", body, verdict.value, started)

    def endo(self, T: Optional[Sequence[str]] = None, M: Optional[Sequence[str]] = None,
             Q: Optional[Sequence[str]] = None, bound: Optional[Sequence[int]] = None) -> CommandResult:
        started = time.time()
        if T:
            t = self.spec(T)
            gamma = endo_algebra(t)
            body = {"candidate": t.names, "gamma": self._algebra_summary(gamma)}
            return self._record("endo", body, TRUE, started)
        if not (M and Q):
            raise ValueError("endo needs --T, or both --M and --Q")
        m = self.workbench.modules_named(M)
        q = self.workbench.modules_named(Q)
        m_mod = self.spec(M).sum_module if len(m) > 1 else m[0]
        q_mod = self.spec(Q).sum_module if len(q) > 1 else q[0]
        result = endo_special_one_tilt(m_mod, q_mod, bound, self.config.cutoff)
        verdict = Verdict.all_of("endo_special_one_tilt", [result.report.verdict, result.gen_agreement])
        body = {"M": list(M), "Q": list(Q), "gamma": self._algebra_summary(result.algebra),
                "spec": result.spec.names, "projective": result.projective.names,
                "modules": [module_to_dict(x) for x in result.spec.summands], "verdict": verdict_to_dict(verdict)}
        return self._record("endo", body, verdict.value, started)

    @staticmethod
    def _algebra_summary(a) -> Dict[str, Any]:
        return {"name": a.name, "dim": a.dim, "idempotents": len(a.idempotents), "labels": a.labels,
                "cartan": cartan_matrix(a), "cartan_determinant": cartan_determinant(a)}

    def miyashita_verify(self, T: Sequence[str], bound: Optional[Sequence[int]] = None,
                         gamma_bound: Optional[Sequence[int]] = None) -> CommandResult:
        started = time.time()
        t = self.spec(T)
        ctx = TransportContext.build(t, self.structure)
        universe = self.universe(bound)
        gamma_bound = gamma_bound or [1] * len(ctx.gamma.idempotents)
        gamma_universe = enumerate_indecomposables(ctx.gamma, gamma_bound, jobs=self.config.jobs)
        cutoff = self.config.cutoff
        main = verify_miyashita(ctx, universe, gamma_universe, cutoff)
        depth = resolving_depth(ctx, gamma_universe, cutoff)
        transfer = gldim_transfer_check(ctx, ctx.n, depth, cutoff)
        cartan = cartan_check(ctx, cutoff)
        adjunction = verify_adjunction(ctx, universe, gamma_universe)
        verdict = Verdict.all_of("miyashita_verify", [main, transfer, cartan, adjunction])
        body = {"candidate": t.names, "n": ctx.n, "gamma": self._algebra_summary(ctx.gamma),
                "gamma_universe": [y.name for y in gamma_universe], "resolving_depth": depth,
                "verdict": verdict_to_dict(verdict)}
        return self._record("miyashita-verify", body, verdict.value, started)

    def gldim(self, bound: Optional[Sequence[int]] = None) -> CommandResult:
        started = time.time()
        if self.structure.is_abelian:
            dim = gldim(self.workbench.algebra, cutoff=self.config.cutoff)
        else:
            dim = relative_gldim(self.structure, self.universe(bound).modules, self.config.cutoff)
        value = UNDECIDED if dim.kind == "undecided" else TRUE
        return self._record("gldim", {"gldim": dim.to_dict()}, value, started)

    def structure_check(self, bound: Optional[Sequence[int]] = None) -> CommandResult:
        started = time.time()
        verdict = structure_check(self.structure, self.universe(bound).modules, self.config.cutoff)
        return self._record("structure-check", {"verdict": verdict_to_dict(verdict)}, verdict.value, started)

    def resolve(self, module: str) -> CommandResult:
        started = time.time()
        m = self.workbench.module(module)
        res = self.structure.resolution(m, self.config.cutoff)
        body = {"module": m.name, "flag": res.flag.to_dict(), "length_flag": str(res.flag),
                "terms": [{"name": x.name, "dim_vector": list(x.dim_vector),
                           "summands": [[y.name, k] for y, k in decompose(x)] if x.dim else []}
                          for x in res.terms],
                "syzygies": [module_to_dict(x) for x in res.syzygies]}
        value = UNDECIDED if res.flag.kind == "truncated" else TRUE
        return self._record("resolve", body, value, started)

    # ===============================
    # 📊 Summary tables
    # ===============================

    def summary(self, export_csv: bool = False) -> Tuple[pd.DataFrame, pd.DataFrame]:
        """
        One row per recorded command, and counts of verdicts per command.

        Returns:
        --------
        Tuple of (results_df, by_command_df)
        """
        df = pd.DataFrame([{"command": r.command, "value": r.value, "exit_code": r.exit_code,
                            "seconds": round(r.seconds, 3), "input": r.report.get("input")}
                           for r in self.results])
        if df.empty:
            logger.warning("⚠️ No commands recorded.")
            return df, pd.DataFrame()
        by_command = df.groupby("command").agg(runs=("value", "count"),
                                               true=("value", lambda x: int((x == TRUE).sum())),
                                               false=("value", lambda x: int((x == FALSE).sum())),
                                               undecided=("value", lambda x: int((x == UNDECIDED).sum())),
                                               seconds=("seconds", "sum")).reset_index()
        if export_csv:
            self.export_summary_to_csv(df, by_command)
        return df, by_command

    def export_summary_to_csv(self, df: pd.DataFrame, by_command: Optional[pd.DataFrame] = None) -> str:
        os.makedirs(self.output_dir, exist_ok=True)
        timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
        filename = os.path.join(self.output_dir, f"workbench_results_{timestamp}.csv")
        df.to_csv(filename, index=False)
        if by_command is not None and not by_command.empty:
            by_command.to_csv(os.path.join(self.output_dir, f"workbench_summary_{timestamp}.csv"), index=False)
        logger.info(f"✅ Summary exported to: {filename}")
        return filename


COMMANDS = ("check-tilting", "perp", "enumerate", "mutate", "special-tilt", "endo", "miyashita-verify", "gldim",
            "structure-check", "resolve")
