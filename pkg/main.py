# main.py

import argparse
import sys
import time
from datetime import datetime
from typing import Any, Dict, List, Optional, Sequence, Tuple

from app_config import WorkbenchConfig
from data.data_loader import DataLoader
from data.quiver_reader import ParseError, UnknownNameError
from engine.engine import COMMANDS, WorkbenchEngine
from engine.errors import BudgetExceeded, ConfigError, PreconditionError, UndecidedError
from utils.logger import get_logger, set_level
from utils.report_generator import dumps, make_report, replay_witnesses, save_report

logger = get_logger("cli")


def _names(text: Optional[str]) -> Optional[List[str]]:
    return [x.strip() for x in text.split(",") if x.strip()] if text else None


def _bound(text: Optional[str]) -> Optional[List[int]]:
    if not text:
        return None
    try:
        return [int(x) for x in text.split(",")]
    except ValueError:
        raise ValueError(f"bound must be comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tilting-workbench",
                                     description="Tilting theory over finite-dimensional algebras over F_p")
    parser.add_argument("file", help="input file: quiver with relations and module blocks")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--T", help="comma-separated module names")
    parser.add_argument("--M", help="comma-separated module names")
    parser.add_argument("--Q", help="comma-separated module names")
    parser.add_argument("--n", type=int)
    parser.add_argument("--bound", help="dimension-vector bound, e.g. 1,1,1")
    parser.add_argument("--gamma-bound", help="bound for modules over the endomorphism algebra")
    parser.add_argument("--n-max", type=int)
    parser.add_argument("--widen-search", action="store_true", default=None)
    parser.add_argument("--universe", action="store_true", help="also run the perp-category criterion")
    parser.add_argument("--module", help="module to resolve")
    parser.add_argument("--structure", choices=("abelian", "relative"), default="abelian")
    parser.add_argument("--generators", help="generators of a relative structure")
    parser.add_argument("--cutoff", type=int)
    parser.add_argument("--jobs", type=int)
    parser.add_argument("--config", help="YAML configuration file")
    parser.add_argument("--exhaustive-fallback", action="store_true", default=None)
    parser.add_argument("--verify-witness", action="store_true")
    parser.add_argument("--summary-csv", action="store_true")
    parser.add_argument("--output", help="also write the JSON report to this path")
    parser.add_argument("--verbose", action="store_true")
    return parser


def _command_kwargs(command: str, args: argparse.Namespace) -> Dict[str, Any]:
    t, m, q = _names(args.T), _names(args.M), _names(args.Q)
    bound = _bound(args.bound)

    def need(value, flag):
        if not value:
            raise ValueError(f"{command} needs {flag}")
        return value

    if command == "check-tilting":
        return {"T": need(t, "--T"), "n": args.n, "universe": args.universe, "bound": bound}
    if command == "perp":
        return {"T": need(t, "--T"), "n": args.n, "bound": bound}
    if command == "enumerate":
        return {"bound": bound, "n_max": args.n_max, "widen_search": args.widen_search}
    if command == "mutate":
        return {"T": need(t, "--T"), "M": need(m, "--M"), "bound": bound}
    if command == "special-tilt":
        return {"M": need(m, "--M"), "n": 1 if args.n is None else args.n}
    if command == "endo":
        return {"T": t, "M": m, "Q": q, "bound": _bound(args.gamma_bound)}
    if command == "miyashita-verify":
        return {"T": need(t, "--T"), "bound": bound, "gamma_bound": _bound(args.gamma_bound)}
    if command in ("gldim", "structure-check"):
        return {"bound": bound}
    if command == "resolve":
        return {"module": need(args.module, "--module")}
    raise ValueError(f"unknown command {command!r}")


def _error_report(command: str, source: str, error: Exception, value: str) -> Dict[str, Any]:
    detail = {"type": type(error).__name__, "message": str(error)}
    if isinstance(error, ParseError):
        detail["line"] = error.line
    if isinstance(error, BudgetExceeded):
        detail["budget"] = error.budget
    return make_report(command, source, {"error": detail}, value)


def run(path: str, command: str, argv: Sequence[str] = ()) -> Tuple[int, Dict[str, Any]]:
    """Run one command on one input file; returns (exit code, report)."""
    args = build_parser().parse_args([path, command, *argv])
    return _run(args)


def _run(args: argparse.Namespace) -> Tuple[int, Dict[str, Any]]:
    try:
        base = WorkbenchConfig.from_yaml(args.config) if args.config else WorkbenchConfig()
        config = base.with_overrides(cutoff=args.cutoff, jobs=args.jobs, exhaustive_fallback=args.exhaustive_fallback,
                                     widen_search=args.widen_search, n_max=args.n_max)
    except (ConfigError, OSError) as e:
        return 1, _error_report(args.command, args.file, e, "false")
    set_level("INFO" if args.verbose else config.log_level)

    try:
        workbench = DataLoader(path=args.file).load()
        engine = WorkbenchEngine(workbench, config, args.structure, _names(args.generators) or ())
        result = engine.run(args.command, **_command_kwargs(args.command, args))
    except (ParseError, UnknownNameError, PreconditionError, ValueError) as e:
        logger.error(f"❌ {e}")
        return 1, _error_report(args.command, args.file, e, "false")
    except (UndecidedError, BudgetExceeded) as e:
        logger.warning(f"⚠️ {e}")
        return 2, _error_report(args.command, args.file, e, "undecided")
    except OSError as e:
        logger.error(f"❌ {e}")
        return 1, _error_report(args.command, args.file, e, "false")

    report, code = result.report, result.exit_code
    if args.verify_witness:
        replay = replay_witnesses(report, workbench, engine.structure)
        report = {**report, "witness_replay": replay.witness}
        if not replay:
            code = max(code, 1)
    if args.summary_csv:
        engine.summary(export_csv=True)
    return code, report


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    start_time = time.time()
    logger.info(f"🟢 {args.command} started at {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
    code, report = _run(args)
    sys.stdout.write(dumps(report) + "\n")
    if args.output:
        save_report(report, args.output)
    logger.info(f"⏱ {args.command} finished in {time.time() - start_time:.2f}s with exit code {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
