# golden_transcripts.py
"""
Regenerates (or, with --check, compares against) the golden JSON transcripts
under docs/golden/ for the three fixture files.
"""

import argparse
import os
import sys
from typing import List, Tuple

from main import run
from utils.logger import get_logger
from utils.report_generator import dumps

logger = get_logger("golden")

HERE = os.path.dirname(os.path.abspath(__file__))
FIXTURES = os.path.join("data", "fixtures")
GOLDEN_DIR = os.path.join(HERE, "docs", "golden")

# (fixture, transcript name, command, arguments); every entry has a checked-in file
TRANSCRIPTS: List[Tuple[str, str, str, List[str]]] = [
    ("fix_a2.txt", "a2_mutate_not_mutable", "mutate", ["--T", "P1,S1", "--M", "P1"]),
    ("fix_a3.txt", "a3_gldim", "gldim", []),
    ("fix_a3.txt", "a3_unknown_name", "check-tilting", ["--T", "P1,X9"]),
    ("fix_dual.txt", "dual_gldim", "gldim", []),
]


def transcript(fixture: str, command: str, argv: List[str]) -> Tuple[int, str]:
    # relative input path keeps the "input" field machine-independent
    cwd = os.getcwd()
    os.chdir(HERE)
    try:
        code, report = run(os.path.join(FIXTURES, fixture), command, argv)
    finally:
        os.chdir(cwd)
    return code, dumps(report) + "\n"


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--check", action="store_true", help="compare instead of writing")
    args = parser.parse_args(argv)
    os.makedirs(GOLDEN_DIR, exist_ok=True)
    mismatches = []
    for fixture, name, command, extra in TRANSCRIPTS:
        code, text = transcript(fixture, command, extra)
        path = os.path.join(GOLDEN_DIR, f"{name}.json")
        if args.check:
            with open(path, "r", encoding="utf-8") as handle:
                if handle.read() != text:
                    mismatches.append(name)
                    logger.error(f"❌ {name} differs from {path}")
        else:
            with open(path, "w", encoding="utf-8") as handle:
                handle.write(text)
            logger.warning(f"📝 {name}: exit {code}, written to {path}")
    return 1 if mismatches else 0


if __name__ == "__main__":
    sys.exit(main())
