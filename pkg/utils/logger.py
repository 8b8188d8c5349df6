# utils/logger.py

import logging
import sys

ROOT = "tilting_workbench"


def get_logger(name: str) -> logging.Logger:
    """Logger under the workbench namespace; diagnostics go to stderr, stdout stays JSON-only."""
    root = logging.getLogger(ROOT)
    if not root.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
        root.addHandler(handler)
        root.setLevel(logging.WARNING)
        root.propagate = False
    return logging.getLogger(f"{ROOT}.{name}")


def set_level(level: str):
    get_logger("logger")
    logging.getLogger(ROOT).setLevel(level.upper())
