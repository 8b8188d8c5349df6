# app_config/app_config.py

from contextlib import contextmanager
from dataclasses import dataclass, fields, replace
from typing import Iterator, Optional
import yaml
import os

from engine.errors import ConfigError


@dataclass(frozen=True)
class WorkbenchConfig:
    # Resolutions
    cutoff: int = 20
    max_path_length: int = 16

    # Search budgets
    enumeration_budget: int = 10_000_000
    iso_budget: int = 100_000
    decomposition_budget: int = 20_000
    extension_budget: int = 100_000

    # Tilting
    n_max: int = 4
    widen_search: bool = False
    exhaustive_fallback: bool = False
    fallback_depth: int = 2

    # Execution
    jobs: int = 1
    progress: bool = False
    log_level: str = "WARNING"
    output_dir: str = "workbench_results"

    @classmethod
    def from_yaml(cls, filepath: str = None):
        """
        Loads config from a YAML file. Default path is ./app_config/workbench.yml.
        """
        if filepath is None:
            filepath = os.path.join(os.path.dirname(__file__), 'workbench.yml')

        with open(filepath, 'r') as file:
            config_dict = yaml.safe_load(file) or {}

        known = {f.name for f in fields(cls)}
        unknown = sorted(set(config_dict) - known)
        if unknown:
            raise ConfigError(f"unknown config keys in {filepath}: {', '.join(unknown)}")

        config = cls(**config_dict)
        config.validate()
        return config

    def with_overrides(self, **overrides) -> "WorkbenchConfig":
        """Copy with every non-None override applied (CLI flags land here)."""
        changes = {k: v for k, v in overrides.items() if v is not None}
        config = replace(self, **changes)
        config.validate()
        return config

    def validate(self):
        if self.cutoff < 0:
            raise ConfigError("cutoff must be non-negative")
        if self.jobs < 1:
            raise ConfigError("jobs must be at least 1")
        if self.n_max < 0:
            raise ConfigError("n_max must be non-negative")
        for name in ("enumeration_budget", "iso_budget", "decomposition_budget", "extension_budget"):
            if getattr(self, name) <= 0:
                raise ConfigError(f"{name} must be positive")


_active: WorkbenchConfig = WorkbenchConfig()


def settings() -> WorkbenchConfig:
    """The configuration the math layer reads its budgets from."""
    return _active


@contextmanager
def use_config(config: Optional[WorkbenchConfig]) -> Iterator[WorkbenchConfig]:
    global _active
    previous = _active
    _active = config if config is not None else previous
    try:
        yield _active
    finally:
        _active = previous
