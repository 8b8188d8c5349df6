# tests/test_config.py

import pytest

from app_config import ConfigError, WorkbenchConfig, settings, use_config


def test_default_yaml_matches_the_dataclass_defaults():
    assert WorkbenchConfig.from_yaml() == WorkbenchConfig()


def test_yaml_overrides(tmp_path):
    path = tmp_path / "config.yml"
    path.write_text("cutoff: 5\njobs: 2\nexhaustive_fallback: true\n")
    config = WorkbenchConfig.from_yaml(str(path))
    assert config.cutoff == 5
    assert config.jobs == 2
    assert config.exhaustive_fallback is True
    assert config.n_max == WorkbenchConfig().n_max


def test_empty_yaml_gives_defaults(tmp_path):
    path = tmp_path / "empty.yml"
    path.write_text("")
    assert WorkbenchConfig.from_yaml(str(path)) == WorkbenchConfig()


def test_unknown_keys_are_rejected(tmp_path):
    path = tmp_path / "bad.yml"
    path.write_text("cutof: 5\n")
    with pytest.raises(ConfigError, match="cutof"):
        WorkbenchConfig.from_yaml(str(path))


@pytest.mark.parametrize("overrides", [{"cutoff": -1}, {"jobs": 0}, {"n_max": -2}, {"iso_budget": 0}])
def test_validation(overrides):
    with pytest.raises(ConfigError):
        WorkbenchConfig().with_overrides(**overrides)


def test_none_overrides_are_ignored():
    config = WorkbenchConfig().with_overrides(cutoff=None, jobs=3)
    assert config.cutoff == 20
    assert config.jobs == 3


def test_use_config_restores_the_previous_settings():
    before = settings()
    with use_config(WorkbenchConfig(cutoff=7)) as active:
        assert settings() is active
        assert settings().cutoff == 7
    assert settings() is before
    with use_config(None) as same:
        assert same is before
