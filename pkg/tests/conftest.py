# tests/conftest.py

import os

import pytest

from app_config import WorkbenchConfig, use_config
from data.data_loader import DataLoader

FIXTURES = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "data", "fixtures")


def fixture_path(name: str) -> str:
    return os.path.join(FIXTURES, name)


@pytest.fixture(autouse=True)
def default_config():
    with use_config(WorkbenchConfig()) as config:
        yield config


@pytest.fixture(scope="session")
def a2():
    return DataLoader(path=fixture_path("fix_a2.txt")).load()


@pytest.fixture(scope="session")
def a3():
    return DataLoader(path=fixture_path("fix_a3.txt")).load()


@pytest.fixture(scope="session")
def dual():
    return DataLoader(path=fixture_path("fix_dual.txt")).load()


@pytest.fixture(scope="session")
def a2_universe(a2):
    return a2.universe((1, 1))


@pytest.fixture(scope="session")
def a3_universe(a3):
    return a3.universe((1, 1, 1))


@pytest.fixture(scope="session")
def dual_universe(dual):
    return dual.universe((2,))


@pytest.fixture(scope="session")
def a3_rad2():
    return DataLoader(path=fixture_path("fix_a3_rad2.txt")).load()


@pytest.fixture(scope="session")
def a3_rad2_universe(a3_rad2):
    return a3_rad2.universe((1, 1, 1))
