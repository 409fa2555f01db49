"""Shared fixtures and the --runslow switch"""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))


def pytest_addoption(parser):
    parser.addoption(
        "--runslow", action="store_true", default=False, help="run long reproduction tests"
    )


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for name in ("LCDSIM_OUTPUT_DIR", "LCDSIM_DB_PATH", "LCDSIM_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
