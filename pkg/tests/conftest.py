"""
Shared fixtures
"""
from pathlib import Path

import pytest
from click.testing import CliRunner
from loguru import logger

from stabilab.schemas import LossSpec, StackelbergModel, Transmission

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS_DIR = ROOT / "scenarios"
TAYLOR_DATA = ROOT / "data" / "taylor_synthetic.csv"


@pytest.fixture
def stable_tr() -> Transmission:
    """A = 0.8, B = -0.5: stationary under a peg"""
    return Transmission(a=0.8, b=-0.5)


@pytest.fixture
def explosive_tr() -> Transmission:
    """A = 1.2, B = -0.5: a peg is explosive"""
    return Transmission(a=1.2, b=-0.5)


@pytest.fixture
def unit_loss() -> LossSpec:
    return LossSpec(q=1.0, r=1.0, beta=1.0)


@pytest.fixture
def canonical_model() -> StackelbergModel:
    return StackelbergModel()


@pytest.fixture
def canonical_loss() -> LossSpec:
    return LossSpec(q=1.0, r=1.0, beta=0.99)


@pytest.fixture
def runner():
    yield CliRunner()
    # the command points loguru at the runner's stderr, which is gone afterwards
    logger.remove()


@pytest.fixture
def scenarios_dir() -> Path:
    return SCENARIOS_DIR


@pytest.fixture
def taylor_data() -> Path:
    return TAYLOR_DATA
