import numpy as np
import pytest

from aimpilot.services.config import SimulationConfig


@pytest.fixture
def sim_config() -> SimulationConfig:
    return SimulationConfig()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
