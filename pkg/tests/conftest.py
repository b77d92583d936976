"""Shared fixtures and hypothesis settings."""

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from svinterp.grid import DEFAULT_GRID, LogGrid

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def grid() -> LogGrid:
    return DEFAULT_GRID


@pytest.fixture(scope="session")
def fine_grid() -> LogGrid:
    return DEFAULT_GRID.refine(2)


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
