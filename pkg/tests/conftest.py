import numpy as np
import pytest

from vrmulticast import ChannelState, GridConfig, ScenarioConfig


@pytest.fixture
def scenario():
    return ScenarioConfig()


@pytest.fixture
def grid():
    return GridConfig()


@pytest.fixture
def small_grid():
    return GridConfig(n_h=8, n_v=2, v_h=10, v_v=5)


def random_instance(rng, max_groups=4):
    """Random tile counts and weakest channels in the ranges used by the acceptance suite."""
    n = int(rng.integers(1, max_groups + 1))
    counts = [int(c) for c in rng.integers(1, 101, size=n)]
    h_mins = [float(h) for h in 10.0 ** rng.uniform(-8, -5, size=n)]
    return counts, h_mins


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def channels(*powers):
    return ChannelState.of(powers)
