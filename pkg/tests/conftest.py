import numpy as np
import pytest

from helpers import BUNDLED_SCENARIO, random_scenario
from markov_opinion.intersection import intersection_example


@pytest.fixture
def intersection():
    return intersection_example()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def random_scenarios():
    rng = np.random.default_rng(7)
    return [random_scenario(rng) for _ in range(20)]


@pytest.fixture
def bundled_path():
    return BUNDLED_SCENARIO
