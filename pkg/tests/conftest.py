import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile('wasserlab', max_examples=40, deadline=None, derandomize=True,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile('wasserlab')


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture
def e1():
    return np.array([1.0, 0.0])


@pytest.fixture
def e2():
    return np.array([0.0, 1.0])
