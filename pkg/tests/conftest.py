import pytest

from shiftlab.panel import bernoulli_system, cycle4_system, golden_mean_system


@pytest.fixture(scope="session")
def bernoulli():
    return bernoulli_system()


@pytest.fixture(scope="session")
def golden():
    return golden_mean_system()


@pytest.fixture(scope="session")
def cycle4():
    return cycle4_system()


@pytest.fixture(scope="session")
def systems(bernoulli, golden, cycle4):
    return (bernoulli, golden, cycle4)
