"""Test configuration and fixtures for the deposit auction toolkit."""

import pytest

from deposit_auction.services import pooling
from deposit_auction.services.dist import ValuationDistribution
from deposit_auction.services.profiles import (
    PoolingProfile,
    SimultaneousProfile,
    SqrtSeparatingProfile,
    UniformEntryProfile,
)
from deposit_auction.services.simultaneous import solve_simultaneous


@pytest.fixture(scope="session")
def sqrt_dist():
    return ValuationDistribution.sqrt()


@pytest.fixture(scope="session")
def uniform_dist():
    return ValuationDistribution.uniform()


@pytest.fixture(scope="session")
def quadratic_dist():
    return ValuationDistribution.quadratic()


@pytest.fixture(scope="session")
def pooling_params():
    """Solved marginal types at c = 0.22."""
    return pooling.solve_marginal_types(0.22)


@pytest.fixture(scope="session")
def pooling_profile(pooling_params):
    return PoolingProfile(pooling_params)


@pytest.fixture(scope="session")
def sqrt_profile():
    return SqrtSeparatingProfile(0.15)


@pytest.fixture(scope="session")
def uniform_profile():
    return UniformEntryProfile(0.15)


@pytest.fixture(scope="session")
def quadratic_simultaneous(quadratic_dist):
    """Simultaneous equilibrium for the quadratic prior at c = 0.15."""
    return solve_simultaneous(quadratic_dist, 0.15)


@pytest.fixture(scope="session")
def sqrt_simultaneous(sqrt_dist):
    return solve_simultaneous(sqrt_dist, 0.15)


@pytest.fixture(scope="session")
def uniform_simultaneous(uniform_dist):
    return solve_simultaneous(uniform_dist, 0.15)


@pytest.fixture(scope="session")
def simultaneous_quadratic_profile(quadratic_dist):
    return SimultaneousProfile(solve_simultaneous(quadratic_dist, 0.22))


@pytest.fixture
def small_grids():
    """Verifier grid sizes that keep unit tests fast."""
    return {"type_grid": 20, "dev_grid": 100, "deposit_grid": 8}
