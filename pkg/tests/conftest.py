import numpy as np
import pytest

from corrph import Lomax, RiskModel, exponential, exponential_abate_whitt, lambda_for_rho, solve_exact

# Exponential(3) plus Abate-Whitt(2) claims, eps = 0.001, load 0.5.
SMALL_EPS = dict(mu=2.0, nu=3.0, eps=0.001, rho=0.5)


@pytest.fixture(scope="session")
def small_eps_model():
    p = SMALL_EPS
    return exponential_abate_whitt(p["mu"], p["nu"], p["eps"], rho=p["rho"])


@pytest.fixture(scope="session")
def small_eps_exact():
    p = SMALL_EPS
    lam = lambda_for_rho(p["mu"], p["nu"], p["eps"], p["rho"])
    return solve_exact(p["mu"], p["nu"], lam, p["eps"])


@pytest.fixture(scope="session")
def lomax_model():
    """Exponential(3/2) plus Lomax(1, 2) claims at unit arrival rate, eps = 0.01."""
    return RiskModel(1.0, 0.01, exponential(1.5), Lomax(1.0, 2.0))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
