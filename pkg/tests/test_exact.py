import numpy as np
import pytest

from corrph import (
    ConditionError, DomainError, ParameterError, StabilityError, exact_load, exact_ruin,
    exact_transform, lambda_for_rho, solve_exact,
)
from corrph.exact import polynomial_residuals
from corrph.numerics import laplace_invert

from reference import ORACLE_RUIN, ORACLE_U

U_POINTS = ORACLE_U
MPMATH_RUIN = ORACLE_RUIN


def _solve(eps, rho, mu=2.0, nu=3.0):
    return solve_exact(mu, nu, lambda_for_rho(mu, nu, eps, rho), eps)


def test_lambda_for_rho():
    assert lambda_for_rho(2, 3, 0.001, 0.5) == pytest.approx(3 / 2.001, rel=1e-15)
    assert lambda_for_rho(2, 3, 0.0, 0.5) == pytest.approx(1.5, rel=1e-15)
    assert lambda_for_rho(2, 3, 0.1, 0.9) == pytest.approx(5.4 / 2.1, rel=1e-15)
    lam = lambda_for_rho(0.7, 2.2, 0.05, 0.63)
    assert exact_load(0.7, 2.2, lam, 0.05) == pytest.approx(0.63, rel=1e-14)
    with pytest.raises(DomainError):
        lambda_for_rho(2, 3, 0.1, 1.0)


@pytest.mark.parametrize("key", list(MPMATH_RUIN))
def test_exact_against_high_precision_inversion(key):
    sol = _solve(*key)
    assert np.max(np.abs(exact_ruin(sol, U_POINTS) - MPMATH_RUIN[key])) < 1e-12


def test_exact_published_values(small_eps_exact):
    got = exact_ruin(small_eps_exact, [0.0, 4.0, 10.0])
    assert got == pytest.approx([0.5, 0.00184042, 0.00039235], abs=1e-8)


def test_residue_identity_and_residuals(small_eps_exact):
    sol = small_eps_exact
    mu, nu, lam, eps = sol.mu, sol.nu, sol.lam, sol.eps
    target = mu + eps * (nu - mu)
    total = (mu * nu - lam * target) * np.sum(sol.residues / sol.rates)
    assert abs(total - target) < 1e-9
    assert np.all(polynomial_residuals(sol) < 1e-9)


def test_roots_and_residues_pair_up(small_eps_exact):
    r, a = small_eps_exact.roots, small_eps_exact.residues
    for z, res in zip(r, a):
        if z.imag != 0:
            k = np.argmin(np.abs(r - np.conj(z)))
            assert abs(r[k] - np.conj(z)) < 1e-12
            assert abs(a[k] - np.conj(res)) < 1e-10 * abs(res)


def test_exact_at_zero_is_load():
    for key in MPMATH_RUIN:
        sol = _solve(*key)
        assert exact_ruin(sol, 0.0) == pytest.approx(sol.rho, abs=1e-9)


def test_exact_monotone_in_unit_interval():
    sol = _solve(0.1, 0.9)
    u = np.linspace(0, 200, 401)
    v = exact_ruin(sol, u)
    assert np.all((v >= 0) & (v <= 1))
    assert np.all(np.diff(v) <= 1e-15)


def test_exact_errors():
    with pytest.raises(StabilityError):
        solve_exact(2.0, 3.0, 3.0, 0.1)
    with pytest.raises(ParameterError):
        solve_exact(1.0, 3.0, 1.0, 0.1)
    with pytest.raises(DomainError):
        exact_ruin(_solve(0.1, 0.5), -1.0)


def test_repeated_root_rejected():
    # Two real roots of the quartic merge at this load (located by root-finding
    # on the squared root gap along lam).
    with pytest.raises(ConditionError):
        solve_exact(0.7765778265540175, 0.1733077825567572, 0.3068177755099441, 0.5759960835067252)


@pytest.mark.parametrize("key", list(MPMATH_RUIN))
def test_exact_matches_euler_inversion(key):
    eps, rho = key
    sol = _solve(eps, rho)
    for u in U_POINTS:
        inv = laplace_invert(lambda s: exact_transform(2.0, 3.0, sol.lam, eps, s), u)
        assert inv == pytest.approx(exact_ruin(sol, u), abs=1e-7)
