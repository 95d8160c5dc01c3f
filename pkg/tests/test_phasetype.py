import math

import numpy as np
import pytest

from corrph import (
    DomainError, PhaseTypeDist, RepresentationSizeError, StabilityError, ValidationError, erlang,
    exponential, hyperexponential, ph_convolve, ph_convolve_power, ph_laplace, ph_moment,
    ph_pk_supremum, ph_stationary_excess, ph_tail, point_mass_zero,
)
from corrph.numerics import laplace_invert


def test_exponential_moments_and_tail():
    d = exponential(3.0)
    assert ph_moment(d, 1) == pytest.approx(1 / 3, rel=1e-14)
    assert ph_moment(d, 2) == pytest.approx(2 / 9, rel=1e-14)
    assert ph_tail(d, 1.0) == pytest.approx(math.exp(-3.0), rel=1e-13)
    assert ph_laplace(d, 3.0) == pytest.approx(0.5, rel=1e-14)


def test_point_mass_zero():
    d = point_mass_zero()
    assert d.atom == 1.0
    assert ph_moment(d, 1) == 0.0
    assert ph_tail(d, 0.0) == 0.0
    assert ph_laplace(d, 1 + 2j) == 1.0


def test_erlang_second_moment():
    # E[X^2] = k(k+1)/rate^2 for Erlang(k, rate).
    assert ph_moment(erlang(2, 2.0), 2) == pytest.approx(1.5, rel=1e-13)
    assert ph_moment(erlang(3, 1.5), 4) == pytest.approx(3 * 4 * 5 * 6 / 1.5**4, rel=1e-12)


def test_moment_order_limits():
    with pytest.raises(DomainError):
        ph_moment(exponential(1.0), 5)


def test_tail_at_zero_is_one_minus_atom():
    d = PhaseTypeDist([0.3, 0.4], [[-2.0, 1.0], [0.5, -1.0]])
    assert d.atom == pytest.approx(0.3)
    assert ph_tail(d, 0.0) == pytest.approx(0.7, abs=1e-14)


def test_tail_rejects_negative_capital():
    with pytest.raises(DomainError):
        ph_tail(exponential(1.0), -0.1)


@pytest.mark.parametrize("init, subgen", [
    ([0.5, 0.6], [[-1.0, 0.0], [0.0, -1.0]]),  # mass above one
    ([1.0], [[0.0]]),  # zero diagonal
    ([0.5, 0.5], [[-1.0, -0.1], [0.0, -1.0]]),  # negative off-diagonal
    ([0.5, 0.5], [[-1.0, 2.0], [0.0, -1.0]]),  # positive row sum
    ([-0.1, 1.1], [[-1.0, 0.0], [0.0, -1.0]]),  # negative initial entry
])
def test_invalid_representations(init, subgen):
    with pytest.raises(ValidationError):
        PhaseTypeDist(init, subgen)


def test_singular_subgenerator_rejected():
    # Row sums zero: absorption never happens.
    with pytest.raises(ValidationError):
        PhaseTypeDist([1.0, 0.0], [[-1.0, 1.0], [1.0, -1.0]])


def test_immutable():
    d = exponential(2.0)
    with pytest.raises(AttributeError):
        d.atom = 0.5
    with pytest.raises(ValueError):
        d.init[0] = 0.5


def test_convolve_with_point_mass_is_identity():
    d = exponential(2.5)
    c = ph_convolve(d, point_mass_zero())
    assert c.tail(np.array([0.3, 1.0])) == pytest.approx(d.tail(np.array([0.3, 1.0])), abs=1e-15)


def test_convolve_exponentials_gives_erlang():
    c = ph_convolve(exponential(2.0), exponential(2.0))
    assert ph_tail(c, 1.0) == pytest.approx(3.0 * math.exp(-2.0), rel=1e-13)


def test_convolve_atoms_multiply():
    a = PhaseTypeDist([0.6], [[-1.0]])
    b = PhaseTypeDist([0.25], [[-3.0]])
    c = ph_convolve(a, b)
    assert c.atom == pytest.approx(0.4 * 0.75, abs=1e-15)
    s = np.array([0.0, 0.7, 2 + 1j])
    assert np.allclose(c.laplace(s), a.laplace(s) * b.laplace(s), rtol=1e-13)


def test_convolution_power_tail_against_gamma():
    from scipy import stats
    d = ph_convolve_power(exponential(1.3), 4)
    x = np.array([0.5, 2.0, 6.0])
    assert d.tail(x) == pytest.approx(stats.gamma.sf(x, 4, scale=1 / 1.3), rel=1e-12)


def test_representation_cap():
    big = erlang(200, 1.0)
    with pytest.raises(RepresentationSizeError):
        ph_convolve(big, big)


def test_stationary_excess_of_exponential_is_itself():
    e = ph_stationary_excess(exponential(3.0))
    assert e.subgen[0, 0] == pytest.approx(-3.0, abs=1e-12)
    ee = ph_stationary_excess(e)
    assert ee.tail(np.array([0.4])) == pytest.approx(math.exp(-1.2), rel=1e-12)


def test_stationary_excess_erlang_mean():
    e = ph_stationary_excess(erlang(2, 2.0))
    assert e.mean == pytest.approx(0.75, rel=1e-13)


def test_stationary_excess_needs_positive_mean():
    with pytest.raises(DomainError):
        ph_stationary_excess(point_mass_zero())


def test_laplace_normalization_and_bound():
    d = hyperexponential([0.2, 0.8], [0.5, 4.0])
    assert ph_laplace(d, 0.0) == pytest.approx(1.0, abs=1e-15)
    s = np.array([0.1j, 1 + 5j, 3.0, 0.01 - 2j])
    assert np.all(np.abs(d.laplace(s)) <= 1 + 1e-14)
    with pytest.raises(DomainError):
        ph_laplace(d, -1.0)


def test_pk_supremum_mm1_closed_form():
    lam, nu = 1.4, 2.0
    m = ph_pk_supremum(lam, exponential(nu))
    u = np.array([0.0, 0.5, 3.0])
    assert m.tail(u) == pytest.approx(lam / nu * np.exp(-(nu - lam) * u), rel=1e-12)


def test_pk_supremum_transform():
    # Pollaczek-Khinchine: (1 - rho) / (1 - rho * excess transform).
    d = hyperexponential([0.4, 0.6], [1.0, 3.0])
    lam = 0.9
    m = ph_pk_supremum(lam, d)
    rho = lam * d.mean
    assert 1.0 - m.atom == pytest.approx(rho, abs=1e-12)
    excess = ph_stationary_excess(d)
    s = np.random.default_rng(3).uniform(0, 5, 20) + 1j * np.random.default_rng(4).normal(size=20)
    pk = (1 - rho) / (1 - rho * excess.laplace(s))
    assert np.allclose(m.laplace(s), pk, rtol=1e-10, atol=1e-12)


def test_pk_supremum_tail_by_inversion():
    d = exponential(3.0)
    lam = 0.999 * 1.5 / 1.0005
    m = ph_pk_supremum(lam, d)
    rho = lam / 3.0

    def transform(s):
        return (1 - (1 - rho) / (1 - rho * 3.0 / (s + 3.0))) / s

    assert laplace_invert(transform, 1.0) == pytest.approx(ph_tail(m, 1.0), abs=1e-9)


def test_pk_supremum_small_eps_base_models():
    # Published values at u = 0 of the two base models.
    lam = 3.0 / 2.001
    assert ph_tail(ph_pk_supremum(0.999 * lam, exponential(3.0)), 0.0) == pytest.approx(0.49925037, abs=5e-9)
    assert ph_tail(ph_pk_supremum(lam, exponential(3.0)), 0.0) == pytest.approx(0.49975012, abs=5e-9)


def test_pk_supremum_unstable():
    with pytest.raises(StabilityError):
        ph_pk_supremum(3.0, exponential(3.0))


def test_serialization_roundtrip():
    d = PhaseTypeDist([0.2, 0.5], [[-2.0, 1.0], [0.5, -1.5]])
    e = PhaseTypeDist.from_dict(d.to_dict())
    assert e.atom == d.atom
    assert np.array_equal(e.subgen, d.subgen)
    with pytest.raises(ValidationError):
        PhaseTypeDist.from_dict({"init": [1.0]})
