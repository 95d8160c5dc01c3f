import math

import mpmath as mp
import numpy as np
import pytest

from corrph import (
    AbateWhitt, DomainError, Lomax, ParameterError, UnsupportedError, ValidationError,
    heavy_from_dict, ht_excess_tail, ht_laplace, ht_sample_excess, ht_tail,
)
from corrph.numerics import conv_tail, laplace_invert, talbot_invert, zeta
from corrph.numerics.quadrature import conv_tail_multi
from corrph.phasetype import point_mass_zero

# zeta(x) = exp(x) erfc(sqrt(x)) at 30 digits (mpmath).
ZETA_1 = 0.427583576155807
ZETA_4 = 0.25539567631050574


def test_abate_whitt_transform_values():
    aw = AbateWhitt(2.0)
    c, ce = ht_laplace(aw, 0.0)
    assert (c, ce) == (1.0, 1.0)
    c, ce = ht_laplace(aw, 1.0)
    assert c == pytest.approx(5 / 6, rel=1e-15)
    assert ce == pytest.approx(2 / 6, rel=1e-15)


def test_abate_whitt_mu_one_rejected():
    with pytest.raises(ParameterError):
        AbateWhitt(1.0)


def test_abate_whitt_closed_forms():
    aw = AbateWhitt(2.0)
    assert ht_tail(aw, 0.0) == pytest.approx(1.0, abs=1e-15)
    assert ht_tail(aw, 1.0) == pytest.approx(2 * ZETA_4 - ZETA_1, rel=1e-13)
    assert ht_excess_tail(aw, 1.0) == pytest.approx(2 * ZETA_1 - ZETA_4, rel=1e-13)
    assert aw.mean == 0.5


@pytest.mark.parametrize("mu", [0.5, 2.0, 3.5])
@pytest.mark.parametrize("u", [0.5, 1.0, 2.0, 5.0, 10.0])
def test_abate_whitt_tails_match_inversion(mu, u):
    aw = AbateWhitt(mu)
    tail = laplace_invert(lambda s: (1 - aw.laplace(s)[0]) / s, u)
    excess = laplace_invert(lambda s: (1 - aw.laplace(s)[1]) / s, u)
    assert aw.tail(u) == pytest.approx(tail, abs=1e-8)
    assert aw.excess_tail(u) == pytest.approx(excess, abs=1e-8)


def test_abate_whitt_density_integrates_tail():
    from scipy.integrate import quad
    aw = AbateWhitt(2.0)
    for u in (0.3, 2.0):
        mass = quad(aw.pdf, u, np.inf, limit=200)[0]
        assert mass == pytest.approx(aw.tail(u), rel=1e-8)


def test_abate_whitt_sampling_unsupported():
    rng = np.random.default_rng(0)
    with pytest.raises(UnsupportedError):
        ht_sample_excess(AbateWhitt(2.0), rng, 10)


def test_lomax_tails():
    lx = Lomax(1.0, 2.0)
    assert ht_tail(lx, 1.0) == 0.25
    assert ht_excess_tail(lx, 3.0) == 0.25
    assert lx.mean == 1.0
    with pytest.raises(DomainError):
        lx.tail(-1.0)


@pytest.mark.parametrize("s", [1.0, 3 - 1j, 0.5 + 2j, 1e-3, 5j, 1e-9 + 20j, 0.3j, -1 + 1j, -3 + 0.5j, -10 + 3j])
def test_lomax_transform_against_exponential_integral(s):
    # int exp(-s x) dF = shape * exp(s) E_{shape+1}(s) for scale 1.
    mp.mp.dps = 30
    c_ref = complex(2 * mp.e**s * mp.expint(3, s))
    ce_ref = complex(mp.e**s * mp.expint(2, s))
    c, ce = Lomax(1.0, 2.0).laplace(s)
    assert abs(c - c_ref) <= 1e-10 * abs(c_ref)
    assert abs(ce - ce_ref) <= 1e-10 * abs(ce_ref)


def test_lomax_transform_branch_cut():
    with pytest.raises(DomainError):
        Lomax(1.0, 2.0).laplace(-1.0)


def test_lomax_transform_with_scale():
    # Scale enters as s -> s * scale.
    a, b = Lomax(2.5, 3.0).laplace(0.4 + 1j), Lomax(1.0, 3.0).laplace((0.4 + 1j) * 2.5)
    assert a == pytest.approx(b, rel=1e-14)


def test_lomax_tail_by_inversion():
    lx = Lomax(1.0, 2.5)
    for u in (0.5, 1.0, 2.0, 5.0, 10.0):
        got = talbot_invert(lambda s: (1 - lx.laplace(s)[0]) / s, u)
        assert got == pytest.approx(lx.tail(u), abs=1e-7)


def test_lomax_inverse_tail_maps():
    lx = Lomax(1.0, 2.0)
    assert lx.excess_inverse_tail(0.25) == pytest.approx(3.0, rel=1e-15)
    assert lx.excess_inverse_tail(1.0) == 0.0


def test_lomax_excess_sampler_tail():
    rng = np.random.default_rng(11)
    n = 1_000_000
    draws = ht_sample_excess(Lomax(1.0, 2.0), rng, n)
    p = np.mean(draws > 9.0)
    sigma = math.sqrt(0.1 * 0.9 / n)
    assert abs(p - 0.1) < 3 * sigma


def test_lomax_two_fold_subexponential_ratio():
    lx = Lomax(1.0, 2.0)
    u = 200.0
    two = conv_tail_multi(point_mass_zero(), lx.claim_law(), 2, u)
    assert 1.8 <= two / lx.tail(u) <= 2.2


def test_single_heavy_convolution_is_identity():
    lx = Lomax(1.0, 2.0)
    assert conv_tail(point_mass_zero(), lx.tail, 3.0) == pytest.approx(lx.tail(3.0), abs=1e-15)


@pytest.mark.parametrize("h", [AbateWhitt(0.4), AbateWhitt(2.0), Lomax(0.5, 1.5), Lomax(2.0, 4.0)])
def test_tails_monotone_on_grid(h):
    u = np.concatenate([[0.0], np.geomspace(1e-6, 1e6, 199)])
    for f in (h.tail, h.excess_tail):
        v = f(u)
        assert v[0] == pytest.approx(1.0, abs=1e-14)
        assert np.all((v >= 0) & (v <= 1))
        assert np.all(np.diff(v) <= 0)


def test_zeta_used_by_tails_is_scaled():
    # Large arguments must not overflow.
    aw = AbateWhitt(3.0)
    assert np.isfinite(aw.tail(1e8)) and aw.tail(1e8) > 0
    assert zeta(1e300) > 0


def test_descriptor_roundtrip():
    for h in (AbateWhitt(2.0), Lomax(1.0, 2.0)):
        assert heavy_from_dict(h.to_dict()) == h
    with pytest.raises(ValidationError):
        heavy_from_dict({"kind": "weibull", "params": {}})
    with pytest.raises(ValidationError):
        heavy_from_dict({"kind": "lomax", "params": {"scale": 1.0}})
