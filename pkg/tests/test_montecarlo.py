import math

import numpy as np
import pytest

from corrph import (
    AbateWhitt, DomainError, Empirical, Lomax, RiskModel, SimConfig, StabilityError,
    UnsupportedError, ValidationError, corrected_discard, exponential, hyperexponential,
    sample_claim, simulate_aggregate, simulate_supremum,
)
from corrph.montecarlo import PHSampler


def test_config_validation():
    with pytest.raises(ValidationError):
        SimConfig(samples=0)
    with pytest.raises(ValidationError):
        SimConfig(streams=0)
    with pytest.raises(ValidationError):
        SimConfig(seed=-1)
    gens = SimConfig(seed=1, samples=10, streams=3).generators()
    assert [n for _, n in gens] == [4, 3, 3]


def test_aggregate_mean_within_three_sigma():
    m = RiskModel(1.0, 0.05, hyperexponential([0.4, 0.6], [1.0, 3.0]), Lomax(1.0, 3.0))
    t = 5.0
    sim = simulate_aggregate(m, t, SimConfig(seed=3, samples=200_000))
    want = m.lam * t * m.mean_claim
    b2 = 0.4 * 2 / 1.0**2 + 0.6 * 2 / 3.0**2
    c2 = 1.0  # 2 scale^2 / ((shape - 1)(shape - 2))
    sd = math.sqrt(m.lam * t * ((1 - m.eps) * b2 + m.eps * c2) / sim.n)
    assert abs(sim.samples.mean() - want) < 3 * sd


def test_aggregate_all_heavy_and_empty():
    m = RiskModel(1.0, 1.0, exponential(1.0), Lomax(1.0, 3.0))
    sim = simulate_aggregate(m, 2.0, SimConfig(seed=5, samples=100_000))
    assert abs(sim.samples.mean() - 2.0 * 0.5) < 0.02
    assert np.all(simulate_aggregate(m, 0.0, SimConfig(samples=1000)).samples == 0.0)
    with pytest.raises(DomainError):
        simulate_aggregate(m, -1.0)


def test_phase_sampler_matches_law():
    d = hyperexponential([0.25, 0.75], [0.5, 4.0])
    rng = np.random.default_rng(11)
    draws = PHSampler(d).sums(rng, np.ones(200_000, dtype=np.int64))
    for x in (0.1, 1.0, 4.0):
        p = float(d.tail(x))
        assert abs(np.mean(draws > x) - p) < 4 * math.sqrt(p * (1 - p) / draws.size)


def test_supremum_of_exponential_model():
    lam, mu = 0.6, 1.0
    m = RiskModel(lam, 0.0, exponential(mu), Lomax(1.0, 2.0))
    sim = simulate_supremum(m, SimConfig(seed=7, samples=300_000))
    assert abs(sim.tail(0.0) - 0.6) < 4 * sim.tail_sigma(0.0)
    for u in (1.0, 3.0, 6.0):
        want = lam / mu * math.exp(-(mu - lam) * u)
        assert abs(sim.tail(u) - want) < 4 * math.sqrt(want * (1 - want) / sim.n)


@pytest.mark.slow
def test_supremum_within_corrected_sandwich():
    m = RiskModel.from_load(0.7, 0.1, exponential(3.0), Lomax(1.0, 3.0))
    sim = simulate_supremum(m, SimConfig(seed=9, samples=1_000_000))
    for u in (0.5, 1.0, 2.0, 5.0, 10.0):
        lo = corrected_discard(m, u)
        slack = 4 * sim.tail_sigma(u)
        assert lo - slack <= sim.tail(u) <= lo + m.p_eps**2 + slack


def test_unstable_supremum():
    m = RiskModel(3.0, 0.0, exponential(2.0), Lomax(1.0, 2.0))
    with pytest.raises(StabilityError):
        simulate_supremum(m)


def test_determinism(lomax_model):
    cfg = SimConfig(seed=42, samples=50_000, streams=4)
    a = simulate_aggregate(lomax_model, 3.0, cfg)
    b = simulate_aggregate(lomax_model, 3.0, cfg)
    assert np.array_equal(a.samples, b.samples)
    c = simulate_aggregate(lomax_model, 3.0, SimConfig(seed=43, samples=50_000, streams=4))
    assert not np.array_equal(a.samples, c.samples)
    m = RiskModel.from_load(0.5, 0.1, hyperexponential([0.5, 0.5], [1.0, 2.0]), Lomax(1.0, 2.5))
    assert np.array_equal(simulate_supremum(m, cfg).samples, simulate_supremum(m, cfg).samples)


def test_sample_claim_mixture(lomax_model):
    rng = np.random.default_rng(1)
    assert isinstance(sample_claim(lomax_model, rng), float)
    x = sample_claim(lomax_model, rng, size=(100, 3))
    assert x.shape == (100, 3) and np.all(x >= 0)


def test_empirical_statistics():
    emp = Empirical(np.arange(1.0, 101.0), SimConfig(samples=100))
    assert emp.tail(50.0) == pytest.approx(0.5)
    assert emp.quantile(0.99) == 99.0
    assert emp.quantile(0.5) == 50.0
    lo, hi = emp.tail_ci(50.0)
    assert lo < 0.5 < hi
    lo, hi = emp.quantile_ci(0.5)
    assert lo <= 50.0 <= hi
    with pytest.raises(DomainError):
        emp.quantile(1.0)


@pytest.mark.slow
def test_interval_coverage():
    """Nominal 95% intervals cover the true exponential tail and quantile."""
    rng = np.random.default_rng(2024)
    x, p = 2.0, 0.9
    true_tail, true_q = math.exp(-x), math.log(10)
    cover_t = cover_q = 0
    reps = 50
    for _ in range(reps):
        emp = Empirical(rng.exponential(size=2000), SimConfig(samples=2000))
        lo, hi = emp.tail_ci(x)
        cover_t += lo <= true_tail <= hi
        lo, hi = emp.quantile_ci(p)
        cover_q += lo <= true_q <= hi
    assert cover_t >= 0.9 * reps
    assert cover_q >= 0.9 * reps


def test_abate_whitt_sampling_is_refused():
    m = RiskModel.from_load(0.5, 0.1, exponential(3.0), AbateWhitt(2.0))
    with pytest.raises(UnsupportedError):
        simulate_supremum(m, SimConfig(samples=1000))
