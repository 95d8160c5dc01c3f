"""Seeded property suite behind ``corrph check``.

Every check draws random admissible inputs from one master seed, evaluates
an identity or inequality and counts violations. No expected values are
stored here; the properties hold for every admissible input.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import quad

from . import kernels
from .aggregate import CompoundPoissonPH
from .exact import exact_ruin, solve_exact
from .heavy import AbateWhitt, Lomax
from .montecarlo import SimConfig, simulate_aggregate, simulate_supremum
from .numerics import euler_invert, talbot_invert
from .numerics.roots import quartic_roots
from .phasetype import (
    PhaseTypeDist, ph_convolve, ph_moment, ph_stationary_excess,
)
from .ruin import (
    RiskModel, check_conditions, corrected_discard, corrected_replace, exponential_abate_whitt,
)


@dataclass
class CheckResult:
    name: str
    cases: int = 0
    violations: list[str] = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.violations

    def expect(self, cond: bool, message: str):
        self.cases += 1
        if not cond:
            self.violations.append(message)


def random_ph(rng: np.random.Generator, max_phases: int = 4, atom: bool = False) -> PhaseTypeDist:
    """Random phase-type law with a dense sub-generator."""
    n = int(rng.integers(1, max_phases + 1))
    init = rng.dirichlet(np.ones(n))
    mass = rng.uniform(0.5, 1.0) if atom else 1.0
    rates = rng.uniform(0.5, 5.0, n)
    jumps = rng.dirichlet(np.ones(n + 1), n)  # last column is absorption
    np.fill_diagonal(jumps[:, :n], 0.0)
    jumps /= jumps.sum(axis=1, keepdims=True)
    jumps[:, n] = np.maximum(jumps[:, n], 0.05)
    jumps /= jumps.sum(axis=1, keepdims=True)
    subgen = rates[:, None] * jumps[:, :n]
    np.fill_diagonal(subgen, -rates)
    return PhaseTypeDist(init * mass, subgen, 1.0 - mass if atom else 0.0)


def random_heavy(rng: np.random.Generator):
    if rng.random() < 0.5:
        mu = rng.uniform(0.3, 4.0)
        return AbateWhitt(mu if abs(mu - 1.0) > 0.05 else 1.5)
    return Lomax(rng.uniform(0.3, 3.0), rng.uniform(1.2, 4.0))


def _grid():
    return np.array([0.0, 0.05, 0.3, 1.0, 2.5, 7.0, 20.0])


def check_ph_algebra(rng, n_cases):
    res = CheckResult("ph_algebra")
    s = np.array([0.3, 1.0 + 0.5j, 4.0 - 2.0j])
    for _ in range(n_cases):
        a, b = random_ph(rng, atom=True), random_ph(rng)
        c = ph_convolve(a, b)
        res.expect(np.allclose(c.laplace(s), a.laplace(s) * b.laplace(s), rtol=1e-10, atol=1e-13),
                   "transform of a convolution is not the product")
        res.expect(abs(c.mean - a.mean - b.mean) <= 1e-10 * c.mean, "convolution mean is not additive")
        t = a.tail(_grid())
        res.expect(abs(t[0] - (1.0 - a.atom)) <= 1e-12, "tail at 0 differs from 1 - atom")
        res.expect(bool(np.all(np.diff(t) <= 1e-14)), "phase-type tail increases")
        res.expect(bool(np.all(a.pdf(_grid()[1:]) >= -1e-14)), "negative density")
    return res


def check_heavy_monotone(rng, n_cases):
    res = CheckResult("heavy_monotone")
    u = np.concatenate([[0.0], np.geomspace(1e-4, 1e4, 40)])
    for _ in range(n_cases):
        h = random_heavy(rng)
        for name, f in (("tail", h.tail), ("excess_tail", h.excess_tail)):
            v = np.asarray(f(u))
            res.expect(abs(v[0] - 1.0) <= 1e-12, f"{h}: {name}(0) != 1")
            res.expect(bool(np.all((v >= 0) & (v <= 1 + 1e-12))), f"{h}: {name} outside [0, 1]")
            res.expect(bool(np.all(np.diff(v) <= 1e-14)), f"{h}: {name} increases")
    return res


def check_excess_mean(rng, n_cases):
    """Excess density equals tail / mean, and the excess mean is ``E[X^2] / (2 E[X])``."""
    res = CheckResult("excess_mean")
    u = np.geomspace(1e-3, 1e3, 25)
    for _ in range(n_cases):
        h = random_heavy(rng)
        lhs, rhs = h.excess_pdf(u), h.tail(u) / h.mean
        res.expect(np.allclose(lhs, rhs, rtol=1e-10, atol=0), f"{h}: excess density != tail / mean")
        d = random_ph(rng)
        e = ph_stationary_excess(d)
        res.expect(abs(e.mean - ph_moment(d, 2) / (2 * d.mean)) <= 1e-10 * e.mean,
                   "phase-type excess mean identity fails")
        res.expect(np.allclose(e.pdf(u[:10]), d.tail(u[:10]) / d.mean, rtol=1e-9, atol=1e-15),
                   "phase-type excess density != tail / mean")
        if isinstance(h, Lomax) and h.shape > 2.2:
            got = quad(h.excess_tail, 0.0, np.inf, limit=200)[0]
            want = h.scale / (h.shape - 2.0)  # E[X^2] / (2 E[X])
            res.expect(abs(got - want) <= 1e-7 * want, f"{h}: excess mean {got} != {want}")
    return res


def _random_model(rng) -> RiskModel:
    for _ in range(100):
        eps = float(rng.uniform(0.0, 0.1))
        rho = float(rng.uniform(0.1, 0.9))
        if rng.random() < 0.5:
            mu = float(rng.choice([0.5, 2.0, 3.0]))
            m = exponential_abate_whitt(mu, float(rng.uniform(1.0, 4.0)), eps, rho=rho)
        else:
            m = RiskModel.from_load(rho, eps, random_ph(rng, 3), Lomax(1.0, float(rng.uniform(1.5, 3.0))))
        if check_conditions(m).all_pass:
            return m
    raise RuntimeError("no admissible model drawn")


def check_corrected_at_zero(rng, n_cases):
    res = CheckResult("corrected_at_zero")
    for _ in range(n_cases):
        m = _random_model(rng)
        for name, f in (("corrected_discard", corrected_discard), ("corrected_replace", corrected_replace)):
            v = f(m, 0.0)
            res.expect(abs(v - m.rho) <= 1e-9, f"{name}(0) = {v:.12g} but rho = {m.rho:.12g}")
    return res


def check_sandwich(rng, n_cases):
    """``0 <= exact - corrected_discard <= p_eps^2`` where a closed form exists."""
    res = CheckResult("discard_sandwich")
    u = np.array([0.5, 2.0, 8.0])
    for _ in range(n_cases):
        mu = float(rng.choice([0.5, 2.0, 3.0]))
        nu, eps, rho = rng.uniform(1.0, 4.0), rng.uniform(0.01, 0.1), rng.uniform(0.3, 0.9)
        m = exponential_abate_whitt(mu, nu, eps, rho=rho)
        if not check_conditions(m).all_pass:
            continue
        gap = exact_ruin(solve_exact(mu, nu, m.lam, eps), u) - corrected_discard(m, u)
        res.expect(bool(np.all(gap >= -1e-8)), f"exact below corrected_discard for {m}")
        res.expect(bool(np.all(gap <= m.p_eps**2 + 1e-8)), f"gap above p_eps^2 for {m}")
    return res


def check_inversion(rng, n_cases):
    res = CheckResult("inversion_agreement")
    for _ in range(n_cases):
        d = random_ph(rng, 3)
        agg = CompoundPoissonPH(float(rng.uniform(0.5, 5.0)), d)
        for x in (0.5, 2.0, 6.0):
            tr = lambda s: (1.0 - agg.laplace(s)) / s
            a, b = euler_invert(tr, x), talbot_invert(tr, x)
            res.expect(abs(a - b) <= 1e-8, f"Euler {a:.12g} vs Talbot {b:.12g} at x={x}")
    return res


def check_quartic(rng, n_cases):
    res = CheckResult("quartic_residuals")
    for _ in range(n_cases * 20):
        c = rng.normal(size=5)
        c[0] = 1.0
        try:
            quartic_roots(*c)
        except ArithmeticError as exc:
            res.expect(False, f"coefficients {c.tolist()}: {exc}")
        else:
            res.expect(True, "")
    return res


def check_faddeeva_symmetry(rng, n_cases):
    """``w(-z) = 2 exp(-z^2) - w(z)`` and ``w(conj(-z)) = conj(w(z))``."""
    res = CheckResult("faddeeva_symmetry")
    z = rng.normal(scale=3.0, size=n_cases * 20) + 1j * rng.normal(scale=3.0, size=n_cases * 20)
    z = z[np.abs(z.imag) < 4.0]
    w, wm = kernels.faddeeva(z), kernels.faddeeva(-z)
    scale = np.maximum(np.abs(w), 1.0) + np.abs(2 * np.exp(-z * z))
    bad = np.abs(wm - (2 * np.exp(-z * z) - w)) > 1e-12 * scale
    res.cases += z.size
    res.violations += [f"reflection fails at {zz}" for zz in z[bad]]
    bad = np.abs(kernels.faddeeva(np.conj(-z)) - np.conj(w)) > 1e-13 * np.maximum(np.abs(w), 1e-300)
    res.cases += z.size
    res.violations += [f"conjugation fails at {zz}" for zz in z[bad]]
    return res


def check_determinism(rng, n_cases):
    res = CheckResult("simulation_determinism")
    for _ in range(max(1, n_cases // 10)):
        m = RiskModel.from_load(float(rng.uniform(0.2, 0.8)), 0.05, random_ph(rng, 3), Lomax(1.0, 2.5))
        cfg = SimConfig(seed=int(rng.integers(2**63)), samples=20_000, streams=int(rng.integers(1, 6)))
        a, b = simulate_aggregate(m, 2.0, cfg), simulate_aggregate(m, 2.0, cfg)
        res.expect(np.array_equal(a.samples, b.samples), "aggregate simulation not reproducible")
        a, b = simulate_supremum(m, cfg), simulate_supremum(m, cfg)
        res.expect(np.array_equal(a.samples, b.samples), "supremum simulation not reproducible")
    return res


CHECKS = {
    "ph_algebra": check_ph_algebra,
    "heavy_monotone": check_heavy_monotone,
    "excess_mean": check_excess_mean,
    "corrected_at_zero": check_corrected_at_zero,
    "discard_sandwich": check_sandwich,
    "inversion_agreement": check_inversion,
    "quartic_residuals": check_quartic,
    "faddeeva_symmetry": check_faddeeva_symmetry,
    "simulation_determinism": check_determinism,
}


def run_checks(seed: int = 12345, cases: int = 50, names=None) -> list[CheckResult]:
    """Run the named checks (all by default), each from its own child seed."""
    names = list(CHECKS) if names is None else list(names)
    children = np.random.SeedSequence(seed).spawn(len(CHECKS))
    seeds = dict(zip(CHECKS, children))
    out = []
    for name in names:
        start = time.perf_counter()
        res = CHECKS[name](np.random.default_rng(seeds[name]), cases)
        res.seconds = time.perf_counter() - start
        out.append(res)
    return out


__all__ = ["CHECKS", "CheckResult", "random_heavy", "random_ph", "run_checks"]
