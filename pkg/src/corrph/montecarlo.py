"""Monte Carlo estimates of aggregate losses and of the all-time supremum.

Randomness comes from numpy's counter-based Philox generator. A master
``SeedSequence`` is split into one child per stream; stream ``i`` produces a
fixed slice of the samples and slices are concatenated by stream index, so
results depend only on ``(seed, samples, streams)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import stats

from . import kernels
from .errors import DomainError, StabilityError, ValidationError
from .phasetype import PhaseTypeDist
from .ruin import RiskModel


@dataclass(frozen=True)
class SimConfig:
    seed: int = 20240601
    samples: int = 1_000_000
    streams: int = 8

    def __post_init__(self):
        if self.samples < 1:
            raise ValidationError("samples must be >= 1")
        if self.streams < 1:
            raise ValidationError("streams must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValidationError("seed must be a 64-bit unsigned integer")

    def generators(self):
        """``(Generator, count)`` per stream, in stream order."""
        children = np.random.SeedSequence(self.seed).spawn(self.streams)
        base, extra = divmod(self.samples, self.streams)
        return [(np.random.Generator(np.random.Philox(c)), base + (i < extra))
                for i, c in enumerate(children)]

    def to_dict(self):
        return {"seed": self.seed, "samples": self.samples, "streams": self.streams}


# -- phase-type sampling -----------------------------------------------------------

class PHSampler:
    """Encodes a phase-type law for the compiled jump-chain walker."""

    def __init__(self, d: PhaseTypeDist):
        self.dist = d
        n = d.n_phases
        self.rates = np.ascontiguousarray(-np.diag(d.subgen)) if n else np.zeros(0)
        init = np.append(d.init, d.atom)
        self.init_cum = np.ascontiguousarray(np.cumsum(init))
        self.init_cum[-1] = 1.0
        jump = np.zeros((n, n + 1))
        if n:
            jump[:, :n] = d.subgen / self.rates[:, None]
            np.fill_diagonal(jump[:, :n], 0.0)
            jump[:, n] = d.exit / self.rates
            jump = np.cumsum(jump, axis=1)
            jump[:, -1] = 1.0
        self.jump_cum = np.ascontiguousarray(jump)
        self._exp_rate = float(self.rates[0]) if n == 1 and d.atom == 0.0 else None

    def sums(self, rng: np.random.Generator, counts) -> np.ndarray:
        """One draw of ``B_1 + ... + B_k`` for each ``k`` in ``counts``."""
        counts = np.ascontiguousarray(counts, dtype=np.int64)
        if self.dist.n_phases == 0:
            return np.zeros(counts.size)
        if self._exp_rate is not None:
            # Sum of k exponentials is Gamma(k).
            out = np.zeros(counts.size)
            pos = counts > 0
            out[pos] = rng.standard_gamma(counts[pos]) / self._exp_rate
            return out
        return kernels.ph_sums(rng.bit_generator, counts, self.init_cum, self.jump_cum, self.rates)


def _heavy_sums(sample, rng, counts):
    counts = np.asarray(counts, dtype=np.int64)
    total = int(counts.sum())
    if total == 0:
        return np.zeros(counts.size)
    draws = sample(rng, total)
    owner = np.repeat(np.arange(counts.size), counts)
    return np.bincount(owner, weights=draws, minlength=counts.size)


def sample_claim(m: RiskModel, rng: np.random.Generator, size=None):
    """Draws from the claim mixture: phase-type w.p. ``1 - eps``, heavy w.p. ``eps``."""
    n = 1 if size is None else int(np.prod(size))
    heavy = rng.random(n) < m.eps
    out = np.empty(n)
    k = int(heavy.sum())
    if n - k:
        out[~heavy] = PHSampler(m.ph).sums(rng, np.ones(n - k, dtype=np.int64))
    if k:
        out[heavy] = m.heavy.sample(rng, k)
    return float(out[0]) if size is None else out.reshape(size)


# -- empirical laws ------------------------------------------------------------------

@dataclass(frozen=True)
class Empirical:
    """Empirical law of simulated nonnegative values."""

    samples: np.ndarray
    config: SimConfig

    @cached_property
    def sorted(self) -> np.ndarray:
        return np.sort(self.samples)

    @property
    def n(self) -> int:
        return self.samples.size

    def tail(self, x):
        """Empirical ``P(X > x)``."""
        x = np.asarray(x, dtype=float)
        out = 1.0 - np.searchsorted(self.sorted, x, side="right") / self.n
        return float(out) if out.ndim == 0 else out

    def tail_ci(self, x: float, level: float = 0.95) -> tuple[float, float]:
        """Clopper-Pearson interval for ``P(X > x)``."""
        k = int(round(self.tail(x) * self.n))
        a = 1.0 - level
        lo = stats.beta.ppf(a / 2, k, self.n - k + 1) if k > 0 else 0.0
        hi = stats.beta.ppf(1 - a / 2, k + 1, self.n - k) if k < self.n else 1.0
        return float(lo), float(hi)

    def tail_sigma(self, x: float) -> float:
        p = self.tail(x)
        return math.sqrt(max(p * (1.0 - p), 0.0) / self.n)

    def quantile(self, p: float) -> float:
        """Order-statistic estimate ``X_(ceil(n p))``."""
        if not 0.0 < p < 1.0:
            raise DomainError("p must lie in (0, 1)")
        idx = min(max(math.ceil(self.n * p) - 1, 0), self.n - 1)
        return float(self.sorted[idx])

    def quantile_ci(self, p: float, level: float = 0.95) -> tuple[float, float]:
        """Distribution-free interval from binomial order-statistic ranks."""
        if not 0.0 < p < 1.0:
            raise DomainError("p must lie in (0, 1)")
        a = 1.0 - level
        lo = int(stats.binom.ppf(a / 2, self.n, p))
        hi = int(stats.binom.ppf(1 - a / 2, self.n, p)) + 1
        lo = min(max(lo, 1), self.n)
        hi = min(max(hi, 1), self.n)
        return float(self.sorted[lo - 1]), float(self.sorted[hi - 1])

    def quantiles(self, probs) -> np.ndarray:
        return np.array([self.quantile(p) for p in probs])


# -- simulations ---------------------------------------------------------------------

def simulate_aggregate(m: RiskModel, t: float, cfg: SimConfig | None = None) -> Empirical:
    """Total claims over ``[0, t]``.

    Phase-type and heavy claim counts are independent Poisson thinnings of
    the arrival stream.
    """
    cfg = cfg or SimConfig()
    if t < 0:
        raise DomainError("horizon must be >= 0")
    light = PHSampler(m.ph)
    chunks = []
    for rng, n in cfg.generators():
        n_ph = rng.poisson(m.lam * (1.0 - m.eps) * t, n)
        n_heavy = rng.poisson(m.lam * m.eps * t, n)
        total = light.sums(rng, n_ph)
        if m.eps > 0:
            total += _heavy_sums(m.heavy.sample, rng, n_heavy)
        chunks.append(total)
    return Empirical(np.concatenate(chunks), cfg)


def simulate_supremum(m: RiskModel, cfg: SimConfig | None = None) -> Empirical:
    """All-time supremum of the claim-surplus process.

    A geometric number of ladder heights, each the phase-type excess w.p.
    ``(1 - eps) delta / rho`` and the heavy excess otherwise. Its empirical
    tail estimates the ruin probability.
    """
    cfg = cfg or SimConfig()
    rho = m.rho
    if rho >= 1.0:
        raise StabilityError("supremum is infinite for rho >= 1")
    light = PHSampler(m.ph_excess)
    heavy_share = m.eps * m.theta / rho if rho > 0 else 0.0
    chunks = []
    for rng, n in cfg.generators():
        ladders = rng.geometric(1.0 - rho, n) - 1
        n_heavy = rng.binomial(ladders, heavy_share)
        total = light.sums(rng, ladders - n_heavy)
        if heavy_share > 0:
            total += _heavy_sums(m.heavy.sample_excess, rng, n_heavy)
        chunks.append(total)
    return Empirical(np.concatenate(chunks), cfg)
