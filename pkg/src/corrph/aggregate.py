r"""Aggregate losses over a finite horizon.

Over a horizon ``t`` the phase-type claims arrive at rate
:math:`(1-\epsilon)\lambda` and the heavy ones at rate :math:`\epsilon\lambda`,
independently. The corrected discard approximation keeps the phase-type
compound sum and adds at most one heavy claim:

.. math::

    P(L_t > x) \approx e^{-\lambda\epsilon t} P(S_t > x)
        + (1 - e^{-\lambda\epsilon t}) P(S_t + C > x),
    \qquad S_t = \sum_{i=1}^{N^P(t)} B_i.

It never exceeds the true tail and is off by at most
:math:`(\epsilon\lambda t)^2`.

The compound Poisson tail :math:`P(S_t > x)` is computed by inverting
:math:`(1 - e^{-\Lambda(1 - \hat B(s))})/s` and, independently, by summing
the Poisson mixture of convolution powers through uniformization.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import stats
from scipy.optimize import brentq

from .errors import DomainError, NumericError, ValidationError
from .heavy import HeavyTailModel
from .numerics.inversion import InversionConfig, laplace_invert, laplace_invert_checked
from .numerics.quadrature import conv_tail, conv_tail_multi
from .phasetype import PhaseTypeDist

POISSON_CUTOFF = 1e-12
CROSS_CHECK_TOL = 1e-8
VAR_TOL = 1e-6


class CompoundPoissonPH:
    """``S = B_1 + ... + B_N`` with ``N ~ Poisson(mean_count)`` and phase-type ``B_i``.

    Exposes ``atom``, ``tail`` and ``pdf`` so it can stand as the light
    summand in :func:`~corrph.numerics.quadrature.conv_tail`.

    Parameters
    ----------
    mean_count : float
        Poisson mean of the number of claims.
    claims : PhaseTypeDist
        Claim law; an atom at zero just thins the count.
    max_claims : int, optional
        Drop the Poisson mass above this count in the uniformization route
        (diagnostic; the default keeps all mass down to 1e-12).
    """

    def __init__(self, mean_count: float, claims: PhaseTypeDist, max_claims: int | None = None,
                 inversion: InversionConfig | None = None):
        if mean_count < 0:
            raise DomainError("mean claim count must be >= 0")
        self.claims = claims
        self.mean_count = float(mean_count)
        # Zero-size claims do not move the sum: thin them out.
        self._rate = self.mean_count * (1.0 - claims.atom)
        self._init = claims.init / (1.0 - claims.atom) if claims.atom < 1.0 else claims.init
        self.max_claims = max_claims
        self.inversion = inversion or InversionConfig()
        self.atom = math.exp(-self._rate)
        self._count_tail = self._build_count_tail()

    @property
    def n_phases(self) -> int:
        return self.claims.n_phases if self._rate > 0 else 0

    @property
    def mean(self) -> float:
        return self.mean_count * self.claims.mean

    def laplace(self, s):
        s = np.asarray(s, dtype=complex)
        return np.exp(-self.mean_count * (1.0 - self.claims.laplace(s)))

    def _tail_transform(self, s):
        s = np.asarray(s, dtype=complex)
        return -np.expm1(-self.mean_count * (1.0 - self.claims.laplace(s))) / s

    def _build_count_tail(self):
        if self._rate == 0:
            return np.zeros(0), np.zeros(0)
        top = int(stats.poisson.isf(POISSON_CUTOFF, self._rate)) + 2
        if self.max_claims is not None:
            top = min(top, self.max_claims)
        k = np.arange(1, top + 1)
        pmf = stats.poisson.pmf(k, self._rate)
        if self.max_claims is None:
            # P(N >= j + 1) for j = 0..top-1
            ge = stats.poisson.sf(np.arange(0, top), self._rate)
        else:
            ge = np.cumsum(pmf[::-1])[::-1]
        return ge, pmf

    # -- evaluators --------------------------------------------------------

    def tail(self, x):
        """``P(S > x)`` by numerical transform inversion (vectorized)."""
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise DomainError("x must be >= 0")
        flat = x.ravel()
        out = np.empty(flat.size)
        for i, v in enumerate(flat):
            if v == 0 or self._rate == 0:
                out[i] = 1.0 - self.atom
            else:
                out[i] = laplace_invert(self._tail_transform, v, self.inversion)
        out = np.clip(out, 0.0, 1.0 - self.atom).reshape(x.shape)
        return float(out) if out.ndim == 0 else out

    def tail_checked(self, x: float):
        """Inversion with its own method cross-check: an ``InversionResult``."""
        return laplace_invert_checked(self._tail_transform, x, self.inversion)

    def tail_truncated(self, x):
        """``P(S > x)`` from the Poisson mixture of convolution powers."""
        return self._mixture(x, "tail")

    def pdf(self, x):
        """Density of the continuous part, from the Poisson mixture."""
        return self._mixture(x, "pdf")

    def _mixture(self, x, kind):
        x = np.asarray(x, dtype=float)
        flat = np.maximum(x.ravel(), 0.0)
        ge, pmf = self._count_tail
        if ge.size == 0:
            out = np.zeros(flat.size)
        else:
            occ = _renewal_counts(self.claims.subgen, self._init, self.claims.exit, flat, ge.size, kind)
            out = occ @ (ge if kind == "tail" else pmf)
            if kind == "tail":
                out = np.where(flat == 0, 1.0 - self.atom, out)
        out = np.where(x.ravel() < 0, 0.0, np.maximum(out, 0.0)).reshape(x.shape)
        return float(out) if out.ndim == 0 else out


def _renewal_counts(subgen, init, exit_, x, top, kind):
    """Renewal-count probabilities of the phase-type renewal process.

    Row ``i`` holds, for ``j = 0..top-1``, ``P(N_ren(x_i) = j)`` (``kind ==
    "tail"``) or the density of the ``(j+1)``-th renewal epoch at ``x_i``
    (``kind == "pdf"``). Computed by uniformization of the block-bidiagonal
    generator.
    """
    n = init.size
    q = float(np.max(-np.diag(subgen)))
    stay = np.eye(n) + subgen / q
    renew = np.outer(exit_, init) / q
    reduce_vec = np.ones(n) if kind == "tail" else exit_
    xmax = float(np.max(x)) if x.size else 0.0
    qx = q * x
    steps = int(qx.max() + 12.0 * math.sqrt(qx.max() + 1.0) + 40) if x.size else 0
    vec = np.zeros((top, n))
    vec[0] = init
    acc = np.zeros((x.size, top))
    logw_base = -qx
    log_qx = np.log(np.where(qx > 0, qx, 1.0))
    for step in range(steps + 1):
        # Poisson(q x) weight of this step, computed in logs for stability.
        logw = logw_base + step * log_qx - math.lgamma(step + 1)
        w = np.where(qx > 0, np.exp(logw), 1.0 if step == 0 else 0.0)
        acc += w[:, None] * (vec @ reduce_vec)[None, :]
        nxt = vec @ stay
        nxt[1:] += vec[:-1] @ renew
        vec = nxt
    return acc


# -- tails -----------------------------------------------------------------------

def _check_tx(t, x):
    if not t > 0:
        raise DomainError("horizon must be positive")
    if x < 0:
        raise DomainError("loss level must be >= 0")


def agg_ph_tail(lam: float, eps: float, ph: PhaseTypeDist, t: float, x: float) -> float:
    """Tail of the phase-type compound sum over ``[0, t]`` (rate ``(1 - eps) lam``)."""
    _check_tx(t, x)
    return float(CompoundPoissonPH(lam * (1.0 - eps) * t, ph).tail(x))


@dataclass(frozen=True)
class AggregateTailCheck:
    inversion: float
    truncation: float
    reliable: bool


def agg_ph_tail_checked(lam: float, eps: float, ph: PhaseTypeDist, t: float, x: float,
                        tol: float = CROSS_CHECK_TOL) -> AggregateTailCheck:
    """Both evaluators of :func:`agg_ph_tail`, flagged unreliable if they differ by more than ``tol``."""
    _check_tx(t, x)
    s = CompoundPoissonPH(lam * (1.0 - eps) * t, ph)
    a = float(s.tail(x))
    b = float(s.tail_truncated(x))
    return AggregateTailCheck(a, b, abs(a - b) <= tol)


def corrected_discard_agg(lam: float, eps: float, ph: PhaseTypeDist, ht: HeavyTailModel,
                          t: float, x: float, coefficient: str = "at_least_one") -> float:
    """Corrected discard approximation of ``P(L_t > x)``.

    ``coefficient="exactly_one"`` weights the heavy branch by
    ``P(N^H = 1)`` instead of ``P(N^H >= 1)``, for comparison only.
    """
    _check_tx(t, x)
    s = CompoundPoissonPH(lam * (1.0 - eps) * t, ph)
    heavy_rate = lam * eps * t
    none = math.exp(-heavy_rate)
    if coefficient == "at_least_one":
        weight = -math.expm1(-heavy_rate)
    elif coefficient == "exactly_one":
        weight = heavy_rate * none
    else:
        raise ValidationError("coefficient must be 'at_least_one' or 'exactly_one'")
    light = float(s.tail(x))
    if weight == 0.0:
        return light
    return none * light + weight * conv_tail(s, ht.tail, x)


def discard_agg(lam: float, eps: float, ph: PhaseTypeDist, t: float, x: float) -> float:
    """Discard approximation: heavy claims dropped."""
    return agg_ph_tail(lam, eps, ph, t, x)


def agg_error_bounds(lam: float, eps: float, ph: PhaseTypeDist, ht: HeavyTailModel,
                     t: float, x: float) -> tuple[float, float]:
    """``(lower, upper)`` bracket of ``P(L_t > x) - corrected_discard_agg``."""
    _check_tx(t, x)
    upper = eps**2 * (lam * t) ** 2
    hr = lam * eps * t
    p2 = -math.expm1(-hr) - hr * math.exp(-hr)
    if x == 0 or p2 == 0:
        return 0.0, upper
    s = CompoundPoissonPH(lam * (1.0 - eps) * t, ph)
    law = ht.claim_law()
    two = conv_tail_multi(s, law, 2, x)
    one = conv_tail(s, law, x)
    return p2 * max(two - one, 0.0), upper


# -- random horizons ---------------------------------------------------------------

@dataclass(frozen=True)
class HorizonSpec:
    """Deterministic horizon ``t`` or a random one given by its transform.

    ``lst(w)`` is ``E exp(-w T)`` for complex ``w`` with ``Re w >= 0``.
    """

    lst: Callable
    mean: float
    second_moment: float
    fixed_time: float | None = None

    @classmethod
    def fixed(cls, t: float) -> "HorizonSpec":
        if not t > 0:
            raise ValidationError("horizon must be positive")
        return cls(lambda w: np.exp(-np.asarray(w) * t), t, t * t, t)

    @classmethod
    def exponential(cls, mean: float) -> "HorizonSpec":
        if not mean > 0:
            raise ValidationError("mean horizon must be positive")
        return cls(lambda w: 1.0 / (1.0 + mean * np.asarray(w)), mean, 2.0 * mean * mean)

    def error_bound(self, lam: float, eps: float) -> float:
        """``eps^2 lam^2 E[T^2]``."""
        return eps**2 * lam**2 * self.second_moment


def mixed_poisson_lst(lam: float, eps: float, ph: PhaseTypeDist, ht: HeavyTailModel,
                      horizon: HorizonSpec, s):
    """Transform ``int exp(-s x) P(L_T > x) dx`` of the corrected discard tail."""
    s = np.asarray(s, dtype=complex)
    b = ph.laplace(s)
    c = ht.laplace(s)[0]
    first = horizon.lst(lam * (1.0 - (1.0 - eps) * b))
    second = horizon.lst(lam * (1.0 - eps) * (1.0 - b))
    return 1.0 / s - (1.0 - c) / s * first - c / s * second


def mixed_poisson_tail(lam: float, eps: float, ph: PhaseTypeDist, ht: HeavyTailModel,
                       horizon: HorizonSpec, x: float, cfg: InversionConfig | None = None) -> float:
    """Corrected discard tail for a random horizon, by inverting :func:`mixed_poisson_lst`."""
    if not x > 0:
        raise DomainError("inversion needs x > 0")
    return laplace_invert(lambda s: mixed_poisson_lst(lam, eps, ph, ht, horizon, s), x, cfg)


# -- value at risk -----------------------------------------------------------------

@dataclass(frozen=True)
class VarResult:
    value: float
    at_atom: bool = False


def var_quantile(tail: Callable[[float], float], alpha: float, start: float = 1.0,
                 tol: float = VAR_TOL) -> VarResult:
    """Smallest ``x`` with ``tail(x) <= 1 - alpha``.

    The upper bracket starts at ``start`` and doubles until it holds the
    level; the root is then refined by Brent's bracketing method to ``tol``
    in ``x``. When already ``tail(0) <= 1 - alpha`` the result is zero with
    ``at_atom`` set.
    """
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    level = 1.0 - alpha
    if tail(0.0) <= level:
        return VarResult(0.0, True)
    hi = max(start, tol)
    lo = 0.0
    while tail(hi) > level:
        lo = hi
        hi *= 2.0
        if hi > 1e12:
            raise NumericError("could not bracket the quantile", estimate=hi)
    root = brentq(lambda v: tail(v) - level, lo, hi, xtol=tol, rtol=4 * np.finfo(float).eps)
    return VarResult(float(root))
