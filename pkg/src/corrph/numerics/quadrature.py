r"""Adaptive Gauss-Legendre quadrature and tail convolutions.

The central quantity is :math:`P(S + H > u)` for independent ``S`` (a
distribution with an atom at zero and a density, typically phase-type) and
``H`` (given through its tail):

.. math::

    P(S + H > u) = a_S \bar H(u) + \int_0^u \bar H(u - x) f_S(x)\,dx + \bar S(u).

Heavy tails such as the Abate-Whitt family behave like ``1 - c sqrt(y)``
near zero, so the last stretch of the integral is mapped through
``x = u - y**2``, which makes the integrand smooth in ``y``. Beyond the point
where ``P(S > x)`` is negligible the integrand is dropped.

Sums with several heavy summands are handled by tabulating the tail of
``H_1 + ... + H_m`` once on a geometric grid and interpolating it
monotonically (PCHIP on the log-tail against ``sqrt(v)``), see
:func:`heavy_sum_table`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Any, Callable, Hashable

import numpy as np
from scipy.interpolate import PchipInterpolator

from ..errors import DomainError, NumericError, UnsupportedError, ValidationError

QUAD_TOL = 1e-10
MAX_HEAVY_DEPTH = 3
TABLE_POINTS = 400
TABLE_START = 1e-4
_NODES, _WEIGHTS = np.polynomial.legendre.leggauss(15)
_MAX_PANELS = 20000
_NEGLIGIBLE = 1e-14
_FLOOR = 1e-300


@dataclass(frozen=True)
class ContinuousLaw:
    """A law on ``[0, inf)`` given by its tail and density.

    ``key`` identifies the law for caching tabulated convolution powers.
    Calling the object evaluates the tail.
    """

    tail: Callable = field(compare=False)
    pdf: Callable = field(compare=False)
    key: Hashable = None

    def __call__(self, u):
        return self.tail(u)


def _panel_sums(f, a, b):
    """Gauss-Legendre estimates on panels ``[a_i, b_i]`` with one vectorized call."""
    half = 0.5 * (b - a)
    mid = 0.5 * (b + a)
    x = mid[:, None] + half[:, None] * _NODES[None, :]
    vals = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    return half * (vals @ _WEIGHTS)


def adaptive_gauss_legendre(f: Callable, a: float, b: float, tol: float = QUAD_TOL,
                            initial_panels: int = 4) -> tuple[float, float]:
    """Integrate ``f`` over ``[a, b]`` by bisecting 15-point Gauss-Legendre panels.

    ``f`` must accept a 1-D array. A panel is accepted when its estimate and
    the sum over its two halves agree to ``tol * width / (b - a)``, so the
    accepted error estimates add up to at most ``tol``.

    Returns
    -------
    value, error_estimate

    Raises
    ------
    NumericError
        When the panel budget runs out; ``estimate`` carries the partial value.
    """
    if b <= a:
        return 0.0, 0.0
    length = b - a
    edges = np.linspace(a, b, initial_panels + 1)
    lo, hi = edges[:-1], edges[1:]
    coarse = _panel_sums(f, lo, hi)
    total = 0.0
    err = 0.0
    used = initial_panels
    while lo.size:
        mid = 0.5 * (lo + hi)
        left = _panel_sums(f, lo, mid)
        right = _panel_sums(f, mid, hi)
        fine = left + right
        gap = np.abs(fine - coarse)
        ok = gap <= tol * (hi - lo) / length
        total += float(fine[ok].sum())
        err += float(gap[ok].sum())
        bad = ~ok
        used += 2 * int(bad.sum())
        if used > _MAX_PANELS:
            estimate = total + float(fine[bad].sum())
            raise NumericError(f"quadrature did not converge on [{a}, {b}]", estimate=estimate)
        lo = np.concatenate([lo[bad], mid[bad]])
        hi = np.concatenate([mid[bad], hi[bad]])
        coarse = np.concatenate([left[bad], right[bad]])
    return total, err


def _as_tail(tail_h):
    return tail_h.tail if isinstance(tail_h, ContinuousLaw) else tail_h


def _light_cutoff(s, limit: float) -> float:
    """Point beyond which ``P(S > x)`` is negligible (capped at ``limit``)."""
    x = 1.0
    while x < limit:
        if float(np.asarray(s.tail(x))) < _NEGLIGIBLE:
            return x
        x *= 2.0
    return limit


def conv_tail(s: Any, tail_h, u: float, tol: float = QUAD_TOL) -> float:
    """``P(S + H > u)``; ``s`` exposes ``atom``, ``tail`` and ``pdf``.

    ``tail_h`` is the tail function of ``H`` (or a :class:`ContinuousLaw`).
    """
    if u < 0:
        raise DomainError("u must be >= 0")
    h = _as_tail(tail_h)
    if u == 0:
        return min(1.0, float(s.atom) * float(h(0.0)) + (1.0 - float(s.atom)))
    base = float(s.atom) * float(h(u)) + float(np.asarray(s.tail(u)))
    if getattr(s, "n_phases", 1) == 0:
        return min(max(base, 0.0), 1.0)
    gap = min(0.5 * u, 1.0)
    split = u - gap
    cut = _light_cutoff(s, u)
    pieces = 0.0
    if cut <= split:
        pieces += adaptive_gauss_legendre(lambda x: h(u - x) * s.pdf(x), 0.0, cut, tol)[0]
    else:
        pieces += adaptive_gauss_legendre(lambda x: h(u - x) * s.pdf(x), 0.0, split, 0.5 * tol)[0]
        root = math.sqrt(gap)
        pieces += adaptive_gauss_legendre(
            lambda y: 2.0 * y * h(y * y) * s.pdf(u - y * y), 0.0, root, 0.5 * tol)[0]
    return float(min(max(base + pieces, 0.0), 1.0))


@dataclass(frozen=True)
class TabulatedTail:
    """Monotone interpolant of a tail function on ``[0, v_max]``."""

    grid: np.ndarray
    values: np.ndarray
    _interp: Any = field(repr=False, compare=False)

    @classmethod
    def build(cls, grid, values):
        values = np.minimum.accumulate(np.clip(values, _FLOOR, 1.0))
        # log-tail against sqrt(v): exponential and power tails both become
        # slowly varying, and PCHIP keeps the result monotone.
        return cls(grid, values, PchipInterpolator(np.sqrt(grid), np.log(values), extrapolate=False))

    @property
    def v_max(self) -> float:
        return float(self.grid[-1])

    def __call__(self, v):
        v = np.asarray(v, dtype=float)
        if np.any(v > self.v_max * (1 + 1e-12)):
            raise DomainError("tabulated tail evaluated beyond its grid")
        out = np.exp(self._interp(np.sqrt(np.clip(v, 0.0, self.v_max))))
        return float(out) if out.ndim == 0 else out


def _table_grid(v_max: float) -> np.ndarray:
    geo = np.geomspace(TABLE_START, v_max, TABLE_POINTS)
    return np.concatenate([[0.0], geo])


def _fold_once(prev: Callable, law: ContinuousLaw, v: float, tol: float) -> float:
    """``P(H + R > v)`` with ``R`` having tail ``prev`` and ``H ~ law``."""
    if v == 0:
        return 1.0
    half = 0.5 * v
    root = math.sqrt(half)
    # Substitutions at both ends: the density of H and the tail of R may
    # both have square-root behaviour at the origin.
    left = adaptive_gauss_legendre(
        lambda y: 2.0 * y * prev(v - y * y) * law.pdf(y * y), 0.0, root, 0.5 * tol)[0]
    right = adaptive_gauss_legendre(
        lambda y: 2.0 * y * prev(y * y) * law.pdf(v - y * y), 0.0, root, 0.5 * tol)[0]
    return float(law.tail(v)) + left + right


def _bucket(v: float) -> float:
    return float(2.0 ** math.ceil(math.log2(max(v, 1.0))))


@lru_cache(maxsize=64)
def _heavy_sum_table_cached(law: ContinuousLaw, m: int, v_max: float, tol: float) -> TabulatedTail:
    grid = _table_grid(v_max)
    if m == 1:
        return TabulatedTail.build(grid, np.asarray(law.tail(grid), dtype=float))
    prev = _heavy_sum_table_cached(law, m - 1, v_max, tol)
    vals = np.array([_fold_once(prev, law, v, tol) for v in grid])
    return TabulatedTail.build(grid, vals)


def heavy_sum_table(law: ContinuousLaw, m: int, v_max: float, tol: float = 1e-11) -> TabulatedTail:
    """Tabulated tail of ``H_1 + ... + H_m`` on ``[0, v]`` with ``v >= v_max``.

    The grid end is rounded up to a power of two so nearby requests share a
    table. Tables are cached per ``(law.key, m, grid end)``.
    """
    if not isinstance(law, ContinuousLaw) or law.key is None:
        raise ValidationError("tabulation needs a ContinuousLaw with a cache key")
    if m < 1:
        raise ValidationError("m must be >= 1")
    return _heavy_sum_table_cached(law, m, _bucket(v_max), tol)


def conv_tail_multi(s: Any, tail_h, m: int, u: float, tol: float = QUAD_TOL) -> float:
    """``P(S + H_1 + ... + H_m > u)`` for ``m <= 3`` i.i.d. heavy summands.

    ``m = 0`` is the tail of ``S`` and ``m = 1`` is :func:`conv_tail`. For
    ``m >= 2`` ``tail_h`` must be a :class:`ContinuousLaw` because the
    intermediate tails are built from the density.
    """
    if u < 0:
        raise DomainError("u must be >= 0")
    if m < 0:
        raise ValidationError("m must be >= 0")
    if m > MAX_HEAVY_DEPTH:
        raise UnsupportedError(f"heavy convolution depth {m} exceeds {MAX_HEAVY_DEPTH}")
    if m == 0:
        return float(np.asarray(s.tail(u)))
    if m == 1:
        return conv_tail(s, tail_h, u, tol)
    if not isinstance(tail_h, ContinuousLaw):
        raise ValidationError("m >= 2 needs a ContinuousLaw (tail and density)")
    table = heavy_sum_table(tail_h, m, u)
    return conv_tail(s, table, u, tol)
