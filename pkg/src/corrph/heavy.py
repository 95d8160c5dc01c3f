r"""Heavy-tailed claim laws and their stationary-excess laws.

Two families are provided:

``AbateWhitt(mu)``
    The long-tailed law with transform
    :math:`\hat C(s) = 1 - s / ((\mu + \sqrt{s})(1 + \sqrt{s}))`, mean
    :math:`1/\mu` and all higher moments infinite. Its excess law has
    transform :math:`\mu / ((\mu + \sqrt{s})(1 + \sqrt{s}))`. Partial
    fractions in :math:`\sqrt{s}` give closed forms in terms of
    :math:`\zeta(x) = e^x \operatorname{erfc}(\sqrt{x})`:

    .. math::

        P(C > u) = \frac{\zeta(u) - \mu\,\zeta(\mu^2 u)}{1 - \mu}, \qquad
        P(C^e > u) = \frac{\zeta(\mu^2 u) - \mu\,\zeta(u)}{1 - \mu}.

``Lomax(scale, shape)``
    Pareto type II on :math:`[0, \infty)` with tail
    :math:`(1 + u/\sigma)^{-\alpha}`, mean :math:`\sigma / (\alpha - 1)`.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, ParameterError, UnsupportedError, ValidationError
from .numerics.special import zeta
from .numerics.quadrature import ContinuousLaw

_SQRT_PI = math.sqrt(math.pi)


def _check_u(u):
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise DomainError("argument must be >= 0")
    return u


def _out(a):
    return float(a) if np.ndim(a) == 0 else a


@dataclass(frozen=True)
class AbateWhitt:
    mu: float

    def __post_init__(self):
        if not self.mu > 0:
            raise ValidationError("mu must be positive")
        if self.mu == 1.0:
            raise ParameterError("mu = 1 makes the partial-fraction form degenerate")

    @property
    def mean(self) -> float:
        return 1.0 / self.mu

    def tail(self, u):
        u = _check_u(u)
        mu = self.mu
        return _out(np.clip((zeta(u) - mu * zeta(mu * mu * u)) / (1.0 - mu), 0.0, 1.0))

    def pdf(self, u):
        # Integrable 1/sqrt(u) singularity at the origin.
        u = np.asarray(u, dtype=float)
        mu = self.mu
        with np.errstate(divide="ignore"):
            val = -(zeta(u) - mu**3 * zeta(mu * mu * u) + (mu * mu - 1.0) / (_SQRT_PI * np.sqrt(u))) / (1.0 - mu)
        return _out(np.maximum(val, 0.0))

    def excess_tail(self, u):
        u = _check_u(u)
        mu = self.mu
        return _out(np.clip((zeta(mu * mu * u) - mu * zeta(u)) / (1.0 - mu), 0.0, 1.0))

    def excess_pdf(self, u):
        return _out(self.mu * np.asarray(self.tail(u)))

    def laplace(self, s):
        """Return ``(C(s), Ce(s))``; principal branch of ``sqrt(s)``."""
        s = np.asarray(s, dtype=complex)
        r = np.sqrt(s)
        den = (self.mu + r) * (1.0 + r)
        c = 1.0 - s / den
        ce = self.mu / den
        if s.ndim == 0:
            return complex(c), complex(ce)
        return c, ce

    def sample(self, rng, size=None):
        raise UnsupportedError("no closed-form inverse CDF for the Abate-Whitt family")

    def sample_excess(self, rng, size=None):
        raise UnsupportedError("no closed-form inverse CDF for the Abate-Whitt excess law")

    def to_dict(self) -> dict[str, Any]:
        return {"kind": "abate_whitt", "params": {"mu": self.mu}}

    def claim_law(self) -> ContinuousLaw:
        return ContinuousLaw(self.tail, self.pdf, ("aw", self.mu, "claim"))

    def excess_law(self) -> ContinuousLaw:
        return ContinuousLaw(self.excess_tail, self.excess_pdf, ("aw", self.mu, "excess"))


@dataclass(frozen=True)
class Lomax:
    scale: float
    shape: float

    def __post_init__(self):
        if not self.scale > 0:
            raise ValidationError("scale must be positive")
        if not self.shape > 1:
            raise ValidationError("shape must exceed 1 for a finite mean")

    @property
    def mean(self) -> float:
        return self.scale / (self.shape - 1.0)

    def tail(self, u):
        u = _check_u(u)
        return _out((1.0 + u / self.scale) ** -self.shape)

    def pdf(self, u):
        u = np.asarray(u, dtype=float)
        return _out(np.where(u < 0, 0.0, self.shape / self.scale * (1.0 + np.maximum(u, 0) / self.scale) ** (-self.shape - 1.0)))

    def excess_tail(self, u):
        u = _check_u(u)
        return _out((1.0 + u / self.scale) ** -(self.shape - 1.0))

    def excess_pdf(self, u):
        u = np.asarray(u, dtype=float)
        a = self.shape - 1.0
        return _out(np.where(u < 0, 0.0, a / self.scale * (1.0 + np.maximum(u, 0) / self.scale) ** (-a - 1.0)))

    def laplace(self, s):
        """Return ``(C(s), Ce(s))`` by adaptive quadrature (relative tol 1e-10)."""
        arr = np.asarray(s, dtype=complex)
        c = np.empty(arr.shape, dtype=complex)
        ce = np.empty(arr.shape, dtype=complex)
        for idx, z in np.ndenumerate(arr):
            c[idx] = _lomax_transform(z * self.scale, self.shape + 1.0) * self.shape
            ce[idx] = _lomax_transform(z * self.scale, self.shape) * (self.shape - 1.0)
        if arr.ndim == 0:
            return complex(c), complex(ce)
        return c, ce

    def inverse_tail(self, v):
        """Quantile map ``v -> u`` with ``P(C > u) = v``."""
        v = np.asarray(v, dtype=float)
        return _out(self.scale * (v ** (-1.0 / self.shape) - 1.0))

    def excess_inverse_tail(self, v):
        v = np.asarray(v, dtype=float)
        return _out(self.scale * (v ** (-1.0 / (self.shape - 1.0)) - 1.0))

    def sample(self, rng, size=None):
        return self.inverse_tail(1.0 - rng.random(size))

    def sample_excess(self, rng, size=None):
        return self.excess_inverse_tail(1.0 - rng.random(size))

    def to_dict(self) -> dict[str, Any]:
        return {"kind": "lomax", "params": {"scale": self.scale, "shape": self.shape}}

    def claim_law(self) -> ContinuousLaw:
        return ContinuousLaw(self.tail, self.pdf, ("lomax", self.scale, self.shape, "claim"))

    def excess_law(self) -> ContinuousLaw:
        return ContinuousLaw(self.excess_tail, self.excess_pdf, ("lomax", self.scale, self.shape, "excess"))


HeavyTailModel = AbateWhitt | Lomax


def _lomax_transform(z: complex, p: float) -> complex:
    """``int_0^inf exp(-z y) (1 + y)^(-p) dy`` for ``Re z >= 0``, ``p > 1``.

    The integration ray is rotated onto ``arg(y) = -arg(z)``, where
    ``exp(-z y)`` decays without oscillating; the rotation is allowed because
    ``(1 + y)^(-p)`` is analytic and decaying in the closed right half plane.
    The same ray integral continues the transform to ``|arg z| < pi``, which
    is what contour methods such as Talbot's need. Within about 0.01 rad of
    the cut the ray grazes the pole at ``-1`` and accuracy drops.
    """
    if z.real < 0 and z.imag == 0:
        raise DomainError("transform has a branch cut on the negative real axis")
    r = abs(z)
    if r == 0.0:
        return complex(1.0 / (p - 1.0))
    phase = cmath.exp(-1j * cmath.phase(z))
    kw = dict(complex_func=True, epsabs=1e-15, epsrel=1e-11, limit=400)
    # Left of the imaginary axis the ray passes closest to the pole at -1
    # at this distance from the origin; split the integral there.
    near = -phase.real if phase.real < 0 else None
    if r >= 1.0:
        g = lambda x: math.exp(-x) * (1.0 + x * phase / r) ** -p
        edges = [0.0] if near is None else [0.0, near * r]
        val = sum(quad(g, lo, hi, **kw)[0] for lo, hi in zip(edges, edges[1:]))
        return complex(phase / r * (val + quad(g, edges[-1], np.inf, **kw)[0]))
    # Slow exponential decay: integrate along the ray without rescaling.
    # Decades up to the decay scale 1/r keep each piece well resolved.
    g = lambda y: math.exp(-r * y) * (1.0 + y * phase) ** -p
    edges = [0.0, 1.0]
    while edges[-1] < 40.0 / r:
        edges.append(edges[-1] * 10.0)
    if near is not None and near not in edges:
        edges = sorted(edges + [near])
    val = sum(quad(g, lo, hi, **kw)[0] for lo, hi in zip(edges[:-1], edges[1:]))
    val += quad(g, edges[-1], np.inf, **kw)[0]
    return complex(phase * val)


def heavy_from_dict(data: dict[str, Any]) -> HeavyTailModel:
    kind = data.get("kind")
    params = data.get("params", {})
    try:
        if kind == "abate_whitt":
            return AbateWhitt(float(params["mu"]))
        if kind == "lomax":
            return Lomax(float(params["scale"]), float(params["shape"]))
    except KeyError as exc:
        raise ValidationError(f"heavy-tail descriptor missing parameter {exc}") from None
    raise ValidationError(f"unknown heavy-tail kind {kind!r}")


# -- function-style API ------------------------------------------------------

def ht_laplace(m: HeavyTailModel, s):
    return m.laplace(s)


def ht_tail(m: HeavyTailModel, u):
    return m.tail(u)


def ht_excess_tail(m: HeavyTailModel, u):
    return m.excess_tail(u)


def ht_sample(m: HeavyTailModel, rng, size=None):
    return m.sample(rng, size)


def ht_sample_excess(m: HeavyTailModel, rng, size=None):
    return m.sample_excess(rng, size)
