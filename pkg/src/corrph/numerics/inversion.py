r"""Numerical inversion of Laplace transforms.

Two methods, both evaluating the transform at a fixed set of nodes:

Euler (Abate-Whitt)
    Trapezoidal discretisation of the Bromwich integral on the vertical line
    :math:`\operatorname{Re} s = A / (2t)` followed by binomial (Euler)
    averaging of the last ``m + 1`` partial sums. The discretisation error is
    about :math:`e^{-A}`; ``A = 22`` puts it near 3e-10 while the roundoff
    amplification :math:`e^{A/2}` stays below 1e5. With 32 terms (17 plain
    partial sums, 15 averaged) tails come out to about 1e-10.

Fixed Talbot (Abate-Valko)
    Trapezoidal rule on the deformed contour
    :math:`s(\vartheta) = r \vartheta (\cot \vartheta + i)`,
    :math:`r = 2M / (5t)`, which wraps around the negative axis so it is
    safe for branch cuts there. Roughly ``0.6 M`` significant digits until
    roundoff takes over.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import DomainError, ValidationError

EULER_A = 22.0
_DEFAULT_TERMS = {"euler": 32, "talbot": 24}


@dataclass(frozen=True)
class InversionConfig:
    """Inversion settings.

    ``terms`` is the number of transform evaluations (Euler) or contour nodes
    (Talbot). ``None`` picks the method default.
    """

    method: str = "euler"
    terms: int | None = None
    target_rel_tol: float = 1e-9

    def __post_init__(self):
        if self.method not in _DEFAULT_TERMS:
            raise ValidationError(f"unknown inversion method {self.method!r}")
        if self.terms is None:
            object.__setattr__(self, "terms", _DEFAULT_TERMS[self.method])
        if self.terms < 8:
            raise ValidationError("at least 8 terms are required")
        if not self.target_rel_tol > 0:
            raise ValidationError("target_rel_tol must be positive")


@dataclass(frozen=True)
class InversionResult:
    value: float
    alternate: float
    reliable: bool

    @property
    def discrepancy(self) -> float:
        return abs(self.value - self.alternate)


def _eval(transform, s):
    """Evaluate a transform on an array of nodes; scalar-only callables work too."""
    try:
        out = np.asarray(transform(s), dtype=complex)
        if out.shape == s.shape:
            return out
    except (TypeError, ValueError):
        pass
    return np.array([complex(transform(z)) for z in s])


def euler_invert(transform: Callable, t: float, terms: int = 32) -> float:
    """Abate-Whitt Euler inversion using ``terms`` transform evaluations."""
    m = max(7 * terms // 16, 4)
    n = terms - m - 1
    k = np.arange(n + m + 1)
    s = (EULER_A + 2j * math.pi * k) / (2.0 * t)
    vals = _eval(transform, s).real
    signs = np.where(k % 2 == 0, 1.0, -1.0)
    terms_ = signs * vals
    terms_[0] *= 0.5
    partial = np.cumsum(terms_) * math.exp(EULER_A / 2.0) / t
    weights = np.array([math.comb(m, j) for j in range(m + 1)], dtype=float) / 2.0**m
    return float(weights @ partial[n:n + m + 1])


def talbot_invert(transform: Callable, t: float, terms: int = 24) -> float:
    """Fixed-Talbot inversion with ``terms`` contour nodes."""
    r = 2.0 * terms / (5.0 * t)
    theta = np.arange(1, terms) * math.pi / terms
    cot = 1.0 / np.tan(theta)
    s = r * theta * (cot + 1j)
    sigma = theta + (theta * cot - 1.0) * cot
    head = 0.5 * _eval(transform, np.array([r + 0j]))[0].real * math.exp(r * t)
    body = np.sum((np.exp(t * s) * _eval(transform, s) * (1.0 + 1j * sigma)).real)
    return float(r / terms * (head + body))


def _invert(transform, t, method, terms):
    if method == "euler":
        return euler_invert(transform, t, terms)
    return talbot_invert(transform, t, terms)


def laplace_invert(transform: Callable, t: float, cfg: InversionConfig | None = None) -> float:
    """Invert ``transform`` at ``t > 0`` with the configured method."""
    cfg = cfg or InversionConfig()
    if not t > 0:
        raise DomainError("inversion point must be positive")
    return _invert(transform, t, cfg.method, cfg.terms)


def laplace_invert_checked(transform: Callable, t: float,
                           cfg: InversionConfig | None = None) -> InversionResult:
    """Invert with the configured method and cross-check with the other one.

    The result is flagged unreliable when the two disagree by more than
    ``10 * target_rel_tol * max(|value|, 1)``: relative for large values,
    absolute for probabilities, whose small values both methods resolve
    only to an absolute accuracy.
    """
    cfg = cfg or InversionConfig()
    value = laplace_invert(transform, t, cfg)
    other = "talbot" if cfg.method == "euler" else "euler"
    alt = _invert(transform, t, other, _DEFAULT_TERMS[other])
    gap = abs(value - alt)
    reliable = gap <= 10.0 * cfg.target_rel_tol * max(abs(value), 1.0)
    return InversionResult(value, alt, reliable)
