"""Scaled complementary error functions.

``zeta(x) = exp(x) erfc(sqrt(x))`` is the kernel that inverts transforms of
the form ``1 / (sqrt(s) (sqrt(s) + a))``. It is evaluated in scaled form so
large arguments never overflow. Complex arguments go through the Faddeeva
function ``w(z) = exp(-z**2) erfc(-i z)``, using
``exp(z**2) erfc(z) = w(i z)``.
"""
from __future__ import annotations

import numpy as np
from scipy.special import erfcx

from .. import kernels
from ..errors import DomainError


def faddeeva(z):
    """Faddeeva function, elementwise; scalar in, scalar out."""
    out = kernels.faddeeva(np.asarray(z, dtype=complex))
    return complex(out) if np.ndim(out) == 0 else out


def zeta(x):
    """``exp(x) erfc(sqrt(x))`` for real ``x >= 0`` (vectorized)."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("zeta is defined for x >= 0")
    out = erfcx(np.sqrt(x))
    return float(out) if out.ndim == 0 else out


def zeta_complex(nu, u):
    """``exp(nu**2 u) erfc(nu sqrt(u))`` for complex ``nu`` and real ``u >= 0``.

    Broadcasts over ``nu`` and ``u``.
    """
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise DomainError("zeta_complex is defined for u >= 0")
    z = np.asarray(nu, dtype=complex) * np.sqrt(u)
    out = kernels.faddeeva(1j * z)
    return complex(out) if np.ndim(out) == 0 else out
