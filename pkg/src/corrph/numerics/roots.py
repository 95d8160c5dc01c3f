"""Roots of real quartic polynomials."""
from __future__ import annotations

import numpy as np

from ..errors import ConvergenceError, ValidationError

RESIDUAL_TOL = 1e-9
_NEWTON_STEPS = 8


def _residual_scale(coeffs, r):
    # Largest single term |c_k r^k|: the size of the cancellation in d(r).
    powers = np.abs(r) ** np.arange(len(coeffs) - 1, -1, -1)
    return max(float(np.max(np.abs(coeffs) * powers)), np.finfo(float).tiny)


def quartic_roots(c4: float, c3: float, c2: float, c1: float, c0: float) -> np.ndarray:
    """All four complex roots of ``c4 x^4 + c3 x^3 + c2 x^2 + c1 x + c0``.

    Companion-matrix eigenvalues polished by a few Newton steps. Roots with
    negligible imaginary part are made real; the rest are arranged as
    conjugate pairs, ordered by increasing real part.

    Raises
    ------
    ConvergenceError
        If any relative residual ``|d(r)| / max_k |c_k r^k|`` exceeds 1e-9.
    """
    coeffs = np.array([c4, c3, c2, c1, c0], dtype=float)
    if not np.all(np.isfinite(coeffs)):
        raise ValidationError("quartic coefficients must be finite")
    if c4 == 0:
        raise ValidationError("leading coefficient must be nonzero")
    roots = np.roots(coeffs).astype(complex)
    deriv = np.polyder(coeffs)
    for _ in range(_NEWTON_STEPS):
        dv = np.polyval(deriv, roots)
        safe = np.abs(dv) > 0
        step = np.zeros_like(roots)
        step[safe] = np.polyval(coeffs, roots[safe]) / dv[safe]
        roots = roots - step
    roots = _merge_double_roots(coeffs, _pair_conjugates(roots))
    for r in roots:
        res = abs(np.polyval(coeffs, r)) / _residual_scale(coeffs, r)
        if res > RESIDUAL_TOL:
            raise ConvergenceError(f"quartic root {r} has relative residual {res:.3g}")
    return roots


def _pair_conjugates(roots):
    # Relative to each root, so clusters of tiny roots keep their shape.
    is_real = [abs(r.imag) <= 1e-12 * abs(r) for r in roots]
    real = [complex(r.real, 0.0) for r, flag in zip(roots, is_real) if flag]
    upper = sorted((r for r, flag in zip(roots, is_real) if not flag and r.imag > 0), key=lambda z: z.real)
    out = sorted(real, key=lambda z: z.real)
    for r in upper:
        out.extend([r, r.conjugate()])
    if len(out) != len(roots):
        # Unpaired complex roots: keep the raw Newton output.
        return np.sort_complex(roots)
    return np.array(out, dtype=complex)


def _merge_double_roots(coeffs, roots):
    """Collapse a split double root ``a +- i b`` (``b`` tiny) onto the real axis.

    Newton converges only linearly to a double root, leaving a spurious
    conjugate pair. It is replaced by ``a, a`` when ``a`` itself is a root to
    rounding level.
    """
    out = roots.copy()
    for k in range(len(out) - 1):
        r, q = out[k], out[k + 1]
        if r.imag <= 0 or q != r.conjugate():
            continue
        if abs(r.imag) > 1e-4 * max(1.0, abs(r)):
            continue
        a = complex(r.real, 0.0)
        if abs(np.polyval(coeffs, a)) / _residual_scale(coeffs, a) < 1e-14:
            out[k] = out[k + 1] = a
    return out[np.argsort(out.real, kind="stable")] if np.all(out.imag == 0) else out
