r"""Closed-form ruin probability for exponential plus Abate-Whitt claims.

Claims are exponential with rate ``nu`` with probability ``1 - eps`` and
Abate-Whitt(``mu``) with probability ``eps``; premium rate one, Poisson
arrivals at rate ``lam``. In :math:`x = \sqrt{s}` the Pollaczek-Khinchine
transform of the ruin probability is rational with denominator

.. math::

    d(x) = x^4 + (\mu+1)x^3 + (\mu+\nu-\lambda)x^2
           + (\mu+1)(\nu-\lambda+\lambda\epsilon)x
           + \mu(\nu-\lambda) + \lambda\epsilon(\mu-\nu)

and numerator :math:`n(x) = (1-\epsilon)(\mu+x)(1+x) + \epsilon(x^2+\nu)`.
With roots :math:`r_i = -\nu_i` of ``d`` and simple-pole residues
:math:`a_i = n(r_i)/d'(r_i)`, partial fractions in :math:`\sqrt{s}` give

.. math::

    \psi(u) = c \sum_{i=1}^4 \frac{a_i}{\nu_i} \zeta(\nu_i^2 u), \qquad
    c = \frac{\lambda}{\mu\nu}\bigl(\mu\nu - \lambda(\mu + \epsilon(\nu-\mu))\bigr),

with :math:`\zeta(z) = e^{z} \operatorname{erfc}(\sqrt{z})` continued to the
complex roots as :math:`e^{\nu^2 u}\operatorname{erfc}(\nu\sqrt{u})`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConditionError, DomainError, NumericError, ParameterError, StabilityError
from .numerics.roots import RESIDUAL_TOL, quartic_roots
from .numerics.special import zeta_complex

IMAG_TOL = 1e-10
_DEGENERATE_TOL = 1e-8


def exact_load(mu: float, nu: float, lam: float, eps: float) -> float:
    """Load ``rho = (lam / (mu nu)) (mu + eps (nu - mu))`` of the mixture model."""
    return lam / (mu * nu) * (mu + eps * (nu - mu))


def lambda_for_rho(mu: float, nu: float, eps: float, rho: float) -> float:
    """Arrival rate that gives load ``rho``."""
    if not 0.0 < rho < 1.0:
        raise DomainError("target load must lie in (0, 1)")
    return rho * mu * nu / (mu + eps * (nu - mu))


def _denominator(mu, nu, lam, eps):
    return np.array([
        1.0,
        mu + 1.0,
        mu + nu - lam,
        (mu + 1.0) * (nu - lam + lam * eps),
        mu * (nu - lam) + lam * eps * (mu - nu),
    ])


def _numerator(mu, nu, eps):
    # (1 - eps)(x + mu)(x + 1) + eps (x^2 + nu)
    return (1.0 - eps) * np.array([1.0, mu + 1.0, mu]) + eps * np.array([1.0, 0.0, nu])


@dataclass(frozen=True)
class ExactSolution:
    """Roots and residues of the closed-form ruin probability.

    ``rates`` holds the ``nu_i = -r_i`` (all with positive real part) and
    ``residues`` the matching ``a_i``.
    """

    mu: float
    nu: float
    lam: float
    eps: float
    rates: np.ndarray
    residues: np.ndarray
    prefactor: float

    @property
    def rho(self) -> float:
        return exact_load(self.mu, self.nu, self.lam, self.eps)

    @property
    def roots(self) -> np.ndarray:
        return -self.rates

    def weights(self) -> np.ndarray:
        """Coefficients ``c a_i / nu_i`` multiplying ``zeta(nu_i^2 u)``."""
        return self.prefactor * self.residues / self.rates

    def __call__(self, u):
        return exact_ruin(self, u)


def solve_exact(mu: float, nu: float, lam: float, eps: float) -> ExactSolution:
    """Build the closed-form solution and verify its self-consistency.

    Raises
    ------
    StabilityError
        Load ``rho >= 1``.
    ParameterError
        ``mu == 1``.
    ConditionError
        A repeated root (``|d'(r)| < 1e-8``) or a failed identity check.
    """
    if mu <= 0 or nu <= 0 or lam <= 0 or not 0.0 <= eps <= 1.0:
        raise DomainError("need mu, nu, lam > 0 and eps in [0, 1]")
    if mu == 1.0:
        raise ParameterError("mu = 1 is not supported by the partial-fraction form")
    rho = exact_load(mu, nu, lam, eps)
    if rho >= 1.0:
        raise StabilityError(f"load rho = {rho:.6g} is not below 1")
    den = _denominator(mu, nu, lam, eps)
    roots = quartic_roots(*den)
    slope = np.polyval(np.polyder(den), roots)
    if np.min(np.abs(slope)) < _DEGENERATE_TOL:
        raise ConditionError("repeated root: the simple-pole expansion does not apply")
    residues = np.polyval(_numerator(mu, nu, eps), roots) / slope
    rates = -roots
    prefactor = lam / (mu * nu) * (mu * nu - lam * (mu + eps * (nu - mu)))
    # Transform at s = 0 must give total mass one.
    target = mu + eps * (nu - mu)
    got = (mu * nu - lam * target) * np.sum(residues / rates)
    if abs(got - target) > 1e-9 * max(1.0, abs(target)):
        raise ConditionError(f"residue identity violated: {got} vs {target}")
    return ExactSolution(mu, nu, lam, eps, rates, residues, float(prefactor))


def polynomial_residuals(sol: ExactSolution) -> np.ndarray:
    """Relative residuals ``|d(r_i)| / max_k |c_k r_i^k|`` of the four roots."""
    den = _denominator(sol.mu, sol.nu, sol.lam, sol.eps)
    out = []
    for r in sol.roots:
        scale = np.max(np.abs(den) * np.abs(r) ** np.arange(4, -1, -1))
        out.append(abs(np.polyval(den, r)) / scale)
    return np.array(out)


def exact_ruin(sol: ExactSolution, u):
    """Ruin probability at capital ``u >= 0`` (vectorized).

    Raises
    ------
    NumericError
        If the residue sum keeps an imaginary part above 1e-10.
    """
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise DomainError("u must be >= 0")
    z = zeta_complex(sol.rates[:, None], u.reshape(1, -1))
    total = sol.weights() @ z
    worst = float(np.max(np.abs(total.imag))) if total.size else 0.0
    if worst > IMAG_TOL:
        raise NumericError(f"imaginary residual {worst:.3g} in the residue sum", estimate=total.real)
    vals = np.clip(total.real, 0.0, 1.0).reshape(u.shape)
    return float(vals) if vals.ndim == 0 else vals


def exact_transform(mu: float, nu: float, lam: float, eps: float, s):
    """Transform ``int_0^inf exp(-s u) psi(u) du`` from the Pollaczek-Khinchine formula.

    Independent of the root computation; used to cross-check it by
    numerical inversion.
    """
    s = np.asarray(s, dtype=complex)
    root = np.sqrt(s)
    delta, theta = lam / nu, lam / mu
    rho = (1.0 - eps) * delta + eps * theta
    excess_b = nu / (s + nu)
    excess_c = mu / ((mu + root) * (1.0 + root))
    sup = (1.0 - rho) / (1.0 - (1.0 - eps) * delta * excess_b - eps * theta * excess_c)
    return (1.0 - sup) / s


__all__ = [
    "ExactSolution", "exact_load", "exact_ruin", "exact_transform", "lambda_for_rho",
    "polynomial_residuals", "solve_exact",
]
