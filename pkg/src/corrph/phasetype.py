r"""Phase-type distributions with an atom at zero.

A :class:`PhaseTypeDist` is the law of the absorption time of a finite
Markov jump process started from ``init`` with transient generator
``subgen``; the probability ``atom = 1 - sum(init)`` of starting absorbed is
kept explicitly. Survival function and density are

.. math:: P(X > u) = \alpha e^{S u} \mathbf{1}, \qquad f(u) = \alpha e^{S u} t,

with exit vector :math:`t = -S\mathbf{1}`. The class is closed under
convolution, stationary excess and the Pollaczek-Khinchine geometric sum.

Matrix exponentials go through :func:`scipy.linalg.expm` (scaling and
squaring with a Pade approximant), batched over evaluation points.

>>> b = exponential(3.0)
>>> m = ph_pk_supremum(1.5, b)
>>> round(ph_tail(m, 0.0), 6)
0.5
"""
from __future__ import annotations

import math
from typing import Any

import numpy as np
from scipy.linalg import expm

from .errors import DomainError, RepresentationSizeError, StabilityError, ValidationError

MAX_PHASES = 256
_ATOL = 1e-12
_EXPM_CHUNK = 4096


class PhaseTypeDist:
    """Phase-type law with a possible atom at zero.

    Parameters
    ----------
    init : array_like, shape (n,)
        Initial probabilities of the transient phases.
    subgen : array_like, shape (n, n)
        Sub-generator of the transient phases.
    atom : float, optional
        Mass at zero. Defaults to ``1 - sum(init)``; when given it must agree
        with that value to 1e-12.

    Instances are immutable; the arrays are stored read-only.
    """

    __slots__ = ("atom", "init", "subgen", "exit", "_mean")

    def __init__(self, init, subgen, atom: float | None = None):
        init = np.array(init, dtype=float).reshape(-1)
        n = init.size
        subgen = np.array(subgen, dtype=float).reshape(n, n) if n else np.zeros((0, 0))
        if n > MAX_PHASES:
            raise RepresentationSizeError(f"{n} phases exceeds the cap of {MAX_PHASES}")
        total = float(init.sum())
        if atom is None:
            atom = max(0.0, 1.0 - total)
        atom = float(atom)
        _validate(init, subgen, atom)
        init.setflags(write=False)
        subgen.setflags(write=False)
        ex = -subgen.sum(axis=1)
        ex = np.where(ex < 0.0, 0.0, ex)  # clip roundoff below zero
        ex.setflags(write=False)
        object.__setattr__(self, "atom", atom)
        object.__setattr__(self, "init", init)
        object.__setattr__(self, "subgen", subgen)
        object.__setattr__(self, "exit", ex)
        object.__setattr__(self, "_mean", None)

    def __setattr__(self, name, value):
        raise AttributeError("PhaseTypeDist is immutable")

    def __repr__(self):
        return f"PhaseTypeDist(atom={self.atom:.6g}, phases={self.n_phases})"

    @property
    def n_phases(self) -> int:
        return self.init.size

    @property
    def mean(self) -> float:
        if self._mean is None:
            object.__setattr__(self, "_mean", ph_moment(self, 1))
        return self._mean

    def tail(self, u):
        """Vectorized survival function ``P(X > u)``."""
        u = np.asarray(u, dtype=float)
        if np.any(u < 0):
            raise DomainError("tail is defined for u >= 0")
        if self.n_phases == 0:
            return np.zeros_like(u)
        vals = self._propagate(u.ravel(), np.ones(self.n_phases))
        return np.clip(vals, 0.0, 1.0).reshape(u.shape)

    def pdf(self, u):
        """Vectorized density of the continuous part on ``u > 0``."""
        u = np.asarray(u, dtype=float)
        if self.n_phases == 0:
            return np.zeros_like(u)
        vals = self._propagate(np.maximum(u.ravel(), 0.0), self.exit)
        vals = np.where(u.ravel() < 0, 0.0, np.maximum(vals, 0.0))
        return vals.reshape(u.shape)

    def _propagate(self, u, vec):
        out = np.empty(u.size)
        for lo in range(0, u.size, _EXPM_CHUNK):
            x = u[lo:lo + _EXPM_CHUNK]
            e = expm(self.subgen[None, :, :] * x[:, None, None])
            out[lo:lo + x.size] = np.einsum("i,kij,j->k", self.init, e, vec)
        return out

    def laplace(self, s):
        """Vectorized Laplace-Stieltjes transform ``E exp(-s X)``."""
        s = np.asarray(s, dtype=complex)
        if self.n_phases == 0:
            return np.full(s.shape, self.atom, dtype=complex)
        n = self.n_phases
        flat = s.ravel()
        mats = flat[:, None, None] * np.eye(n)[None] - self.subgen[None]
        rhs = np.broadcast_to(self.exit.astype(complex), (flat.size, n))[..., None]
        x = np.linalg.solve(mats, rhs)[..., 0]
        return (self.atom + x @ self.init).reshape(s.shape)

    def to_dict(self) -> dict[str, Any]:
        return {"atom": self.atom, "init": self.init.tolist(), "subgen": self.subgen.tolist()}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "PhaseTypeDist":
        try:
            init = data["init"]
            subgen = data["subgen"]
        except KeyError as exc:
            raise ValidationError(f"phase-type descriptor missing field {exc}") from None
        return cls(init, subgen, data.get("atom"))


def _validate(init, subgen, atom):
    n = init.size
    if not np.all(np.isfinite(init)) or not np.all(np.isfinite(subgen)):
        raise ValidationError("non-finite entries in phase-type representation")
    if not 0.0 <= atom <= 1.0:
        raise ValidationError(f"atom {atom} outside [0, 1]")
    if np.any(init < 0):
        raise ValidationError("initial vector has negative entries")
    if abs(atom + init.sum() - 1.0) > _ATOL:
        raise ValidationError("atom + sum(init) must equal 1")
    if n == 0:
        return
    scale = max(1.0, float(np.abs(subgen).max()))
    diag = np.diag(subgen)
    if np.any(diag >= 0):
        raise ValidationError("sub-generator diagonal must be strictly negative")
    off = subgen - np.diag(diag)
    if np.any(off < -_ATOL * scale):
        raise ValidationError("sub-generator off-diagonal entries must be nonnegative")
    if np.any(subgen.sum(axis=1) > _ATOL * scale):
        raise ValidationError("sub-generator row sums must be nonpositive")
    if np.max(np.linalg.eigvals(subgen).real) >= 0:
        raise ValidationError("sub-generator is singular (an eigenvalue has nonnegative real part)")


# -- constructors ------------------------------------------------------------

def exponential(rate: float) -> PhaseTypeDist:
    if rate <= 0:
        raise ValidationError("rate must be positive")
    return PhaseTypeDist([1.0], [[-rate]])


def erlang(k: int, rate: float) -> PhaseTypeDist:
    if k < 1 or rate <= 0:
        raise ValidationError("erlang needs k >= 1 and rate > 0")
    s = -rate * np.eye(k) + rate * np.eye(k, k=1)
    init = np.zeros(k)
    init[0] = 1.0
    return PhaseTypeDist(init, s)


def hyperexponential(probs, rates) -> PhaseTypeDist:
    probs = np.asarray(probs, dtype=float)
    rates = np.asarray(rates, dtype=float)
    return PhaseTypeDist(probs, np.diag(-rates))


def point_mass_zero() -> PhaseTypeDist:
    return PhaseTypeDist(np.zeros(0), np.zeros((0, 0)), atom=1.0)


# -- operations --------------------------------------------------------------

def ph_moment(d: PhaseTypeDist, k: int) -> float:
    """Raw moment ``E[X^k]`` (the atom contributes nothing for ``k >= 1``)."""
    if not 1 <= k <= 4:
        raise DomainError("moments of order 1..4 are supported")
    if d.n_phases == 0:
        return 0.0
    try:
        v = d.init.copy()
        for _ in range(k):
            v = np.linalg.solve(-d.subgen.T, v)
    except np.linalg.LinAlgError as exc:
        raise ValidationError("singular sub-generator") from exc
    return float(math.factorial(k) * v.sum())


def ph_tail(d: PhaseTypeDist, u: float) -> float:
    """``P(X > u)`` for a single ``u >= 0``."""
    if u < 0:
        raise DomainError("tail is defined for u >= 0")
    return float(d.tail(np.array([u]))[0])


def ph_convolve(a: PhaseTypeDist, b: PhaseTypeDist) -> PhaseTypeDist:
    """Law of ``A + B`` for independent ``A ~ a`` and ``B ~ b``.

    When ``A`` exits (or starts absorbed, with probability ``a.atom``) the
    process enters ``b``'s phases, so the atoms multiply.
    """
    if a.n_phases == 0:
        return b
    if b.n_phases == 0:
        return a
    n, m = a.n_phases, b.n_phases
    if n + m > MAX_PHASES:
        raise RepresentationSizeError(f"convolution needs {n + m} phases (cap {MAX_PHASES})")
    s = np.zeros((n + m, n + m))
    s[:n, :n] = a.subgen
    s[:n, n:] = np.outer(a.exit, b.init)
    s[n:, n:] = b.subgen
    init = np.concatenate([a.init, a.atom * b.init])
    return PhaseTypeDist(init, s, atom=a.atom * b.atom)


def ph_convolve_power(d: PhaseTypeDist, k: int) -> PhaseTypeDist:
    out = point_mass_zero()
    for _ in range(k):
        out = ph_convolve(out, d)
    return out


def ph_stationary_excess(d: PhaseTypeDist) -> PhaseTypeDist:
    """Integrated-tail law with density ``P(X > x) / E[X]``."""
    if d.n_phases == 0 or d.atom >= 1.0:
        raise DomainError("stationary excess needs a positive mean")
    v = np.linalg.solve(-d.subgen.T, d.init)
    mean = v.sum()
    return PhaseTypeDist(v / mean, d.subgen, atom=0.0)


def ph_laplace(d: PhaseTypeDist, s: complex) -> complex:
    if np.real(s) < 0:
        raise DomainError("transform evaluated for Re(s) >= 0 only")
    return complex(d.laplace(np.array([s]))[0])


def ph_pk_supremum(lam: float, claims: PhaseTypeDist) -> PhaseTypeDist:
    """All-time supremum of the compound Poisson claim-surplus process.

    Premium rate one, arrival rate ``lam``. The result has atom ``1 - rho``
    and ladder structure ``init_plus = lam * init (-S)^{-1}``,
    ``S + t init_plus``.
    """
    if lam <= 0:
        raise DomainError("arrival rate must be positive")
    if claims.n_phases == 0:
        return point_mass_zero()
    plus = lam * np.linalg.solve(-claims.subgen.T, claims.init)
    rho = float(plus.sum())
    if rho >= 1.0:
        raise StabilityError(f"load rho = {rho:.6g} is not below 1")
    s = claims.subgen + np.outer(claims.exit, plus)
    return PhaseTypeDist(plus, s, atom=1.0 - rho)
