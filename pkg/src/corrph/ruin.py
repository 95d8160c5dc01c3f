r"""Infinite-horizon ruin probabilities for a phase-type / heavy-tailed mixture.

Claims are ``B`` (phase-type) with probability ``1 - eps`` and ``C`` (heavy)
with probability ``eps``; Poisson arrivals at rate ``lam``, premium rate one.
Write :math:`\delta = \lambda E B`, :math:`\theta = \lambda E C` and
:math:`p_\epsilon = \epsilon\theta / (1 - \delta + \epsilon\delta)`.

Two phase-type base models are available in closed form:

* discard: heavy claims are dropped, arrival rate :math:`(1-\epsilon)\lambda`,
  all-time supremum :math:`M^\bullet`;
* replace: heavy claims are replaced by phase-type ones (``eps = 0``),
  supremum :math:`M`.

The ruin probability expands around either base model in powers of ``eps``.
Keeping the first correction gives

.. math::

    \psi^{cd}(u) = \psi^\bullet(u) + p_\epsilon
        \bigl(P(M^\bullet_0 + M^\bullet_1 + C^e > u) - \psi^\bullet(u)\bigr),

    \psi^{cr}(u) = \psi^0(u)
        + \frac{\epsilon\theta}{1-\delta}\bigl(P(M_0 + M_1 + C^e > u) - \psi^0(u)\bigr)
        - \frac{\epsilon\delta}{1-\delta}\bigl(P(M_0 + M_1 + B^e > u) - \psi^0(u)\bigr).

The ``B^e`` branch stays inside phase-type algebra; only the ``C^e`` branch
needs quadrature.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable

import numpy as np

from .errors import ConditionError, DomainError, StabilityError, UnsupportedError, ValidationError
from .exact import lambda_for_rho
from .heavy import AbateWhitt, HeavyTailModel, heavy_from_dict
from .numerics.quadrature import conv_tail, conv_tail_multi
from .phasetype import (PhaseTypeDist, exponential, ph_convolve, ph_convolve_power,
                        ph_pk_supremum, ph_stationary_excess, point_mass_zero)

MAX_SERIES_ORDER = 3


@dataclass(frozen=True)
class RiskModel:
    """Arrival rate, mixing weight and the two claim components."""

    lam: float
    eps: float
    ph: PhaseTypeDist = field(repr=False)
    heavy: HeavyTailModel

    def __post_init__(self):
        if not self.lam > 0:
            raise ValidationError("arrival rate must be positive")
        if not 0.0 <= self.eps <= 1.0:
            raise ValidationError("eps must lie in [0, 1]")
        if self.ph.mean <= 0:
            raise ValidationError("phase-type claims need a positive mean")

    @classmethod
    def from_load(cls, rho: float, eps: float, ph: PhaseTypeDist, heavy: HeavyTailModel) -> "RiskModel":
        """Model whose load ``(1 - eps) lam E B + eps lam E C`` equals ``rho``."""
        if not 0.0 < rho < 1.0:
            raise DomainError("target load must lie in (0, 1)")
        return cls(rho / ((1.0 - eps) * ph.mean + eps * heavy.mean), eps, ph, heavy)

    @property
    def delta(self) -> float:
        return self.lam * self.ph.mean

    @property
    def theta(self) -> float:
        return self.lam * self.heavy.mean

    @property
    def rho(self) -> float:
        return (1.0 - self.eps) * self.delta + self.eps * self.theta

    @property
    def p_eps(self) -> float:
        return self.eps * self.theta / (1.0 - self.delta + self.eps * self.delta)

    @property
    def mean_claim(self) -> float:
        return (1.0 - self.eps) * self.ph.mean + self.eps * self.heavy.mean

    # Phase-type building blocks, computed once per model.

    @cached_property
    def discard_sup(self) -> PhaseTypeDist:
        lam_eff = (1.0 - self.eps) * self.lam
        return ph_pk_supremum(lam_eff, self.ph) if lam_eff > 0 else point_mass_zero()

    @cached_property
    def replace_sup(self) -> PhaseTypeDist:
        return ph_pk_supremum(self.lam, self.ph)

    @cached_property
    def ph_excess(self) -> PhaseTypeDist:
        return ph_stationary_excess(self.ph)

    @cached_property
    def heavy_excess(self):
        return self.heavy.excess_law()

    def discard_power(self, k: int) -> PhaseTypeDist:
        return _power(self, "discard", k)

    def replace_power(self, k: int) -> PhaseTypeDist:
        return _power(self, "replace", k)

    def to_dict(self) -> dict[str, Any]:
        return {"lam": self.lam, "eps": self.eps, "ph": self.ph.to_dict(), "heavy": self.heavy.to_dict()}

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "RiskModel":
        try:
            ph = PhaseTypeDist.from_dict(data["ph"])
            heavy = heavy_from_dict(data["heavy"])
            eps = float(data["eps"])
        except KeyError as exc:
            raise ValidationError(f"model descriptor missing field {exc}") from None
        if "lam" in data:
            return cls(float(data["lam"]), eps, ph, heavy)
        if "rho" in data:
            return cls.from_load(float(data["rho"]), eps, ph, heavy)
        raise ValidationError("model descriptor needs 'lam' or 'rho'")


def _power(m: RiskModel, which: str, k: int) -> PhaseTypeDist:
    cache = m.__dict__.setdefault("_powers", {})
    key = (which, k)
    if key not in cache:
        base = m.discard_sup if which == "discard" else m.replace_sup
        cache[key] = ph_convolve_power(base, k)
    return cache[key]


def exponential_abate_whitt(mu: float, nu: float, eps: float, *, rho: float | None = None,
                            lam: float | None = None) -> RiskModel:
    """Exponential(``nu``) plus Abate-Whitt(``mu``) claims, by load or by rate."""
    if (rho is None) == (lam is None):
        raise ValidationError("give exactly one of rho and lam")
    if lam is None:
        lam = lambda_for_rho(mu, nu, eps, rho)
    return RiskModel(lam, eps, exponential(nu), AbateWhitt(mu))


# -- conditions -------------------------------------------------------------

@dataclass(frozen=True)
class ConditionReport:
    """Outcome of the stability and convergence checks.

    ``replace_bound`` is the precondition of the corrected-replace error
    bound, ``eps < |1 - delta| / (delta + theta)``.
    """

    stable: bool
    discard: bool
    replace: bool
    replace_bound: bool
    messages: tuple[str, ...] = ()

    @property
    def all_pass(self) -> bool:
        return self.stable and self.discard and self.replace

    def as_dict(self) -> dict[str, bool]:
        return {"stable": self.stable, "discard": self.discard, "replace": self.replace,
                "replace_bound": self.replace_bound}


def check_conditions(m: RiskModel) -> ConditionReport:
    """Evaluate the stability and series-convergence inequalities."""
    d, th, e = m.delta, m.theta, m.eps
    msgs = []
    stable = m.rho < 1.0 and d < 1.0
    if not stable:
        msgs.append(f"stability: need rho_eps < 1 and delta < 1, got rho_eps={m.rho:.6g}, delta={d:.6g}")
    discard = abs(e * th) < abs(1.0 - d + e * d)
    if not discard:
        msgs.append(f"discard convergence: |eps*theta| = {abs(e * th):.6g} "
                    f"not below |1-delta+eps*delta| = {abs(1.0 - d + e * d):.6g}")
    replace = e == 0.0 or e < abs(1.0 - d) / max(d, th)
    if not replace:
        msgs.append(f"replace convergence: eps = {e:.6g} not below "
                    f"|1-delta|/max(delta,theta) = {abs(1.0 - d) / max(d, th):.6g}")
    bound = e == 0.0 or e < abs(1.0 - d) / (d + th)
    if not bound:
        msgs.append(f"replace error bound: eps = {e:.6g} not below "
                    f"|1-delta|/(delta+theta) = {abs(1.0 - d) / (d + th):.6g}")
    return ConditionReport(stable, discard, replace, bound, tuple(msgs))


def _require(m: RiskModel, *names: str):
    rep = check_conditions(m)
    if not rep.stable:
        raise StabilityError("; ".join(rep.messages))
    for name in names:
        if not getattr(rep, name):
            raise ConditionError("; ".join(rep.messages))


def _grid_map(fn: Callable[[float], float], u):
    arr = np.asarray(u, dtype=float)
    if np.any(arr < 0):
        raise DomainError("u must be >= 0")
    if arr.ndim == 0:
        return float(fn(float(arr)))
    return np.array([fn(float(x)) for x in arr.ravel()]).reshape(arr.shape)


# -- base models ------------------------------------------------------------

def ruin_discard(m: RiskModel, u):
    """Ruin probability of the discard base model."""
    if (1.0 - m.eps) * m.delta >= 1.0:
        raise StabilityError("discard base model is unstable")
    out = m.discard_sup.tail(np.asarray(u, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def ruin_replace(m: RiskModel, u):
    """Ruin probability of the replace base model."""
    if m.delta >= 1.0:
        raise StabilityError("replace base model is unstable")
    out = m.replace_sup.tail(np.asarray(u, dtype=float))
    return float(out) if np.ndim(out) == 0 else out


def base_ruin_transform(m: RiskModel, s, which: str = "discard"):
    """``int exp(-s u) psi(u) du`` of a base model from the Pollaczek-Khinchine form.

    Built from the transform of ``B^e`` only, independently of the
    matrix-geometric supremum; inverting it cross-checks :func:`ruin_discard`
    and :func:`ruin_replace`.
    """
    s = np.asarray(s, dtype=complex)
    load = (1.0 - m.eps) * m.delta if which == "discard" else m.delta
    be = m.ph_excess.laplace(s)
    return (1.0 - (1.0 - load) / (1.0 - load * be)) / s


# -- series terms -------------------------------------------------------------

def discard_L(m: RiskModel, n: int, u: float) -> float:
    """``P(M_0 + ... + M_n + C^e_1 + ... + C^e_n > u)`` for the discard supremum."""
    if n > MAX_SERIES_ORDER:
        raise UnsupportedError(f"series order {n} exceeds {MAX_SERIES_ORDER}")
    return conv_tail_multi(m.discard_power(n + 1), m.heavy_excess, n, u)


def discard_series(m: RiskModel, order: int, u: float) -> list[float]:
    """Partial sums of the discard expansion up to ``order`` (at most 3).

    Entry ``k`` is ``psi_d(u) + sum_{n=1..k} p^n (L_n(u) - L_{n-1}(u))``.
    """
    if order < 0:
        raise ValidationError("order must be >= 0")
    if order > MAX_SERIES_ORDER:
        raise UnsupportedError(f"series order {order} exceeds {MAX_SERIES_ORDER}")
    _require(m, "discard")
    p = m.p_eps
    prev = float(ruin_discard(m, u))
    sums = [prev]
    for n in range(1, order + 1):
        cur = discard_L(m, n, u)
        sums.append(sums[-1] + p**n * (cur - prev))
        prev = cur
    return sums


def replace_L(m: RiskModel, s: int, mh: int, r: int, u: float) -> float:
    """``P(M_0 + ... + M_s + C^e_1 + ... + C^e_mh + B^e_1 + ... + B^e_r > u)``."""
    if min(s, mh, r) < 0:
        raise ValidationError("counts must be >= 0")
    if mh > MAX_SERIES_ORDER:
        raise UnsupportedError(f"heavy depth {mh} exceeds {MAX_SERIES_ORDER}")
    light = ph_convolve(m.replace_power(s + 1), ph_convolve_power(m.ph_excess, r))
    return conv_tail_multi(light, m.heavy_excess, mh, u)


def replace_series(m: RiskModel, order: int, u: float) -> list[float]:
    """Partial sums of the replace expansion up to ``order`` (at most 3)."""
    if order > MAX_SERIES_ORDER:
        raise UnsupportedError(f"series order {order} exceeds {MAX_SERIES_ORDER}")
    d, th, e = m.delta, m.theta, m.eps
    sums = [float(ruin_replace(m, u))]
    for n in range(1, order + 1):
        term = 0.0
        for k in range(n):
            w = math.comb(n - 1, k) * th**k * (-d) ** (n - 1 - k)
            base = replace_L(m, n - 1, k, n - 1 - k, u)
            term += w * (th * (replace_L(m, n, k + 1, n - 1 - k, u) - base)
                         - d * (replace_L(m, n, k, n - k, u) - base))
        sums.append(sums[-1] + (e / (1.0 - d)) ** n * term)
    return sums


# -- corrected approximations ---------------------------------------------------

def _discard_parts(m, u):
    base = float(ruin_discard(m, u))
    return base, conv_tail(m.discard_power(2), m.heavy_excess, u)


def _replace_parts(m, u):
    base = float(ruin_replace(m, u))
    heavy = conv_tail(m.replace_power(2), m.heavy_excess, u)
    light = float(_replace_pair_excess(m).tail(u))
    return base, heavy, light


def _replace_pair_excess(m: RiskModel) -> PhaseTypeDist:
    cache = m.__dict__.setdefault("_powers", {})
    if "pair_excess" not in cache:
        cache["pair_excess"] = ph_convolve(m.replace_power(2), m.ph_excess)
    return cache["pair_excess"]


def corrected_discard(m: RiskModel, u):
    """Discard base model plus its first correction term."""
    _require(m, "discard")
    p = m.p_eps

    def one(x):
        base, heavy = _discard_parts(m, x)
        return base + p * (heavy - base)

    return _grid_map(one, u)


def corrected_replace(m: RiskModel, u):
    """Replace base model plus its first-order correction terms."""
    _require(m, "replace")
    d, th, e = m.delta, m.theta, m.eps

    def one(x):
        base, heavy, light = _replace_parts(m, x)
        return base + e * th / (1.0 - d) * (heavy - base) - e * d / (1.0 - d) * (light - base)

    return _grid_map(one, u)


def adjusted_coefficients(m: RiskModel, which: str) -> tuple[float, ...]:
    """Coefficients of the tail-adjusted corrected approximations.

    The heavy correction gets ``c = eps theta / (1 - delta + eps delta - eps
    theta)``, the tail constant of the exact ruin probability. For the
    replace variant the light correction is rescaled by the same factor. The
    base term is then scaled so the value at zero is ``rho_eps``.

    Returns ``(base, heavy)`` for discard and ``(base, heavy, light)`` for
    replace.
    """
    d, th, e = m.delta, m.theta, m.eps
    c = e * th / (1.0 - d + e * d - e * th)
    if which == "discard":
        rho_d = (1.0 - e) * d
        return ((m.rho - c * (1.0 - rho_d)) / rho_d, c)
    if which == "replace":
        light = e * d / (1.0 - d + e * d - e * th)
        return ((m.rho - (c - light) * (1.0 - d)) / d, c, light)
    raise ValidationError("which must be 'discard' or 'replace'")


def corrected_adjusted(m: RiskModel, u, which: str = "discard"):
    """Corrected approximation with tail-matching coefficients, exact at zero."""
    _require(m, which)
    coef = adjusted_coefficients(m, which)

    def one(x):
        if which == "discard":
            base, heavy = _discard_parts(m, x)
            return coef[0] * base + coef[1] * (heavy - base)
        base, heavy, light = _replace_parts(m, x)
        return coef[0] * base + coef[1] * (heavy - base) - coef[2] * (light - base)

    return _grid_map(one, u)


# -- error bounds -----------------------------------------------------------------

def discard_error_bounds(m: RiskModel, u):
    """``(lower, upper)`` bracket for ``psi(u) - corrected_discard(u)``.

    ``lower = p^2 (L_2(u) - L_1(u))`` and ``upper = p^2``.
    """
    _require(m, "discard")
    p2 = m.p_eps**2

    def one(x):
        return p2 * max(discard_L(m, 2, x) - discard_L(m, 1, x), 0.0)

    return _grid_map(one, u), p2


def replace_error_bound(m: RiskModel) -> float:
    """Uniform bound on ``|psi(u) - corrected_replace(u)|``.

    Raises
    ------
    ConditionError
        When ``eps >= |1 - delta| / (delta + theta)``.
    """
    d, th, e = m.delta, m.theta, m.eps
    if e == 0.0:
        return 0.0
    if not e < abs(1.0 - d) / (d + th):
        raise ConditionError("bound needs eps < |1 - delta| / (delta + theta)")
    return (e / (1.0 - d)) ** 2 * (d + th) ** 2 * (1.0 - d) / (1.0 - d - e * (d + th))


# -- tails ------------------------------------------------------------------------

def tail_coefficient(m: RiskModel, which: str = "exact") -> float:
    """Constant ``k`` in ``psi(u) ~ k P(C^e > u)`` for the chosen quantity."""
    d, th, e = m.delta, m.theta, m.eps
    if which == "exact":
        return e * th / (1.0 - d + e * d - e * th)
    if which == "corrected_discard":
        return e * th / (1.0 - d + e * d)
    if which == "corrected_replace":
        return e * th / (1.0 - d)
    raise ValidationError("which must be 'exact', 'corrected_discard' or 'corrected_replace'")


def tail_asymptote(m: RiskModel, u, which: str = "exact"):
    return tail_coefficient(m, which) * np.asarray(m.heavy.excess_tail(u)) if np.ndim(u) else \
        tail_coefficient(m, which) * float(m.heavy.excess_tail(u))


def relative_error_limits(m: RiskModel) -> tuple[float, float]:
    """Limits of the relative tail error: corrected discard, and |corrected replace|."""
    d, th, e = m.delta, m.theta, m.eps
    return e * th / (1.0 - d + e * d), abs(e * (th - d) / (1.0 - d))


@dataclass(frozen=True)
class RelativeBoundTerm:
    """Computable leading part ``p H(u)`` of the discard relative-error bound.

    The ``O(eps^2)`` remainder has a constant that is not computed;
    ``remainder`` is therefore always ``None``.
    """

    leading: float
    h_value: float
    remainder: None = None
    note: str = "unquantified O(eps^2) remainder"


def discard_relative_bound_term(m: RiskModel, u: float) -> RelativeBoundTerm:
    """``p H(u)`` with ``H(u) = L_2(u) / L_1(u) - 1``."""
    _require(m, "discard")
    l1 = discard_L(m, 1, u)
    l2 = conv_tail_multi(m.discard_power(3), m.heavy_excess, 2, u)
    h = l2 / l1 - 1.0 if l1 > 0 else 0.0
    return RelativeBoundTerm(m.p_eps * h, h)


# -- report -----------------------------------------------------------------------

REPORT_COLUMNS = ("u", "exact", "discard", "replace", "corrected_discard", "corrected_replace",
                  "adjusted_d", "adjusted_r", "asymptote", "lower_bound", "upper_bound")


@dataclass(frozen=True)
class ApproximationReport:
    """All approximations of one model on a grid of capitals."""

    u: np.ndarray
    columns: dict[str, np.ndarray]
    conditions: ConditionReport
    params: dict[str, float]
    replace_bound: float | None = None

    def rows(self):
        for i, x in enumerate(self.u):
            yield [x] + [self.columns[c][i] if c in self.columns else None for c in REPORT_COLUMNS[1:]]

    def replace_overestimates(self) -> np.ndarray | None:
        """Where corrected replace lies above the exact value (needs an exact column).

        No general rule for the sign is known, so it is only reported.
        """
        if "exact" not in self.columns:
            return None
        return self.columns["corrected_replace"] > self.columns["exact"]

    def to_csv(self, digits: int = 9) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for row in self.rows():
            w.writerow(["" if v is None else f"{v:.{digits}g}" for v in row])
        return buf.getvalue()

    def to_json(self) -> str:
        data = {
            "params": self.params,
            "conditions": self.conditions.as_dict(),
            "replace_bound": self.replace_bound,
            "u": self.u.tolist(),
            "columns": {k: v.tolist() for k, v in self.columns.items()},
        }
        over = self.replace_overestimates()
        if over is not None:
            data["replace_overestimates"] = over.tolist()
        return json.dumps(data, indent=2, sort_keys=True)


def model_summary(m: RiskModel) -> dict[str, float]:
    return {"lambda": m.lam, "eps": m.eps, "delta": m.delta, "theta": m.theta,
            "rho_eps": m.rho, "p_eps": m.p_eps}


def approximation_report(m: RiskModel, u, exact: Callable | None = None,
                         bounds: bool = True) -> ApproximationReport:
    """Evaluate every approximation on the grid ``u``.

    ``exact`` is an optional callable giving the exact ruin probability.
    Lower bounds need a two-fold heavy convolution and are skipped when
    ``bounds`` is false.
    """
    rep = check_conditions(m)
    if not rep.all_pass:
        raise ConditionError("; ".join(rep.messages))
    u = np.asarray(u, dtype=float)
    cols: dict[str, np.ndarray] = {}
    if exact is not None:
        cols["exact"] = np.asarray(exact(u), dtype=float)
    cols["discard"] = np.asarray(ruin_discard(m, u))
    cols["replace"] = np.asarray(ruin_replace(m, u))
    cols["corrected_discard"] = np.asarray(corrected_discard(m, u))
    cols["corrected_replace"] = np.asarray(corrected_replace(m, u))
    cols["adjusted_d"] = np.asarray(corrected_adjusted(m, u, "discard"))
    cols["adjusted_r"] = np.asarray(corrected_adjusted(m, u, "replace"))
    cols["asymptote"] = np.asarray(tail_asymptote(m, u, "exact"))
    if bounds:
        lower, upper = discard_error_bounds(m, u)
        cols["lower_bound"] = np.asarray(lower)
        cols["upper_bound"] = np.full(u.shape, upper)
    rb = replace_error_bound(m) if rep.replace_bound else None
    return ApproximationReport(u, cols, rep, model_summary(m), rb)
