"""Command-line interface.

Tasks
-----
exact-table   closed-form ruin probability on a capital grid
approx-table  exact value (when available) and every approximation
var-table     value at risk of the aggregate loss over several horizons
curve         one approximation bundle per load, for plotting
check         seeded property suite

Every artifact starts with ``#`` lines echoing the resolved parameters and
condition flags. Numbers are written with 9 significant digits, so reruns
with the same configuration are byte-identical.

Exit codes: 0 ok, 2 configuration error, 3 condition failure, 4 numeric
consistency failure (including property violations in ``check``).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import kernels
from .aggregate import (
    agg_ph_tail, agg_ph_tail_checked, corrected_discard_agg, var_quantile,
)
from .checks import run_checks
from .errors import (
    ConditionError, ConvergenceError, CorrPHError, NumericError, StabilityError,
    ValidationError,
)
from .exact import exact_ruin, solve_exact
from .heavy import AbateWhitt, Lomax
from .montecarlo import SimConfig, simulate_aggregate
from .phasetype import exponential
from .ruin import (
    RiskModel, approximation_report, check_conditions, model_summary,
)

EXIT_OK, EXIT_CONFIG, EXIT_CONDITION, EXIT_NUMERIC = 0, 2, 3, 4
DIGITS = 9
TASKS = ("exact-table", "approx-table", "var-table", "curve", "check")

# Defaults: exponential(3) and Abate-Whitt(2) claims for the ruin tasks,
# exponential(3/2) and Lomax(1, 2) claims for the aggregate-loss task.
RUIN_DEFAULT = {
    "rho": 0.5, "eps": 0.001,
    "ph": exponential(3.0).to_dict(),
    "heavy": AbateWhitt(2.0).to_dict(),
}
CURVE_DEFAULT = dict(RUIN_DEFAULT, eps=0.1)
VAR_DEFAULT = {
    "lam": 1.0, "eps": 0.01,
    "ph": exponential(1.5).to_dict(),
    "heavy": Lomax(1.0, 2.0).to_dict(),
}
DEFAULT_GRID = {"exact-table": "0:10:11", "approx-table": "0:10:11", "curve": "0:20:81"}
DEFAULT_HORIZONS = (1.0, 5.0, 10.0, 15.0, 20.0)
DEFAULT_LOADS = (0.5, 0.7, 0.9)


# -- configuration ---------------------------------------------------------------

def parse_grid(spec: str) -> np.ndarray:
    """Parse ``"start:stop:points[:log]"`` into a strictly increasing grid."""
    parts = spec.split(":")
    if len(parts) not in (3, 4) or (len(parts) == 4 and parts[3] != "log"):
        raise ValidationError(f"grid: expected 'start:stop:points[:log]', got {spec!r}")
    try:
        start, stop, points = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ValidationError(f"grid: non-numeric field in {spec!r}") from None
    if points < 1:
        raise ValidationError("grid: points must be >= 1")
    if start < 0:
        raise ValidationError("grid: start must be >= 0")
    if points > 1 and not stop > start:
        raise ValidationError("grid: stop must exceed start")
    if len(parts) == 4:
        if start <= 0:
            raise ValidationError("grid: a log grid needs start > 0")
        return np.geomspace(start, stop, points)
    return np.linspace(start, stop, points)


def _get(section: dict, key: str, path: str, kind, default=None):
    if key not in section:
        if default is None:
            raise ValidationError(f"{path}.{key}: required field missing")
        return default
    try:
        return kind(section[key])
    except (TypeError, ValueError):
        raise ValidationError(f"{path}.{key}: cannot read {section[key]!r} as {kind.__name__}") from None


@dataclass
class RunConfig:
    task: str
    model: dict[str, Any]
    grid: np.ndarray | None = None
    horizons: tuple[float, ...] = DEFAULT_HORIZONS
    loads: tuple[float, ...] = DEFAULT_LOADS
    alpha: float = 0.99
    sim: SimConfig = field(default_factory=lambda: SimConfig(samples=10_000_000))
    simulate: bool = True
    bounds: bool = True
    cases: int = 50
    ci_level: float = 0.95

    def risk_model(self) -> RiskModel:
        try:
            return RiskModel.from_dict(self.model)
        except ValidationError as exc:
            raise ValidationError(f"model: {exc}") from None


def _model_default(task):
    return {"var-table": VAR_DEFAULT, "curve": CURVE_DEFAULT}.get(task, RUIN_DEFAULT)


def build_config(args: argparse.Namespace) -> RunConfig:
    """Merge defaults, the optional JSON file and command-line flags."""
    raw: dict[str, Any] = {}
    if args.config:
        try:
            raw = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise ValidationError(f"config: cannot read {args.config}: {exc.strerror}") from None
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config: invalid JSON ({exc})") from None
        if not isinstance(raw, dict):
            raise ValidationError("config: top level must be an object")
    task = args.task
    model = raw.get("model", _model_default(task))
    if not isinstance(model, dict):
        raise ValidationError("model: must be an object")
    cfg = RunConfig(task=task, model=model)

    grid = args.grid or raw.get("grid") or DEFAULT_GRID.get(task)
    if grid is not None:
        cfg.grid = parse_grid(str(grid))
    if "horizons" in raw:
        cfg.horizons = tuple(_floats(raw["horizons"], "horizons"))
    if "loads" in raw:
        cfg.loads = tuple(_floats(raw["loads"], "loads"))
        if any(not 0.0 < r < 1.0 for r in cfg.loads):
            raise ValidationError("loads: every load must lie in (0, 1)")
    alpha = args.alpha if args.alpha is not None else raw.get("alpha", cfg.alpha)
    try:
        cfg.alpha = float(alpha)
    except (TypeError, ValueError):
        raise ValidationError(f"alpha: cannot read {alpha!r} as float") from None
    if not 0.0 < cfg.alpha < 1.0:
        raise ValidationError("alpha: must lie in (0, 1)")

    sim = raw.get("sim", {})
    if not isinstance(sim, dict):
        raise ValidationError("sim: must be an object")
    seed = args.seed if args.seed is not None else _get(sim, "seed", "sim", int, cfg.sim.seed)
    samples = args.samples if args.samples is not None else _get(sim, "samples", "sim", int, cfg.sim.samples)
    streams = _get(sim, "streams", "sim", int, cfg.sim.streams)
    try:
        cfg.sim = SimConfig(seed=seed, samples=samples, streams=streams)
    except ValidationError as exc:
        raise ValidationError(f"sim: {exc}") from None
    cfg.simulate = not args.no_sim and bool(sim.get("enabled", True))
    cfg.bounds = not args.no_bounds
    cfg.cases = args.cases
    cfg.ci_level = args.ci_level
    if not 0.0 < cfg.ci_level < 1.0:
        raise ValidationError("ci-level: must lie in (0, 1)")
    return cfg


def _floats(values, name):
    if not isinstance(values, list) or not values:
        raise ValidationError(f"{name}: expected a non-empty list of numbers")
    try:
        out = [float(v) for v in values]
    except (TypeError, ValueError):
        raise ValidationError(f"{name}: expected numbers") from None
    if any(b <= a for a, b in zip(out, out[1:])):
        raise ValidationError(f"{name}: must be strictly increasing")
    return out


# -- formatting ------------------------------------------------------------------

def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, str):
        return v
    return f"{float(v):.{DIGITS}g}"


def header(task: str, m: RiskModel | None, extra: dict[str, Any] | None = None) -> str:
    lines = [f"# task: {task}"]
    if m is not None:
        lines.append("# " + " ".join(f"{k}={_fmt(v)}" for k, v in model_summary(m).items()))
        lines.append("# conditions: " + " ".join(f"{k}={v}" for k, v in check_conditions(m).as_dict().items()))
    for k, v in (extra or {}).items():
        lines.append(f"# {k}: {v}")
    return "\n".join(lines) + "\n"


def table(columns: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def exact_solver(m: RiskModel):
    """Closed-form ruin probability of ``m``, or ``None`` when the model has none.

    Available for a single exponential phase without atom and Abate-Whitt
    heavy claims.
    """
    ph = m.ph
    if not (isinstance(m.heavy, AbateWhitt) and ph.n_phases == 1 and ph.atom == 0.0):
        return None
    sol = solve_exact(m.heavy.mu, float(-ph.subgen[0, 0]), m.lam, m.eps)
    return lambda u: exact_ruin(sol, u)


def _require_conditions(m: RiskModel):
    rep = check_conditions(m)
    if not rep.stable:
        raise StabilityError("; ".join(rep.messages))
    if not rep.all_pass:
        failed = [msg for msg in rep.messages if not msg.startswith("replace error")]
        raise ConditionError("; ".join(failed))


# -- tasks ------------------------------------------------------------------------

def task_exact_table(cfg: RunConfig) -> str:
    m = cfg.risk_model()
    solver = exact_solver(m)
    if solver is None:
        raise ValidationError("model: exact-table needs exponential phase-type and abate_whitt heavy claims")
    if m.rho >= 1.0:
        raise StabilityError(f"load rho_eps = {m.rho:.6g} is not below 1")
    vals = solver(cfg.grid)
    return header(cfg.task, m) + table(["u", "exact"], zip(cfg.grid, np.atleast_1d(vals)))


def task_approx_table(cfg: RunConfig) -> str:
    m = cfg.risk_model()
    _require_conditions(m)
    rep = approximation_report(m, cfg.grid, exact=exact_solver(m), bounds=cfg.bounds)
    extra = {"replace_error_bound": _fmt(rep.replace_bound)}
    return header(cfg.task, m, extra) + rep.to_csv(DIGITS)


def task_curve(cfg: RunConfig) -> dict[float, str]:
    base = cfg.risk_model()
    out = {}
    for load in cfg.loads:
        m = RiskModel.from_load(load, base.eps, base.ph, base.heavy)
        _require_conditions(m)
        exact = exact_solver(m)
        cols = ["u"] + (["exact"] if exact else []) + [
            "discard", "replace", "corrected_discard", "corrected_replace"]
        rep = approximation_report(m, cfg.grid, exact=exact, bounds=False)
        rows = zip(cfg.grid, *(rep.columns[c] for c in cols[1:]))
        out[load] = header(cfg.task, m, {"load": _fmt(load)}) + table(cols, rows)
    return out


def var_rows(cfg: RunConfig, m: RiskModel):
    """One row per horizon: analytic VaRs and, optionally, the simulated one with its CI."""
    rows = []
    for t in cfg.horizons:
        disc = var_quantile(lambda x: agg_ph_tail(m.lam, m.eps, m.ph, t, x), cfg.alpha).value
        chk = agg_ph_tail_checked(m.lam, m.eps, m.ph, t, disc)
        if not chk.reliable:
            raise NumericError(f"aggregate tail routes disagree at t={t}: "
                               f"{chk.inversion:.12g} vs {chk.truncation:.12g}")
        corr = var_quantile(lambda x: corrected_discard_agg(m.lam, m.eps, m.ph, m.heavy, t, x),
                            cfg.alpha).value
        if cfg.simulate:
            emp = simulate_aggregate(m, t, cfg.sim)
            lo, hi = emp.quantile_ci(cfg.alpha, cfg.ci_level)
            rows.append([t, emp.quantile(cfg.alpha), disc, corr, lo, hi])
        else:
            rows.append([t, disc, corr])
    return rows


def task_var_table(cfg: RunConfig) -> str:
    m = cfg.risk_model()
    if m.eps >= 1.0:
        raise ConditionError("var-table needs eps < 1")
    cols = ["t", "discard", "corrected_discard"]
    extra = {"alpha": _fmt(cfg.alpha)}
    if cfg.simulate:
        cols = ["t", "simulation", "discard", "corrected_discard", "sim_ci_low", "sim_ci_high"]
        extra["simulation"] = (f"seed={cfg.sim.seed} samples={cfg.sim.samples} "
                               f"streams={cfg.sim.streams} ci_level={_fmt(cfg.ci_level)} "
                               f"backend={kernels.BACKEND}")
    return header(cfg.task, m, extra) + table(cols, var_rows(cfg, m))


def task_check(cfg: RunConfig) -> tuple[str, bool]:
    results = run_checks(seed=cfg.sim.seed, cases=cfg.cases)
    rows = [[r.name, str(r.cases), str(len(r.violations)), "PASS" if r.ok else "FAIL"] for r in results]
    text = header(cfg.task, None, {"seed": cfg.sim.seed, "cases": cfg.cases})
    text += table(["check", "cases", "violations", "status"], rows)
    for r in results:
        for msg in r.violations[:5]:
            text += f"# {r.name}: {msg}\n"
    return text, all(r.ok for r in results)


# -- entry point -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="JSON run configuration")
    common.add_argument("--out", metavar="PATH", help="output file (default: stdout)")
    common.add_argument("--seed", type=int, help="master seed for simulation and checks")
    common.add_argument("--grid", metavar="SPEC", help="capital grid 'start:stop:points[:log]'")
    common.add_argument("--alpha", type=float, help="VaR level (default 0.99)")
    common.add_argument("--samples", type=int, help="simulation sample size")
    common.add_argument("--no-sim", action="store_true", help="skip the simulation column")
    common.add_argument("--no-bounds", action="store_true", help="skip the two-fold convolution bounds")
    common.add_argument("--cases", type=int, default=50, help="random cases per property check")
    common.add_argument("--ci-level", type=float, default=0.95, help="confidence level of quantile CIs")

    parser = argparse.ArgumentParser(prog="corrph", description=__doc__.split("\n\n")[0])
    sub = parser.add_subparsers(dest="task", required=True)
    helps = {
        "exact-table": "closed-form ruin probabilities",
        "approx-table": "ruin probability approximations on a grid",
        "var-table": "aggregate-loss value at risk by horizon",
        "curve": "approximation curves for several loads",
        "check": "run the property suite",
    }
    for name in TASKS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return parser


def _write(path: str | None, text: str):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _curve_path(out: str, load: float) -> str:
    p = Path(out)
    return str(p.with_name(f"{p.stem}_rho{load:g}{p.suffix}"))


def run(args: argparse.Namespace) -> int:
    cfg = build_config(args)
    if cfg.task == "exact-table":
        _write(args.out, task_exact_table(cfg))
    elif cfg.task == "approx-table":
        _write(args.out, task_approx_table(cfg))
    elif cfg.task == "var-table":
        _write(args.out, task_var_table(cfg))
    elif cfg.task == "curve":
        bundles = task_curve(cfg)
        if args.out is None:
            _write(None, "".join(bundles.values()))
        else:
            for load, text in bundles.items():
                _write(_curve_path(args.out, load), text)
    else:
        text, ok = task_check(cfg)
        _write(args.out, text)
        return EXIT_OK if ok else EXIT_NUMERIC
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return run(args)
    except (ConditionError, StabilityError) as exc:
        print(f"corrph: condition failure: {exc}", file=sys.stderr)
        return EXIT_CONDITION
    except (NumericError, ConvergenceError) as exc:
        print(f"corrph: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (CorrPHError, OSError) as exc:
        print(f"corrph: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
