"""Corrected phase-type approximations for ruin probabilities and aggregate losses
when a small fraction of claims is heavy-tailed.
"""
from .errors import (
    ConditionError, ConvergenceError, CorrPHError, DomainError, NumericError, ParameterError,
    RepresentationSizeError, StabilityError, UnsupportedError, ValidationError,
)
from .phasetype import (
    PhaseTypeDist, erlang, exponential, hyperexponential, ph_convolve, ph_convolve_power,
    ph_laplace, ph_moment, ph_pk_supremum, ph_stationary_excess, ph_tail, point_mass_zero,
)
from .heavy import (
    AbateWhitt, HeavyTailModel, Lomax, heavy_from_dict, ht_excess_tail, ht_laplace, ht_sample,
    ht_sample_excess, ht_tail,
)
from .exact import ExactSolution, exact_load, exact_ruin, exact_transform, lambda_for_rho, solve_exact
from .ruin import (
    ApproximationReport, ConditionReport, RiskModel, adjusted_coefficients, approximation_report,
    check_conditions, corrected_adjusted, corrected_discard, corrected_replace, discard_L,
    discard_error_bounds, discard_series, exponential_abate_whitt, relative_error_limits,
    replace_L, replace_error_bound, replace_series, ruin_discard, ruin_replace, tail_asymptote,
    tail_coefficient,
)
from .aggregate import (
    CompoundPoissonPH, HorizonSpec, agg_error_bounds, agg_ph_tail, agg_ph_tail_checked,
    corrected_discard_agg, discard_agg, mixed_poisson_lst, mixed_poisson_tail, var_quantile,
)
from .montecarlo import Empirical, SimConfig, sample_claim, simulate_aggregate, simulate_supremum
from .kernels import BACKEND

__version__ = "0.1.0"
