"""Bernoulli sieve occupancy simulation and limit-law numerics.

Simulates the stick-breaking balls-in-boxes scheme and its perturbed
random walk, computes the regime-dependent centering/scaling constants
and limit laws for the occupancy count, and verifies the limit theorems
by deterministic Monte Carlo against analytic oracles.
"""

from .distributions import (
    DistributionSpec,
    MomentSet,
    Regime,
    TailProfile,
    beta_theta_one,
    classify_regime,
    example_gamma,
    moments,
    pareto_log_tail,
    parse_law,
    tsm2,
    user_table,
)
from .errors import (
    BinomialCapExceeded,
    DistributionError,
    InversionFailure,
    KindMismatch,
    QuadratureFailure,
    RegimeMismatch,
    SieveError,
    SolverFailure,
    Unclassifiable,
)
from .limits import (
    LawKind,
    LimitLaw,
    Normalization,
    centering_b,
    g_kernel,
    gil_pelaez_cdf,
    limit_cdf,
    limit_law_for,
    ml_moment,
    normalization_for,
    quantile_r,
    scaling_a,
    solve_c,
    truncated_mean_m,
)
from .mc import (
    EmpiricalSample,
    ExperimentPlan,
    ks_distance,
    ks_two_sample,
    moment_compare,
    run_experiment,
    summary_dict,
    write_csv,
)
from .processes import (
    Fixed,
    OccupancyResult,
    PathFunctionals,
    Poisson,
    StickBreakingStream,
    conditional_mean_R,
    conditional_variance,
    simulate_occupancy_fixed,
    simulate_occupancy_poisson,
    walk_functionals,
    weighted_sum_R,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "DistributionSpec", "MomentSet", "Regime", "TailProfile",
    "beta_theta_one", "classify_regime", "example_gamma", "moments",
    "pareto_log_tail", "parse_law", "tsm2", "user_table",
    "SieveError", "DistributionError", "Unclassifiable", "RegimeMismatch",
    "QuadratureFailure", "SolverFailure", "InversionFailure",
    "KindMismatch", "BinomialCapExceeded",
    "LawKind", "LimitLaw", "Normalization", "centering_b", "g_kernel",
    "gil_pelaez_cdf", "limit_cdf", "limit_law_for", "ml_moment",
    "normalization_for", "quantile_r", "scaling_a", "solve_c",
    "truncated_mean_m",
    "EmpiricalSample", "ExperimentPlan", "ks_distance", "ks_two_sample",
    "moment_compare", "run_experiment", "summary_dict", "write_csv",
    "Fixed", "Poisson", "OccupancyResult", "PathFunctionals",
    "StickBreakingStream", "conditional_mean_R", "conditional_variance",
    "simulate_occupancy_fixed", "simulate_occupancy_poisson",
    "walk_functionals", "weighted_sum_R",
]
