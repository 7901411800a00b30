"""Quantile-based fixed-budget best-arm identification."""

from ._core import (
    ComplexityReport,
    ComplexityTerm,
    ConfigError,
    DistributionSpec,
    Environment,
    ErrorEstimate,
    GapProfile,
    OsBoundParams,
    PhaseSchedule,
    QuantileBoundParams,
    QuantileLevel,
    RngStream,
    RunOutcome,
    __version__,
    build_schedule,
    empirical_quantile,
    estimate_bias_constant,
    evaluate,
    gaps,
    ingest_arm_data,
    invert_left_radius,
    invert_right_radius,
    log_bar,
    log_tilde,
    min_budget,
    os_left_radius,
    os_right_radius,
    preset_environment,
    problem_complexity,
    qsar_error_bound,
    quantile_epsilon_bound,
    quantile_n_form_bound,
    quantile_n_form_bound_unrestricted,
    quantile_radii,
    rank_for,
    run_policy,
    spacing,
    true_optimal_set,
)

__all__ = [name for name in dir() if not name.startswith("_")] + ["__version__"]
