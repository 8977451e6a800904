"""Fractional-SDE simulation and nonparametric drift estimation.

Thin wrapper over the compiled extension; all numerics live in C++.
"""

from ._core import (  # noqa: F401
    density_estimate,
    drift_estimate_eps,
    drift_estimate_eps_observed,
    drift_estimate_skorokhod,
    fbm_covariance,
    hermite_poly,
    mehler_check,
    pathwise_estimate,
    run_experiment,
    sample_fbm,
    schedule_eval,
    solve_coupled,
    solve_euler,
    stationary_ou_path,
    stationary_std_oracle,
    young_integral,
)

__all__ = [
    "density_estimate",
    "drift_estimate_eps",
    "drift_estimate_eps_observed",
    "drift_estimate_skorokhod",
    "fbm_covariance",
    "hermite_poly",
    "mehler_check",
    "pathwise_estimate",
    "run_experiment",
    "sample_fbm",
    "schedule_eval",
    "solve_coupled",
    "solve_euler",
    "stationary_ou_path",
    "stationary_std_oracle",
    "young_integral",
]
