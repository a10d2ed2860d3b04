"""Symmetry tests for the innovations of an autoregression."""

import json as _json

from ._core import (
    ConfigError,
    NumericError,
    asymptotic_power,
    chi_sq,
    chisq_critical_value,
    d_stat,
    noncentral_chisq_cdf,
    noncentrality,
    ols_fit,
    omega_critical_value,
    omega_sq,
    run_experiment,
    simulate_ar,
)

__all__ = [
    "ConfigError",
    "NumericError",
    "asymptotic_power",
    "chi_sq",
    "chisq_critical_value",
    "d_stat",
    "noncentral_chisq_cdf",
    "noncentrality",
    "ols_fit",
    "omega_critical_value",
    "omega_sq",
    "run_experiment",
    "run_experiment_dict",
    "simulate_ar",
]


def run_experiment_dict(config_path, workers=1):
    """Like run_experiment but parses the JSON result into a dict."""
    return _json.loads(run_experiment(config_path, workers=workers))
