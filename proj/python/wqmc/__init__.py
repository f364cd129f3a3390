"""Weighted quasi-Monte Carlo integration against unnormalized densities."""

from ._wqmc import (
    ConfigError,
    Error,
    NumericalError,
    ParameterError,
    adaptive_surrogate,
    banana_log_density,
    converge,
    fit_slope,
    genz,
    is_net,
    posterior,
    quadrature_expectation,
    auto_delta,
    select_and_allocate,
    sobol,
    solve_ode,
    surrogate_expectations,
    surrogate_value,
    synth_data,
)

__all__ = [
    "ConfigError",
    "Error",
    "NumericalError",
    "ParameterError",
    "adaptive_surrogate",
    "banana_log_density",
    "converge",
    "fit_slope",
    "genz",
    "is_net",
    "posterior",
    "quadrature_expectation",
    "auto_delta",
    "select_and_allocate",
    "sobol",
    "solve_ode",
    "surrogate_expectations",
    "surrogate_value",
    "synth_data",
]
