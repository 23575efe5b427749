"""Adaptive step-to-step walking controller (Python bindings)."""

from ._core import (
    ConfigError,
    DegenerateFeedforwardError,
    RiccatiDivergenceError,
    SingularModelError,
    UncontrollableModelError,
    bias_equilibrium,
    builtin_config,
    builtin_scenario_names,
    deadbeat_gain,
    dlqr,
    horizon_update,
    integrate_step,
    metrics_csv_columns,
    nominal_orbit,
    p1_fixed_point,
    projection_update,
    run_config,
    run_scenario,
    s2s_matrices,
    step_csv_columns,
)

__all__ = [
    "ConfigError",
    "DegenerateFeedforwardError",
    "RiccatiDivergenceError",
    "SingularModelError",
    "UncontrollableModelError",
    "bias_equilibrium",
    "builtin_config",
    "builtin_scenario_names",
    "deadbeat_gain",
    "dlqr",
    "horizon_update",
    "integrate_step",
    "metrics_csv_columns",
    "nominal_orbit",
    "p1_fixed_point",
    "projection_update",
    "run_config",
    "run_scenario",
    "s2s_matrices",
    "step_csv_columns",
]
