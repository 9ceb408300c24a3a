"""Data-driven lower bounds on the structured singular value."""

from ._muprobe import (
    BlockStructure,
    ConfigError,
    DimensionError,
    StateSpaceModel,
    dft_standard,
    dft_time_reversed,
    diag_scaling_upper_bound,
    estimate,
    exact_single_full,
    exact_single_repeated_scalar,
    freq_response,
    hinf_grid,
    idft_standard,
    idft_time_reversed,
    model_mu_over_grid,
    model_power_iteration,
    random_search_lower_bound,
    random_stable,
    simulate_periodic,
    transpose_model,
    update_b,
    update_z,
)

__version__ = "0.1.0"

__all__ = [
    "BlockStructure",
    "ConfigError",
    "DimensionError",
    "StateSpaceModel",
    "dft_standard",
    "dft_time_reversed",
    "diag_scaling_upper_bound",
    "estimate",
    "exact_single_full",
    "exact_single_repeated_scalar",
    "freq_response",
    "hinf_grid",
    "idft_standard",
    "idft_time_reversed",
    "model_mu_over_grid",
    "model_power_iteration",
    "random_search_lower_bound",
    "random_stable",
    "simulate_periodic",
    "transpose_model",
    "update_b",
    "update_z",
]
