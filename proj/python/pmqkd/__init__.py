from ._core import (
    ConfigError,
    DegenerateChannelError,
    PolarizationState,
    SystemParams,
    arm_transmittances,
    basis_states,
    bessel_i0,
    binary_entropy,
    bloch_state,
    cutoff_distance,
    end_to_end_transmittance,
    inner_product,
    keyrate_bb84,
    keyrate_polarization,
    norm_squared,
    optimize_mu,
    simulate,
    sweep,
)

__all__ = [
    "ConfigError",
    "DegenerateChannelError",
    "PolarizationState",
    "SystemParams",
    "arm_transmittances",
    "basis_states",
    "bessel_i0",
    "binary_entropy",
    "bloch_state",
    "cutoff_distance",
    "end_to_end_transmittance",
    "inner_product",
    "keyrate_bb84",
    "keyrate_polarization",
    "norm_squared",
    "optimize_mu",
    "simulate",
    "sweep",
]
