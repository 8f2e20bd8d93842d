"""Event-driven stochastic simulation and calibration of metastable-switch memristors."""

from ._core import (
    ConfigError,
    DeviceParams,
    DomainError,
    DriftOutOfRange,
    FitInfeasible,
    PiecewiseSignal,
    SimConfig,
    advance_first_order,
    base_rates,
    build_signal,
    cli,
    equilibrium_n,
    fit_linear_conductance,
    fit_va_constant_rate,
    invert_readout,
    predict_delta_r,
    quantise,
    readout,
    resample,
    run_ensemble,
    simulate,
    thermal_voltage,
    v_off_from_equilibrium,
)

__all__ = [
    "ConfigError",
    "DeviceParams",
    "DomainError",
    "DriftOutOfRange",
    "FitInfeasible",
    "PiecewiseSignal",
    "SimConfig",
    "advance_first_order",
    "base_rates",
    "build_signal",
    "cli",
    "equilibrium_n",
    "fit_linear_conductance",
    "fit_va_constant_rate",
    "invert_readout",
    "predict_delta_r",
    "quantise",
    "readout",
    "resample",
    "run_ensemble",
    "simulate",
    "thermal_voltage",
    "v_off_from_equilibrium",
]
