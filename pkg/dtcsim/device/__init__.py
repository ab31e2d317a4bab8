"""Device parameters, derived quantities and configuration loading."""

from .config import (
    AcPulseSettings,
    CalibrationSettings,
    DcPulseSettings,
    DynamicsSettings,
    RunConfig,
    SpectrumSettings,
    load_config,
    load_run_config,
    override_settings,
    parse_overrides,
)
from .params import (
    DerivedParams,
    DeviceParams,
    build_capacitor_matrix,
    compute_josephson_freqs,
    compute_w_matrix,
    derive_params,
    device_summary,
    reference_device,
)

__all__ = [
    "AcPulseSettings",
    "CalibrationSettings",
    "DcPulseSettings",
    "DerivedParams",
    "DeviceParams",
    "DynamicsSettings",
    "RunConfig",
    "SpectrumSettings",
    "build_capacitor_matrix",
    "compute_josephson_freqs",
    "compute_w_matrix",
    "derive_params",
    "device_summary",
    "load_config",
    "load_run_config",
    "override_settings",
    "reference_device",
    "parse_overrides",
]
