"""Flux waveforms with analytic time derivatives."""

from .ac import AcPulse, ac_value_and_derivative
from .base import FluxPulse
from .dc import DcPulse, dc_value_and_derivative, peak_from_zz_max, ramp_profile
from .io import Pulse, pulse_from_dict, pulse_to_dict, sample_pulse

__all__ = [
    "AcPulse",
    "DcPulse",
    "FluxPulse",
    "Pulse",
    "ac_value_and_derivative",
    "dc_value_and_derivative",
    "peak_from_zz_max",
    "pulse_from_dict",
    "pulse_to_dict",
    "ramp_profile",
    "sample_pulse",
]
