"""Pulse descriptors and sampled pulse tables."""

from __future__ import annotations

import math
from typing import Any, Mapping, Union

import numpy as np
import pandas as pd

from ..errors import ConfigurationError
from .ac import AcPulse
from .dc import DcPulse

Pulse = Union[AcPulse, DcPulse]

_AC_KEYS = {"kind", "theta0_over_pi", "alpha_over_pi", "beta_per_ns", "gate_time_ns", "carrier_rad_per_ns"}
_DC_KEYS = {
    "kind",
    "theta0_over_pi",
    "theta_peak_over_pi",
    "gate_time_ns",
    "ramp_fraction",
    "ramp_coeffs",
    "max_overshoot_over_pi",
}


def pulse_to_dict(pulse: Pulse) -> dict[str, Any]:
    """Descriptor of ``pulse`` using the config-file key names and units."""
    if isinstance(pulse, AcPulse):
        return {
            "kind": "ac",
            "theta0_over_pi": pulse.theta0 / math.pi,
            "alpha_over_pi": pulse.alpha / math.pi,
            "beta_per_ns": pulse.beta,
            "gate_time_ns": pulse.gate_time,
            "carrier_rad_per_ns": pulse.carrier,
        }
    if isinstance(pulse, DcPulse):
        return {
            "kind": "dc",
            "theta0_over_pi": pulse.theta0 / math.pi,
            "theta_peak_over_pi": pulse.theta_peak / math.pi,
            "gate_time_ns": pulse.gate_time,
            "ramp_fraction": pulse.ramp_fraction,
            "ramp_coeffs": list(pulse.ramp_coeffs),
            "max_overshoot_over_pi": pulse.max_overshoot / math.pi,
        }
    raise TypeError(f"unsupported pulse type {type(pulse).__name__}")


def _field(data: Mapping[str, Any], key: str) -> Any:
    if key not in data:
        raise ConfigurationError(f"pulse descriptor is missing '{key}'")
    return data[key]


def pulse_from_dict(data: Mapping[str, Any]) -> Pulse:
    """Rebuild a pulse from :func:`pulse_to_dict` output.

    Raises
    ------
    ConfigurationError
        On an unknown kind, unknown or missing keys, or invalid values.
    """
    kind = data.get("kind")
    allowed = {"ac": _AC_KEYS, "dc": _DC_KEYS}.get(kind)
    if allowed is None:
        raise ConfigurationError(f"unknown pulse kind {kind!r}")
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigurationError(f"unknown pulse key '{unknown[0]}'")

    try:
        if kind == "ac":
            return AcPulse(
                theta0=float(_field(data, "theta0_over_pi")) * math.pi,
                alpha=float(_field(data, "alpha_over_pi")) * math.pi,
                beta=float(_field(data, "beta_per_ns")),
                gate_time=float(_field(data, "gate_time_ns")),
                carrier=float(_field(data, "carrier_rad_per_ns")),
            )
        return DcPulse(
            theta0=float(_field(data, "theta0_over_pi")) * math.pi,
            theta_peak=float(_field(data, "theta_peak_over_pi")) * math.pi,
            gate_time=float(_field(data, "gate_time_ns")),
            ramp_fraction=float(data.get("ramp_fraction", 1.0)),
            ramp_coeffs=tuple(float(c) for c in data.get("ramp_coeffs", ())),
            max_overshoot=float(data.get("max_overshoot_over_pi", 0.02)) * math.pi,
        )
    except ConfigurationError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(f"invalid {kind} pulse descriptor: {exc}") from exc


def sample_pulse(pulse: Pulse, rate_per_ns: float) -> pd.DataFrame:
    """Sample ``pulse`` on ``[0, T]`` at ``rate_per_ns`` points per ns, endpoints included."""
    if not rate_per_ns > 0.0:
        raise ConfigurationError(f"sample rate must be positive (got {rate_per_ns})")
    count = max(2, int(round(pulse.gate_time * rate_per_ns)) + 1)
    times = np.linspace(0.0, pulse.gate_time, count)
    theta, theta_dot = pulse.sample(times)
    return pd.DataFrame(
        {
            "t_ns": times,
            "theta_over_pi": theta / math.pi,
            "theta_dot_rad_per_ns": theta_dot,
        }
    )


__all__ = ["Pulse", "pulse_from_dict", "pulse_to_dict", "sample_pulse"]
