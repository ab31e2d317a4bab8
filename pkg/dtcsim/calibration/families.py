"""Pulse families: every pulse parameter fixed except the gate time."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Sequence, Union

from ..pulses.ac import AcPulse
from ..pulses.dc import DcPulse


@dataclass(frozen=True)
class AcPulseFamily:
    theta0: float
    alpha: float
    beta: float
    carrier: float

    kind = "ac"

    def at(self, gate_time: float) -> AcPulse:
        return AcPulse(self.theta0, self.alpha, self.beta, float(gate_time), self.carrier)


@dataclass(frozen=True)
class DcPulseFamily:
    theta0: float
    theta_peak: float
    ramp_fraction: float = 1.0
    ramp_coeffs: tuple[float, ...] = ()
    max_overshoot: float = 0.02 * math.pi

    kind = "dc"

    def at(self, gate_time: float) -> DcPulse:
        return DcPulse(
            theta0=self.theta0,
            theta_peak=self.theta_peak,
            gate_time=float(gate_time),
            ramp_fraction=self.ramp_fraction,
            ramp_coeffs=self.ramp_coeffs,
            max_overshoot=self.max_overshoot,
        )

    def with_coeffs(self, coeffs: Sequence[float]) -> "DcPulseFamily":
        return replace(self, ramp_coeffs=tuple(float(c) for c in coeffs))

    def admits(self, coeffs: Sequence[float]) -> bool:
        """Whether ``coeffs`` respect the overshoot bound of this family."""
        return abs(self.theta_peak - self.theta0) * sum(abs(c) for c in coeffs) <= self.max_overshoot


PulseFamily = Union[AcPulseFamily, DcPulseFamily]

__all__ = ["AcPulseFamily", "DcPulseFamily", "PulseFamily"]
