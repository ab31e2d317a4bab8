"""Parametric (ac) flux pulse.

``Theta(t) = theta0 + env(t) cos(carrier t)`` with
``env(t) = alpha tanh(beta t) tanh(beta (T - t))``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..errors import ConfigurationError
from .base import scalar_pair


@dataclass(frozen=True)
class AcPulse:
    """Ac flux pulse.

    Attributes
    ----------
    theta0 : float
        Idle flux in rad.
    alpha : float
        Envelope amplitude in rad.
    beta : float
        Edge rate in 1/ns.
    gate_time : float
        Gate time ``T`` in ns.
    carrier : float
        Modulation frequency in rad/ns, normally ``Delta(Theta_0)``.
    """

    theta0: float
    alpha: float
    beta: float
    gate_time: float
    carrier: float

    kind = "ac"

    def __post_init__(self) -> None:
        for name in ("theta0", "alpha", "beta", "gate_time", "carrier"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ConfigurationError(f"ac pulse {name} must be finite (got {value!r})")
        if self.beta <= 0.0:
            raise ConfigurationError(f"ac pulse beta must be positive (got {self.beta})")
        if self.gate_time <= 0.0:
            raise ConfigurationError(f"ac pulse gate_time must be positive (got {self.gate_time})")

    def with_gate_time(self, gate_time: float) -> "AcPulse":
        return replace(self, gate_time=float(gate_time))

    def envelope(self, t: np.ndarray) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        return self.alpha * np.tanh(self.beta * t) * np.tanh(self.beta * (self.gate_time - t))

    def sample(self, times: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        t = np.asarray(times, dtype=float)
        b, big_t = self.beta, self.gate_time
        rise, fall = np.tanh(b * t), np.tanh(b * (big_t - t))
        env = self.alpha * rise * fall
        # d tanh(x)/dx = 1 - tanh(x)^2
        env_dot = self.alpha * b * ((1.0 - rise**2) * fall - rise * (1.0 - fall**2))
        phase = self.carrier * t
        theta = self.theta0 + env * np.cos(phase)
        theta_dot = env_dot * np.cos(phase) - env * self.carrier * np.sin(phase)

        inside = (t >= 0.0) & (t <= big_t)
        return np.where(inside, theta, self.theta0), np.where(inside, theta_dot, 0.0)

    def value_and_derivative(self, t: float) -> tuple[float, float]:
        return scalar_pair(self.sample(t))


def ac_value_and_derivative(pulse: AcPulse, t: float) -> tuple[float, float]:
    """``(Theta, dTheta/dt)`` of ``pulse`` at ``t`` ns; ``(theta0, 0)`` outside ``[0, T]``."""
    return pulse.value_and_derivative(t)


__all__ = ["AcPulse", "ac_value_and_derivative"]
