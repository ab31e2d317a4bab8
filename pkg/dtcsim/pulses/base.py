"""Common interface of flux pulses."""

from __future__ import annotations

from typing import Protocol, runtime_checkable

import numpy as np


@runtime_checkable
class FluxPulse(Protocol):
    """A flux waveform ``Theta(t)`` on ``[0, gate_time]`` with analytic derivative.

    Times are in ns, ``Theta`` in rad and ``dTheta/dt`` in rad/ns. Outside
    ``[0, gate_time]`` every pulse reports ``(theta0, 0)``.
    """

    kind: str
    theta0: float
    gate_time: float

    def value_and_derivative(self, t: float) -> tuple[float, float]: ...

    def sample(self, times: np.ndarray) -> tuple[np.ndarray, np.ndarray]: ...


def scalar_pair(values: tuple[np.ndarray, np.ndarray]) -> tuple[float, float]:
    theta, theta_dot = values
    return float(theta), float(theta_dot)


__all__ = ["FluxPulse", "scalar_pair"]
