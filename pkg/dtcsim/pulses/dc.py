"""Flat-top (dc) CPHASE flux pulse with smooth ramps."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from ..errors import ConfigurationError, NoInteriorExtremumError
from ..operators.hamiltonian import HamiltonianModel
from ..spectrum.extrema import DEFAULT_XATOL, locate_interior_maximum
from ..spectrum.sweep import COMPUTATIONAL_LABELS, DEFAULT_EIGEN_COUNT, spectrum_at, sweep_spectrum
from .base import scalar_pair

logger = logging.getLogger(__name__)


def ramp_profile(x: np.ndarray, coeffs: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
    """Ramp ``r(x)`` on ``[0, 1]`` and its derivative ``r'(x)``.

    ``r(x) = (1 - cos(pi x))/2 + sum_k c_k (1 - cos(2 pi k x))/2``. Every
    correction term vanishes with zero slope at both ends, so ``r(0) = 0``,
    ``r(1) = 1`` and ``r'(0) = r'(1) = 0`` for any coefficients.
    """
    x = np.asarray(x, dtype=float)
    value = 0.5 * (1.0 - np.cos(math.pi * x))
    slope = 0.5 * math.pi * np.sin(math.pi * x)
    for k, c in enumerate(coeffs, start=1):
        value = value + c * 0.5 * (1.0 - np.cos(2.0 * math.pi * k * x))
        slope = slope + c * math.pi * k * np.sin(2.0 * math.pi * k * x)
    return value, slope


@dataclass(frozen=True)
class DcPulse:
    """Dc pulse ``theta0 -> theta_peak -> theta0`` over ``gate_time`` ns.

    Each ramp lasts ``ramp_fraction * gate_time / 2``; the remainder is a
    plateau at ``theta_peak``. ``ramp_coeffs`` add the Fourier corrections of
    :func:`ramp_profile`, which may overshoot by at most
    ``|theta_peak - theta0| * sum |c_k|``; that bound must not exceed
    ``max_overshoot`` (rad).
    """

    theta0: float
    theta_peak: float
    gate_time: float
    ramp_fraction: float = 1.0
    ramp_coeffs: tuple[float, ...] = ()
    max_overshoot: float = 0.02 * math.pi

    kind = "dc"

    def __post_init__(self) -> None:
        object.__setattr__(self, "ramp_coeffs", tuple(float(c) for c in self.ramp_coeffs))
        for name in ("theta0", "theta_peak", "gate_time", "ramp_fraction", "max_overshoot"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ConfigurationError(f"dc pulse {name} must be finite (got {value!r})")
        if self.gate_time <= 0.0:
            raise ConfigurationError(f"dc pulse gate_time must be positive (got {self.gate_time})")
        if not 0.0 < self.ramp_fraction <= 1.0:
            raise ConfigurationError(f"dc pulse ramp_fraction must lie in (0, 1] (got {self.ramp_fraction})")
        if self.overshoot > self.max_overshoot:
            raise ConfigurationError(
                f"ramp coefficients overshoot by {self.overshoot / math.pi:.4f} pi, "
                f"above the {self.max_overshoot / math.pi:.4f} pi bound"
            )

    @property
    def overshoot(self) -> float:
        return abs(self.theta_peak - self.theta0) * sum(abs(c) for c in self.ramp_coeffs)

    @property
    def ramp_time(self) -> float:
        return 0.5 * self.ramp_fraction * self.gate_time

    def with_gate_time(self, gate_time: float) -> "DcPulse":
        return replace(self, gate_time=float(gate_time))

    def with_coeffs(self, coeffs: Sequence[float]) -> "DcPulse":
        return replace(self, ramp_coeffs=tuple(coeffs))

    def sample(self, times: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        t = np.asarray(times, dtype=float)
        tau = self.ramp_time
        span = self.theta_peak - self.theta0

        rising = t < tau
        falling = t > self.gate_time - tau
        x = np.clip(np.where(rising, t, self.gate_time - t) / tau, 0.0, 1.0)
        r, slope = ramp_profile(x, self.ramp_coeffs)

        theta = np.where(rising | falling, self.theta0 + span * r, self.theta_peak)
        theta_dot = np.where(rising, span * slope / tau, np.where(falling, -span * slope / tau, 0.0))

        inside = (t >= 0.0) & (t <= self.gate_time)
        return np.where(inside, theta, self.theta0), np.where(inside, theta_dot, 0.0)

    def value_and_derivative(self, t: float) -> tuple[float, float]:
        return scalar_pair(self.sample(t))


def dc_value_and_derivative(pulse: DcPulse, t: float) -> tuple[float, float]:
    """``(Theta, dTheta/dt)`` of ``pulse`` at ``t`` ns; ``(theta0, 0)`` outside ``[0, T]``."""
    return pulse.value_and_derivative(t)


def peak_from_zz_max(
    model: HamiltonianModel,
    bracket: Sequence[float],
    k: int = DEFAULT_EIGEN_COUNT,
    *,
    grid_points: int = 31,
    threads: Optional[int] = None,
    xatol: float = DEFAULT_XATOL,
) -> tuple[float, float]:
    """Flux (rad) of the interior ``|zeta_ZZ|`` maximum in ``bracket`` and ``zeta_ZZ`` there.

    A coarse labelled sweep picks the peak cell, which is then refined by
    bounded scalar maximization with labels continued from the nearest grid
    point.

    Raises
    ------
    NoInteriorExtremumError
        If ``|zeta_ZZ|`` is largest at a bracket edge, as for a monotone curve.
    """
    lo, hi = (float(b) for b in bracket)
    grid = np.linspace(lo, hi, int(grid_points))
    sweep = sweep_spectrum(model, grid, k, threads=threads)
    magnitudes = np.abs([result.zz for result in sweep])
    best = int(np.argmax(magnitudes))
    if best in (0, len(grid) - 1):
        raise NoInteriorExtremumError(
            f"|zeta_ZZ| on [{lo / math.pi:.4f} pi, {hi / math.pi:.4f} pi] peaks at the bracket edge"
        )

    anchor = sweep[best]
    references = {label: anchor.state(*label) for label in COMPUTATIONAL_LABELS}

    def _abs_zz(theta: float) -> float:
        return abs(spectrum_at(model, theta, k, references).zz)

    theta_peak, _ = locate_interior_maximum(_abs_zz, (grid[best - 1], grid[best + 1]), xatol=xatol)
    zz = spectrum_at(model, theta_peak, k, references).zz
    logger.info(f"|zeta_ZZ| peaks at {theta_peak / math.pi:.6f} pi")
    return theta_peak, zz


__all__ = ["DcPulse", "dc_value_and_derivative", "peak_from_zz_max", "ramp_profile"]
