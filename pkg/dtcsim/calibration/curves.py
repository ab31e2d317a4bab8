"""Angle-versus-gate-time curves and gate-time root finding."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
import pandas as pd
from scipy.optimize import brentq

from ..errors import CalibrationBracketError, ConfigurationError, ConvergenceError, NumericalError
from ..gates.engine import GateSimulator
from ..gates.metrics import CPHASE, GateReport
from .families import PulseFamily

logger = logging.getLogger(__name__)

ANGLE_TOL = 1e-4
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, eq=False)
class CurvePoint:
    """One gate time of a calibration curve; ``angle`` is unwrapped for CPHASE."""

    gate_time: float
    angle: float
    avg_fidelity: float
    total_leakage: float
    report: GateReport


def _check_times(gate_times: Sequence[float]) -> list[float]:
    times = [float(t) for t in gate_times]
    if not times:
        raise ConfigurationError("gate-time grid is empty")
    if any(t <= 0.0 for t in times) or any(b <= a for a, b in zip(times, times[1:])):
        raise ConfigurationError("gate-time grid must be positive and strictly ascending")
    return times


def _simulate_at(simulator: GateSimulator, kind: str, family: PulseFamily, gate_time: float) -> GateReport:
    try:
        return simulator.simulate(kind, family.at(gate_time))
    except NumericalError as exc:
        exc.add_note(f"while simulating {kind} at T={gate_time:.6g} ns")
        raise


def angle_vs_time(
    simulator: GateSimulator,
    kind: str,
    family: PulseFamily,
    gate_times: Sequence[float],
    *,
    target_angle: Optional[float] = None,
    threads: Optional[int] = None,
) -> list[CurvePoint]:
    """Simulate the gate at every time of ``gate_times`` (ns, ascending).

    CPHASE angles are unwrapped along the grid. With ``target_angle`` the
    whole curve is moved onto the ``2 pi`` branch where the grid point closest
    to the target (modulo ``2 pi``) lies nearest to it; without one the first
    point sits in ``(-pi, pi]``. A curve that is not increasing only logs a
    warning.
    """
    times = _check_times(gate_times)
    with ThreadPoolExecutor(max_workers=threads) as pool:
        reports = list(pool.map(lambda t: _simulate_at(simulator, kind, family, t), times))

    angles = np.array([report.angle for report in reports])
    if reports[0].kind == CPHASE:
        angles = _anchor_branch(np.unwrap(angles), target_angle)

    if np.any(np.diff(angles) <= 0.0):
        logger.warning(f"{kind} angle is not monotone increasing over T in [{times[0]}, {times[-1]}] ns")

    return [
        CurvePoint(
            gate_time=t,
            angle=float(angle),
            avg_fidelity=report.avg_fidelity,
            total_leakage=report.total_leakage,
            report=report,
        )
        for t, angle, report in zip(times, angles, reports)
    ]


def _anchor_branch(angles: np.ndarray, target_angle: Optional[float]) -> np.ndarray:
    if target_angle is None:
        return angles - TWO_PI if angles[0] > math.pi else angles
    wrapped = np.angle(np.exp(1j * (angles - target_angle)))
    nearest = int(np.argmin(np.abs(wrapped)))
    return angles + (_branch_near(float(angles[nearest]), target_angle, CPHASE) - angles[nearest])


def curve_table(curve: Sequence[CurvePoint]) -> pd.DataFrame:
    rows = []
    for point in curve:
        row = {
            "gate_time_ns": point.gate_time,
            "angle_over_pi": point.angle / math.pi,
            "avg_fidelity": point.avg_fidelity,
            "total_leakage": point.total_leakage,
        }
        row.update({f"L_{label}": float(v) for label, v in zip(("00", "01", "10", "11"), point.report.leakage)})
        rows.append(row)
    return pd.DataFrame(rows)


def fidelity_vs_angle(curve: Sequence[CurvePoint]) -> pd.DataFrame:
    """Average fidelity and total leakage against the gate angle, sorted by angle."""
    frame = pd.DataFrame(
        {
            "angle_over_pi": [p.angle / math.pi for p in curve],
            "avg_fidelity": [p.avg_fidelity for p in curve],
            "total_leakage": [p.total_leakage for p in curve],
        }
    )
    return frame.sort_values("angle_over_pi", kind="stable", ignore_index=True)


def _branch_near(angle: float, target: float, kind: str) -> float:
    if kind != CPHASE:
        return angle
    return angle + TWO_PI * round((target - angle) / TWO_PI)


@dataclass(frozen=True, eq=False)
class GateTimeSolution:
    """Calibrated gate time ``T*`` (ns), the angle reached and the bracket endpoints ``(T, angle)``."""

    gate_time: float
    angle: float
    target_angle: float
    report: GateReport
    endpoints: tuple[tuple[float, float], tuple[float, float]]

    @property
    def residual(self) -> float:
        return abs(self.angle - self.target_angle)


def solve_gate_time(
    simulator: GateSimulator,
    kind: str,
    family: PulseFamily,
    target_angle: float,
    bracket: Sequence[float],
    *,
    angle_tol: float = ANGLE_TOL,
    threads: Optional[int] = None,
) -> GateTimeSolution:
    """Find the gate time ``T*`` (ns) in ``bracket`` where the gate angle hits ``target_angle``.

    Brent's method runs on ``angle(T) - target``; the time tolerance is set
    from the bracket secant so that the angle lands within ``angle_tol``.
    An endpoint already within ``angle_tol`` of the target is returned
    directly. CPHASE angles are compared on the ``2 pi`` branch closest to
    the target.

    Raises
    ------
    CalibrationBracketError
        If the endpoint angles do not straddle the target; carries
        ``(T, angle)`` for both endpoints.
    ConvergenceError
        If the re-simulated angle at ``T*`` misses the target by more than
        ``angle_tol``.
    """
    lo, hi = (float(b) for b in bracket)
    if not 0.0 < lo < hi:
        raise ConfigurationError(f"gate-time bracket must satisfy 0 < lo < hi (got {lo}, {hi})")

    cache: dict[float, GateReport] = {}

    def _report(t: float) -> GateReport:
        if t not in cache:
            cache[t] = _simulate_at(simulator, kind, family, t)
        return cache[t]

    def _angle(t: float) -> float:
        report = _report(t)
        return _branch_near(report.angle, target_angle, report.kind)

    with ThreadPoolExecutor(max_workers=min(2, threads or 2)) as pool:
        for t, report in zip((lo, hi), pool.map(lambda t: _simulate_at(simulator, kind, family, t), (lo, hi))):
            cache[t] = report
    angle_lo, angle_hi = _angle(lo), _angle(hi)
    endpoints = ((lo, angle_lo), (hi, angle_hi))

    def _solution(t: float, angle: float) -> GateTimeSolution:
        return GateTimeSolution(
            gate_time=t, angle=angle, target_angle=target_angle, report=_report(t), endpoints=endpoints
        )

    for t, angle in endpoints:
        if abs(angle - target_angle) <= angle_tol:
            logger.info(f"{kind}: bracket edge T={t} ns already meets the target")
            return _solution(t, angle)

    if (angle_lo - target_angle) * (angle_hi - target_angle) > 0.0:
        raise CalibrationBracketError(
            f"bracket [{lo}, {hi}] ns gives angles [{angle_lo / math.pi:.6f}, {angle_hi / math.pi:.6f}] pi, "
            f"which do not straddle {target_angle / math.pi:.6f} pi",
            endpoints=[list(p) for p in endpoints],
        )

    slope = abs(angle_hi - angle_lo) / (hi - lo)
    xtol = 0.1 * angle_tol / slope
    gate_time = brentq(lambda t: _angle(t) - target_angle, lo, hi, xtol=xtol)
    angle = _angle(gate_time)
    if abs(angle - target_angle) > angle_tol:
        raise ConvergenceError(
            f"angle at T*={gate_time:.6f} ns misses the target by {abs(angle - target_angle):.2e} rad",
            residuals=[abs(angle - target_angle)],
        )
    logger.info(f"{kind}: angle {target_angle / math.pi:.6f} pi reached at T*={gate_time:.6f} ns")
    return _solution(gate_time, angle)


__all__ = [
    "ANGLE_TOL",
    "CurvePoint",
    "GateTimeSolution",
    "angle_vs_time",
    "curve_table",
    "fidelity_vs_angle",
    "solve_gate_time",
]
