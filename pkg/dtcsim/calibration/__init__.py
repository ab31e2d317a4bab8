"""Calibration curves, gate-time solving and dc ramp tuning."""

from .curves import (
    ANGLE_TOL,
    CurvePoint,
    GateTimeSolution,
    angle_vs_time,
    curve_table,
    fidelity_vs_angle,
    solve_gate_time,
)
from .families import AcPulseFamily, DcPulseFamily, PulseFamily
from .runlog import RunLog
from .tuning import PatternSearchResult, RampTuning, pattern_search, tune_dc_ramp

__all__ = [
    "ANGLE_TOL",
    "AcPulseFamily",
    "CurvePoint",
    "DcPulseFamily",
    "GateTimeSolution",
    "PatternSearchResult",
    "PulseFamily",
    "RampTuning",
    "RunLog",
    "angle_vs_time",
    "curve_table",
    "fidelity_vs_angle",
    "pattern_search",
    "solve_gate_time",
    "tune_dc_ramp",
]
