"""Gate extraction, ideal-gate fits and scoring."""

from .engine import GateSimulator, record_gate_report
from .metrics import (
    CPHASE,
    PARAMETRIC,
    GateFit,
    GateReport,
    average_fidelity,
    cphase_unitary,
    extract_u_prime,
    fit_cphase,
    fit_parametric,
    leakage_rates,
    parametric_unitary,
)
from .registry import DEFAULT_GATE_REGISTRY, GateKind, GateKindRegistry

__all__ = [
    "CPHASE",
    "DEFAULT_GATE_REGISTRY",
    "GateFit",
    "GateKind",
    "GateKindRegistry",
    "GateReport",
    "GateSimulator",
    "PARAMETRIC",
    "average_fidelity",
    "cphase_unitary",
    "extract_u_prime",
    "fit_cphase",
    "fit_parametric",
    "leakage_rates",
    "parametric_unitary",
    "record_gate_report",
]
