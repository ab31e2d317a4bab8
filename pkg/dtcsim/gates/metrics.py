"""Gate-matrix extraction, ideal-gate fits, fidelity and leakage."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional

import numpy as np
import pandas as pd

from ..errors import FitError

PHASE_TOL = 1e-9
GLOBAL_PHASE_TOL = 1e-6

PARAMETRIC = "parametric"
CPHASE = "cphase"


def extract_u_prime(
    finals: np.ndarray,
    idle_basis: np.ndarray,
    idle_freqs: np.ndarray,
    gate_time: float,
) -> np.ndarray:
    """Return the 4x4 gate matrix ``U'`` in the idle rotating frame.

    Entry ``(2i+j, 2i'+j')`` is ``<ij|psi_{i'j'}(T)>`` with row ``ij``
    multiplied by ``exp(+i omega_ij T)``, and the whole matrix multiplied by
    ``conj(U00) / |U00|`` so that ``U'_00`` is real non-negative.

    Parameters
    ----------
    finals : np.ndarray
        Final states (columns) for initial states ``|00>, |01>, |10>, |11>``.
    idle_basis : np.ndarray
        Idle computational eigenstates as columns, same order.
    idle_freqs : np.ndarray
        ``omega_ij(Theta_0)`` in rad/s, same order.
    gate_time : float
        Gate time in ns.

    Raises
    ------
    FitError
        If ``|<00|psi_00(T)>| < 1e-6`` so the global phase is undefined.
    """
    overlaps = idle_basis.conj().T @ finals
    frame = np.exp(1j * np.asarray(idle_freqs) * gate_time * 1e-9)
    u = frame[:, None] * overlaps
    pivot = u[0, 0]
    if abs(pivot) < GLOBAL_PHASE_TOL:
        raise FitError(f"|U'_00| = {abs(pivot):.3e}: global phase undefined")
    return u * (np.conj(pivot) / abs(pivot))


def leakage_rates(u_prime: np.ndarray) -> np.ndarray:
    """Per-initial-state leakage ``L_{i'j'} = 1 - sum_ij |U'_{ij,i'j'}|^2``, clipped to [0, 1]."""
    return np.clip(1.0 - np.sum(np.abs(u_prime) ** 2, axis=0), 0.0, 1.0)


def _unit_phase(u_prime: np.ndarray, row: int, col: int) -> float:
    value = u_prime[row, col]
    if abs(value) <= PHASE_TOL:
        raise FitError(f"|U'_{row}{col}| = {abs(value):.3e} is too small to define a phase")
    return float(np.angle(value))


@dataclass(frozen=True, eq=False)
class GateFit:
    """Fitted ideal gate: its angle, named phases and the matrix ``U_id``."""

    kind: str
    angle: float
    phases: Mapping[str, float]
    u_id: np.ndarray


def parametric_unitary(theta: float, phi11: float, phi22: float, phi12: float) -> np.ndarray:
    """Ideal parametric gate with ``phi21 = phi11 + phi22 - phi12``."""
    phi21 = phi11 + phi22 - phi12
    u = np.zeros((4, 4), dtype=complex)
    u[0, 0] = 1.0
    u[1, 1] = np.exp(1j * phi11) * math.cos(theta)
    u[1, 2] = -1j * np.exp(1j * phi12) * math.sin(theta)
    u[2, 1] = -1j * np.exp(1j * phi21) * math.sin(theta)
    u[2, 2] = np.exp(1j * phi22) * math.cos(theta)
    u[3, 3] = np.exp(1j * (phi11 + phi22))
    return u


def cphase_unitary(phi11: float, phi22: float, phi33: float) -> np.ndarray:
    return np.diag([1.0, np.exp(1j * phi11), np.exp(1j * phi22), np.exp(1j * phi33)])


def fit_parametric(u_prime: np.ndarray) -> GateFit:
    """Fit the parametric gate: ``theta = arcsin|U'_12|``, ``e^{i phi_ii} = U'_ii/|U'_ii|``
    and ``e^{i phi_12} = i U'_12/|U'_12|``.

    When ``|U'_12|`` vanishes ``theta`` is 0 and ``phi_12`` is set to 0.
    """
    phi11 = _unit_phase(u_prime, 1, 1)
    phi22 = _unit_phase(u_prime, 2, 2)
    u12 = u_prime[1, 2]
    magnitude = min(abs(u12), 1.0)
    theta = math.asin(magnitude)
    phi12 = 0.0 if abs(u12) <= PHASE_TOL else float(np.angle(1j * u12))
    return GateFit(
        kind=PARAMETRIC,
        angle=theta,
        phases={"phi11": phi11, "phi22": phi22, "phi12": phi12},
        u_id=parametric_unitary(theta, phi11, phi22, phi12),
    )


def fit_cphase(u_prime: np.ndarray) -> GateFit:
    """Fit ``diag(1, e^{i phi11}, e^{i phi22}, e^{i phi33})``.

    The CPHASE angle ``phi33 - phi22 - phi11`` is reduced to ``[0, 2 pi)``.
    """
    phi11, phi22, phi33 = (_unit_phase(u_prime, i, i) for i in (1, 2, 3))
    angle = math.fmod(phi33 - phi22 - phi11, 2.0 * math.pi)
    if angle < 0.0:
        angle += 2.0 * math.pi
    return GateFit(
        kind=CPHASE,
        angle=angle,
        phases={"phi11": phi11, "phi22": phi22, "phi33": phi33},
        u_id=cphase_unitary(phi11, phi22, phi33),
    )


def average_fidelity(u_prime: np.ndarray, u_id: np.ndarray) -> float:
    """``(|tr(U_id^dag U')|^2 + tr(U'^dag U')) / 20``."""
    u_prime = np.asarray(u_prime)
    u_id = np.asarray(u_id)
    if u_prime.shape != (4, 4) or u_id.shape != (4, 4):
        raise ValueError("average_fidelity expects two 4x4 matrices")
    overlap = np.trace(u_id.conj().T @ u_prime)
    norm = np.trace(u_prime.conj().T @ u_prime).real
    return float((abs(overlap) ** 2 + norm) / 20.0)


def _matrix_json(matrix: np.ndarray) -> dict[str, list[list[float]]]:
    return {"real": np.real(matrix).tolist(), "imag": np.imag(matrix).tolist()}


@dataclass(frozen=True, eq=False)
class GateReport:
    """Scored outcome of one gate simulation.

    Attributes
    ----------
    gate : str
        Gate-kind registry key, e.g. ``"sqiswap"``.
    kind : str
        ``"parametric"`` or ``"cphase"``.
    gate_time : float
        Gate time in ns.
    u_prime : np.ndarray
        Extracted (generally non-unitary) gate matrix.
    angle : float
        ``theta_para`` or ``phi_CPHASE`` in rad.
    phases : Mapping[str, float]
        Fitted phases of the ideal gate.
    u_id : np.ndarray
        Fitted ideal gate.
    avg_fidelity : float
        Average gate fidelity.
    leakage : np.ndarray
        ``L_{i'j'}`` for initial states ``00, 01, 10, 11``.
    """

    gate: str
    kind: str
    gate_time: float
    u_prime: np.ndarray
    angle: float
    phases: Mapping[str, float]
    u_id: np.ndarray
    avg_fidelity: float
    leakage: np.ndarray
    pulse: Optional[Mapping[str, Any]] = None
    config_hash: Optional[str] = None
    propagation: tuple[Mapping[str, Any], ...] = ()
    trajectory: Optional[pd.DataFrame] = field(default=None, repr=False)

    @property
    def total_leakage(self) -> float:
        return float(np.sum(self.leakage))

    @property
    def angle_name(self) -> str:
        return "theta_para" if self.kind == PARAMETRIC else "phi_cphase"

    def to_json(self) -> dict[str, Any]:
        return {
            "gate": self.gate,
            "kind": self.kind,
            "config_hash": self.config_hash,
            "gate_time_ns": self.gate_time,
            self.angle_name: self.angle,
            "angle_over_pi": self.angle / math.pi,
            "fitted_phases": dict(self.phases),
            "avg_fidelity": self.avg_fidelity,
            "leakage": {label: float(v) for label, v in zip(("00", "01", "10", "11"), self.leakage)},
            "total_leakage": self.total_leakage,
            "u_prime": _matrix_json(self.u_prime),
            "u_id": _matrix_json(self.u_id),
            "pulse": dict(self.pulse) if self.pulse is not None else None,
            "propagation": [dict(stats) for stats in self.propagation],
        }

    def summary(self) -> str:
        leak = " ".join(f"L{label}={v:.3e}" for label, v in zip(("00", "01", "10", "11"), self.leakage))
        return (
            f"{self.gate} T={self.gate_time:.4f} ns  {self.angle_name}={self.angle / math.pi:.6f} pi  "
            f"F={self.avg_fidelity:.6f}  {leak}"
        )


def score_gate(
    u_prime: np.ndarray,
    fit: GateFit,
    *,
    gate: str,
    gate_time: float,
    **extra: Any,
) -> GateReport:
    return GateReport(
        gate=gate,
        kind=fit.kind,
        gate_time=float(gate_time),
        u_prime=u_prime,
        angle=fit.angle,
        phases=fit.phases,
        u_id=fit.u_id,
        avg_fidelity=average_fidelity(u_prime, fit.u_id),
        leakage=leakage_rates(u_prime),
        **extra,
    )


__all__ = [
    "CPHASE",
    "GateFit",
    "GateReport",
    "PARAMETRIC",
    "average_fidelity",
    "cphase_unitary",
    "extract_u_prime",
    "fit_cphase",
    "fit_parametric",
    "leakage_rates",
    "parametric_unitary",
    "score_gate",
]
