"""Device design parameters and the quantities derived from them."""

from __future__ import annotations

import dataclasses
import logging
from dataclasses import dataclass
from typing import Any, Optional, Sequence

import numpy as np

from ..errors import ConfigurationError
from .constants import E_CHARGE, FEMTO, HBAR, PHI0, ghz_to_rad_s, rad_s_to_ghz, rad_s_to_mhz

logger = logging.getLogger(__name__)

N_TRANSMONS = 4


def cap_field_name(i: int, j: int) -> str:
    """Config-file name of capacitance entry ``(i, j)`` (zero-based, any order)."""
    lo, hi = sorted((i, j))
    return f"c{lo + 1}{hi + 1}_fF"


@dataclass(frozen=True)
class DeviceParams:
    """Design inputs of the two-qubit + double-transmon-coupler circuit.

    Attributes
    ----------
    cap : tuple[tuple[float, ...], ...]
        Symmetric 4x4 capacitances ``C_ij`` in fF. Diagonal entries are the
        self-capacitances, off-diagonal entries the coupling capacitances.
    qubit_freqs : tuple[float, ...]
        Design transmon frequencies ``omega_i / 2pi`` in GHz for transmons 1-4
        (1, 2 are the qubits, 3, 4 the coupler transmons).
    r_j : float
        Ratio of the loop-junction critical current to the mean of the two
        coupler-junction critical currents.
    charge_cutoff : int
        Cooper-pair number cutoff ``N``; each transmon has ``2N+1`` charge states.
    """

    cap: tuple[tuple[float, ...], ...]
    qubit_freqs: tuple[float, ...]
    r_j: float = 0.3
    charge_cutoff: int = 10

    def __post_init__(self) -> None:
        cap = tuple(tuple(float(c) for c in row) for row in self.cap)
        freqs = tuple(float(f) for f in self.qubit_freqs)
        object.__setattr__(self, "cap", cap)
        object.__setattr__(self, "qubit_freqs", freqs)

        if len(cap) != N_TRANSMONS or any(len(row) != N_TRANSMONS for row in cap):
            raise ConfigurationError("cap must be a 4x4 matrix")
        for i in range(N_TRANSMONS):
            if not cap[i][i] > 0.0:
                raise ConfigurationError(
                    f"{cap_field_name(i, i)} must be strictly positive (got {cap[i][i]})"
                )
            for j in range(i + 1, N_TRANSMONS):
                if cap[i][j] != cap[j][i]:
                    raise ConfigurationError(
                        f"cap is not symmetric at {cap_field_name(i, j)}: "
                        f"{cap[i][j]} != {cap[j][i]}"
                    )
                if cap[i][j] < 0.0:
                    raise ConfigurationError(
                        f"{cap_field_name(i, j)} must be non-negative (got {cap[i][j]})"
                    )

        if len(freqs) != N_TRANSMONS:
            raise ConfigurationError("qubit_freqs must hold four frequencies")
        for idx, freq in enumerate(freqs):
            if not freq > 0.0:
                raise ConfigurationError(
                    f"omega{idx + 1}_GHz must be strictly positive (got {freq})"
                )

        if not 0.0 < float(self.r_j) < 1.0:
            raise ConfigurationError(f"r_j must lie in (0, 1) (got {self.r_j})")
        object.__setattr__(self, "r_j", float(self.r_j))

        if isinstance(self.charge_cutoff, bool) or int(self.charge_cutoff) != self.charge_cutoff:
            raise ConfigurationError("charge_cutoff must be an integer")
        if int(self.charge_cutoff) < 1:
            raise ConfigurationError(
                f"charge_cutoff must be >= 1 (got {self.charge_cutoff})"
            )
        object.__setattr__(self, "charge_cutoff", int(self.charge_cutoff))

    @property
    def cap_matrix(self) -> np.ndarray:
        return np.array(self.cap, dtype=float)

    def replace(self, **changes: Any) -> "DeviceParams":
        """Return a copy with ``changes`` applied (validated again)."""
        return dataclasses.replace(self, **changes)

    def to_json(self) -> dict[str, Any]:
        """Serialize using the config-file field names."""
        capacitance = {
            cap_field_name(i, j): self.cap[i][j]
            for i in range(N_TRANSMONS)
            for j in range(i, N_TRANSMONS)
        }
        frequencies = {
            f"omega{i + 1}_GHz": self.qubit_freqs[i] for i in range(N_TRANSMONS)
        }
        return {
            "r_j": self.r_j,
            "charge_cutoff": self.charge_cutoff,
            "capacitance": capacitance,
            "frequencies": frequencies,
        }


def _symmetric(upper: dict[tuple[int, int], float]) -> tuple[tuple[float, ...], ...]:
    rows = [[0.0] * N_TRANSMONS for _ in range(N_TRANSMONS)]
    for (i, j), value in upper.items():
        rows[i][j] = value
        rows[j][i] = value
    return tuple(tuple(row) for row in rows)


TABLE_I_CAPACITANCE = _symmetric(
    {
        (0, 0): 60.0,
        (0, 1): 0.025,
        (0, 2): 6.0,
        (0, 3): 0.05,
        (1, 1): 60.0,
        (1, 2): 0.05,
        (1, 3): 6.0,
        (2, 2): 60.0,
        (2, 3): 1.0,
        (3, 3): 60.0,
    }
)
TABLE_I_FREQUENCIES = (7.0, 7.7, 10.2, 10.2)


def reference_device(r_j: float = 0.3, charge_cutoff: int = 10) -> DeviceParams:
    """Design values of the reference device (``r_j=0.25`` gives the comparison device)."""
    return DeviceParams(
        cap=TABLE_I_CAPACITANCE,
        qubit_freqs=TABLE_I_FREQUENCIES,
        r_j=r_j,
        charge_cutoff=charge_cutoff,
    )


@dataclass(frozen=True, eq=False)
class DerivedParams:
    """Secondary quantities computed from :class:`DeviceParams`.

    Attributes
    ----------
    w : np.ndarray
        Symmetric 4x4 matrix ``W`` in rad/s, ``hbar W = e^2 M^-1 / 2``.
    omega_j : np.ndarray
        Josephson frequencies of junctions 1-5 in rad/s.
    omega_c34 : float
        ``e^2 / (2 hbar C_34)`` in rad/s.
    theta_idle : Optional[float]
        Flux idling point in radians, once located by the spectrum module.
    """

    w: np.ndarray
    omega_j: np.ndarray
    omega_c34: float
    theta_idle: Optional[float] = None

    def __post_init__(self) -> None:
        w = np.array(self.w, dtype=float)
        omega_j = np.array(self.omega_j, dtype=float)
        w.setflags(write=False)
        omega_j.setflags(write=False)
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "omega_j", omega_j)

    def with_idle(self, theta_idle: float) -> "DerivedParams":
        return dataclasses.replace(self, theta_idle=float(theta_idle))


def build_capacitor_matrix(params: DeviceParams) -> np.ndarray:
    """Return the capacitor matrix ``M`` in fF.

    ``M_ii = sum_j C_ij`` (self-capacitance included) and ``M_ij = -C_ij``.

    Raises
    ------
    ConfigurationError
        If ``M`` is not positive definite.
    """
    cap = params.cap_matrix
    m = -cap.copy()
    np.fill_diagonal(m, cap.sum(axis=1))
    try:
        np.linalg.cholesky(m)
    except np.linalg.LinAlgError as exc:
        raise ConfigurationError("capacitor matrix M is not positive definite") from exc
    return m


def compute_w_matrix(m: np.ndarray) -> np.ndarray:
    """Return ``W = e^2 M^-1 / (2 hbar)`` in rad/s for ``M`` given in fF."""
    m = np.asarray(m, dtype=float)
    try:
        m_inv = np.linalg.inv(m * FEMTO)
    except np.linalg.LinAlgError as exc:
        raise ConfigurationError("capacitor matrix M is singular") from exc
    w = E_CHARGE**2 / (2.0 * HBAR) * m_inv
    return 0.5 * (w + w.T)


def compute_josephson_freqs(params: DeviceParams, w: np.ndarray) -> np.ndarray:
    """Return ``omega_J1..omega_J5`` in rad/s.

    Transmons 1-4 use ``omega_J = (omega + W_ii)^2 / (8 W_ii)``; the loop
    junction is ``r_j`` times the mean of junctions 3 and 4.
    """
    omega = np.array([ghz_to_rad_s(f) for f in params.qubit_freqs])
    w_diag = np.diag(np.asarray(w, dtype=float))
    omega_j = (omega + w_diag) ** 2 / (8.0 * w_diag)
    omega_j5 = params.r_j * 0.5 * (omega_j[2] + omega_j[3])
    return np.append(omega_j, omega_j5)


def derive_params(params: DeviceParams, theta_idle: Optional[float] = None) -> DerivedParams:
    """Compute every derived quantity of ``params`` in one call."""
    w = compute_w_matrix(build_capacitor_matrix(params))
    omega_j = compute_josephson_freqs(params, w)
    c34 = params.cap[2][3]
    if not c34 > 0.0:
        raise ConfigurationError("c34_fF must be positive to define omega_C34")
    omega_c34 = E_CHARGE**2 / (2.0 * HBAR * c34 * FEMTO)
    return DerivedParams(w=w, omega_j=omega_j, omega_c34=omega_c34, theta_idle=theta_idle)


def critical_currents_na(omega_j: Sequence[float]) -> list[float]:
    """Informational ``I_c = hbar omega_J / phi0`` in nA (never used in computation)."""
    return [HBAR * float(om) / PHI0 * 1e9 for om in omega_j]


def device_summary(params: DeviceParams, derived: Optional[DerivedParams] = None) -> dict[str, Any]:
    """Return the derived quantities in reporting units.

    The critical currents are informational only: the published table does
    not follow a single linear conversion from its Josephson frequencies.
    """
    derived = derived or derive_params(params)
    w_mhz = [[round(rad_s_to_mhz(v), 6) for v in row] for row in derived.w]
    summary: dict[str, Any] = {
        "device": params.to_json(),
        "W_MHz": w_mhz,
        "omega_J_GHz": [round(rad_s_to_ghz(v), 6) for v in derived.omega_j],
        "omega_C34_GHz": round(rad_s_to_ghz(derived.omega_c34), 6),
        "critical_currents_nA_informational": [
            round(v, 3) for v in critical_currents_na(derived.omega_j)
        ],
    }
    if derived.theta_idle is not None:
        summary["theta_idle_over_pi"] = derived.theta_idle / np.pi
    return summary


__all__ = [
    "DerivedParams",
    "DeviceParams",
    "N_TRANSMONS",
    "TABLE_I_CAPACITANCE",
    "TABLE_I_FREQUENCIES",
    "build_capacitor_matrix",
    "cap_field_name",
    "compute_josephson_freqs",
    "compute_w_matrix",
    "critical_currents_na",
    "derive_params",
    "device_summary",
    "reference_device",
]
