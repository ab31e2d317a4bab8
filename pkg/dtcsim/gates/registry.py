"""Registry of gate kinds: which ideal gate to fit and which pulse drives it."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional

import numpy as np

from .metrics import GateFit, GateReport, fit_cphase, fit_parametric, score_gate


@dataclass(frozen=True)
class GateKind:
    """Definition of a simulated two-qubit gate.

    Attributes
    ----------
    key : str
        Registry key, also the CLI ``--kind`` value.
    fit : Callable[[np.ndarray], GateFit]
        Fits the ideal gate family to an extracted ``U'``.
    pulse_kind : str
        ``"ac"`` or ``"dc"``; selects the pulse family the workflows build.
    target_angle : float
        Default calibration target in rad.
    description : Optional[str]
        Human-readable summary.
    """

    key: str
    fit: Callable[[np.ndarray], GateFit]
    pulse_kind: str
    target_angle: float
    description: Optional[str] = None

    def evaluate(self, u_prime: np.ndarray, gate_time: float, **extra: Any) -> GateReport:
        """Fit ``u_prime`` and score it into a :class:`GateReport`."""
        return score_gate(u_prime, self.fit(u_prime), gate=self.key, gate_time=gate_time, **extra)


class GateKindRegistry:
    """Mutable registry mapping gate keys to definitions."""

    def __init__(self) -> None:
        self._kinds: Dict[str, GateKind] = {}

    def register(self, kind: GateKind, *, replace: bool = False) -> None:
        """Register ``kind`` under its key.

        Parameters
        ----------
        kind : GateKind
            Gate definition to add.
        replace : bool, default: False
            When ``True`` an existing registration with the same key is
            overwritten. Otherwise a duplicate raises :class:`ValueError`.
        """
        if not replace and kind.key in self._kinds:
            raise ValueError(f"Gate kind '{kind.key}' is already registered")
        self._kinds[kind.key] = kind

    def get(self, key: str) -> GateKind:
        """Return the gate kind registered under ``key``."""
        try:
            return self._kinds[key]
        except KeyError as exc:
            raise KeyError(f"Unknown gate kind '{key}'") from exc

    def evaluate(self, key: str, u_prime: np.ndarray, gate_time: float, **extra: Any) -> GateReport:
        return self.get(key).evaluate(u_prime, gate_time, **extra)

    def available_kinds(self) -> Dict[str, GateKind]:
        """Return a copy of the registered gate kinds keyed by identifier."""
        return dict(self._kinds)


DEFAULT_GATE_REGISTRY = GateKindRegistry()
DEFAULT_GATE_REGISTRY.register(
    GateKind(
        key="sqiswap",
        fit=fit_parametric,
        pulse_kind="ac",
        target_angle=math.pi / 4,
        description="Parametric |01>-|10> exchange driven by an ac flux pulse; sqrt(iSWAP) at theta = pi/4.",
    )
)
DEFAULT_GATE_REGISTRY.register(
    GateKind(
        key="cz",
        fit=fit_cphase,
        pulse_kind="dc",
        target_angle=math.pi,
        description="CPHASE from a dc flux excursion to the |zeta_ZZ| maximum; CZ at phi = pi.",
    )
)

__all__ = ["DEFAULT_GATE_REGISTRY", "GateKind", "GateKindRegistry"]
