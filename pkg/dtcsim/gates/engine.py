"""Gate simulation engine: propagate, extract, fit, score and optionally persist."""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Iterable, Optional

import numpy as np
from sqlalchemy import select
from sqlalchemy.orm import Session

from ..dynamics.propagate import DEFAULT_TOL, propagate_computational_basis
from ..models import SimulationRun
from ..operators.hamiltonian import HamiltonianModel
from ..pulses.base import FluxPulse
from ..pulses.io import pulse_to_dict
from ..spectrum.sweep import COMPUTATIONAL_LABELS, SpectrumResult
from .metrics import GateReport, extract_u_prime
from .registry import DEFAULT_GATE_REGISTRY, GateKindRegistry

logger = logging.getLogger(__name__)


class GateSimulator:
    """Runs gate simulations against a fixed model and idle spectrum."""

    def __init__(
        self,
        model: HamiltonianModel,
        idle: SpectrumResult,
        *,
        tol: float = DEFAULT_TOL,
        threads: Optional[int] = None,
        registry: Optional[GateKindRegistry] = None,
        config_hash: Optional[str] = None,
        session: Optional[Session] = None,
        command: str = "gate",
    ) -> None:
        """Create a simulator bound to ``model`` and the idle eigenbasis.

        Parameters
        ----------
        model : HamiltonianModel
            Flux-parametrized Hamiltonian.
        idle : SpectrumResult
            Labelled spectrum at the idling point; defines the computational
            basis and the rotating frame.
        tol : float, default: 1e-10
            Propagation tolerance.
        threads : Optional[int], default: None
            Worker cap for the concurrent propagations.
        registry : Optional[GateKindRegistry], default: None
            Custom gate-kind registry. Typically omitted, in which case the
            default registry is used.
        config_hash : Optional[str], default: None
            Provenance hash stored on every report.
        session : Optional[Session], default: None
            When given, every report is upserted as a :class:`SimulationRun`.
        command : str, default: "gate"
            Command name recorded on persisted rows.
        """
        self._model = model
        self._idle = idle
        self._idle_basis = idle.idle_basis()
        self._idle_freqs = idle.idle_frequencies()
        self._tol = tol
        self._threads = threads
        self._registry = registry or DEFAULT_GATE_REGISTRY
        self._config_hash = config_hash
        self._session = session
        self._command = command

    @property
    def model(self) -> HamiltonianModel:
        return self._model

    @property
    def idle(self) -> SpectrumResult:
        return self._idle

    @property
    def tol(self) -> float:
        return self._tol

    def with_tol(self, tol: float) -> "GateSimulator":
        return GateSimulator(
            self._model,
            self._idle,
            tol=tol,
            threads=self._threads,
            registry=self._registry,
            config_hash=self._config_hash,
            session=self._session,
            command=self._command,
        )

    def _observables(self) -> dict[str, np.ndarray]:
        return {f"P_{q1}{q2}": self._idle.state(q1, q2) for q1, q2 in COMPUTATIONAL_LABELS}

    def simulate(
        self,
        kind: str,
        pulse: FluxPulse,
        sample_stride_ns: Optional[float] = None,
    ) -> GateReport:
        """Like :meth:`run` but never persists; safe to call from worker threads."""
        gate_kind = self._registry.get(kind)
        observe = self._observables() if sample_stride_ns else None
        propagation = propagate_computational_basis(
            self._model,
            pulse,
            self._idle_basis,
            self._tol,
            threads=self._threads,
            observe=observe,
            sample_stride_ns=sample_stride_ns,
        )
        u_prime = extract_u_prime(propagation.finals, self._idle_basis, self._idle_freqs, pulse.gate_time)
        trajectory = propagation.trajectory
        if trajectory is not None:
            trajectory = trajectory.assign(leakage=1.0 - trajectory[list(observe)].sum(axis=1))
        report = gate_kind.evaluate(
            u_prime,
            pulse.gate_time,
            pulse=pulse_to_dict(pulse),
            config_hash=self._config_hash,
            propagation=propagation.stats,
            trajectory=trajectory,
        )
        logger.debug(report.summary())
        return report

    def run(
        self,
        kind: str,
        pulse: FluxPulse,
        *,
        target_angle: Optional[float] = None,
        sample_stride_ns: Optional[float] = None,
    ) -> GateReport:
        """Simulate ``pulse`` and score it as gate ``kind``.

        Parameters
        ----------
        kind : str
            Gate-kind registry key (``"sqiswap"`` or ``"cz"`` by default).
        pulse : FluxPulse
            Flux waveform; its ``gate_time`` is the gate time.
        target_angle : Optional[float], default: None
            Calibration target recorded on the persisted row.
        sample_stride_ns : Optional[float], default: None
            When set, computational populations are sampled at this stride
            and attached to the report as ``trajectory``.

        Returns
        -------
        GateReport
            The scored report.

        Raises
        ------
        KeyError
            If ``kind`` is not registered.
        PropagationError, FitError
            When the propagation or the ideal-gate fit fails.
        """
        report = self.simulate(kind, pulse, sample_stride_ns)
        if self._session is not None:
            self._upsert_run(report, target_angle)
            self._session.flush()
        return report

    def run_batch(
        self,
        kind: str,
        pulses: Iterable[FluxPulse],
        *,
        target_angle: Optional[float] = None,
        threads: Optional[int] = None,
    ) -> list[GateReport]:
        """Simulate several pulses of the same gate kind, results in input order.

        Pulses run concurrently on up to ``threads`` workers; persistence,
        when enabled, happens afterwards on the calling thread.
        """
        pulses = list(pulses)
        with ThreadPoolExecutor(max_workers=threads or 1) as pool:
            reports = list(pool.map(lambda p: self.simulate(kind, p), pulses))
        if self._session is not None:
            for report in reports:
                self._upsert_run(report, target_angle)
            self._session.flush()
        return reports

    def _upsert_run(self, report: GateReport, target_angle: Optional[float]) -> SimulationRun:
        return record_gate_report(self._session, report, self._command, target_angle=target_angle)


def record_gate_report(
    session: Session,
    report: GateReport,
    command: str,
    *,
    target_angle: Optional[float] = None,
) -> SimulationRun:
    """Fetch or create the :class:`SimulationRun` for ``report`` and apply its fields.

    Rows are keyed by ``(command, gate_kind, config_hash, gate_time_ns)``, so
    re-running the same gate updates the row in place.
    """
    config_hash = report.config_hash or "unhashed"
    run = session.scalar(
        select(SimulationRun).where(
            SimulationRun.command == command,
            SimulationRun.gate_kind == report.gate,
            SimulationRun.config_hash == config_hash,
            SimulationRun.gate_time_ns == report.gate_time,
        )
    )
    if run is None:
        run = SimulationRun(
            command=command,
            gate_kind=report.gate,
            config_hash=config_hash,
            gate_time_ns=report.gate_time,
        )
        session.add(run)
    run.target_angle = target_angle
    run.angle = report.angle
    run.avg_fidelity = report.avg_fidelity
    run.total_leakage = report.total_leakage
    run.leakage = [float(v) for v in report.leakage]
    run.report = report.to_json()
    return run


__all__ = ["GateSimulator", "record_gate_report"]
