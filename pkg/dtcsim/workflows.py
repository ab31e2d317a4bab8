"""End-to-end workflows shared by the CLI and library callers.

Each workflow takes a :class:`SimulationContext`, the model plus its idle
point built once from a :class:`RunConfig`.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, replace
from typing import Any, Mapping, Optional, Sequence

import numpy as np
from sqlalchemy.orm import Session

from .calibration.curves import CurvePoint, GateTimeSolution, angle_vs_time, solve_gate_time
from .calibration.families import AcPulseFamily, DcPulseFamily, PulseFamily
from .calibration.runlog import RunLog
from .calibration.tuning import RampTuning, tune_dc_ramp
from .device.config import RunConfig, override_settings
from .device.constants import rad_s_to_mhz, rad_s_to_rad_ns
from .device.params import DerivedParams, derive_params
from .errors import ConfigurationError
from .gates.engine import GateSimulator, record_gate_report
from .gates.metrics import GateReport
from .gates.registry import DEFAULT_GATE_REGISTRY, GateKindRegistry
from .operators.hamiltonian import HamiltonianModel, build_model
from .pulses.dc import peak_from_zz_max
from .pulses.io import Pulse
from .spectrum.sweep import IdlePoint, find_idle_point

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SimulationContext:
    """A run configuration with its model and idling point."""

    config: RunConfig
    derived: DerivedParams
    model: HamiltonianModel
    idle: IdlePoint

    @property
    def config_hash(self) -> str:
        return self.config.config_hash()

    @property
    def k(self) -> int:
        return self.config.spectrum.eigen_count


def build_config_model(config: RunConfig) -> tuple[DerivedParams, HamiltonianModel]:
    """Derive parameters and build the (optionally truncated) model of ``config``."""
    derived = derive_params(config.device)
    levels = config.spectrum.truncation_levels or None
    return derived, build_model(derived, config.device.charge_cutoff, levels)


def prepare_context(config: RunConfig) -> SimulationContext:
    """Build the model and locate the idling point inside the configured bracket."""
    derived, model = build_config_model(config)
    lo, hi = config.spectrum.idle_bracket_over_pi
    idle = find_idle_point(model, (lo * math.pi, hi * math.pi), config.spectrum.eigen_count)
    logger.info(
        f"Prepared N={config.device.charge_cutoff} model (dim {model.dim}); "
        f"Delta(Theta_0)/2pi = {rad_s_to_mhz(idle.spectrum.delta):.3f} MHz"
    )
    return SimulationContext(config=config, derived=derived.with_idle(idle.theta), model=model, idle=idle)


def with_pulse_overrides(config: RunConfig, kind: str, overrides: Mapping[str, Any]) -> RunConfig:
    """Apply ``[pulses.ac]`` or ``[pulses.dc]`` overrides for gate ``kind``.

    The config hash of the result reflects the overrides.
    """
    if not overrides:
        return config
    pulse_kind = DEFAULT_GATE_REGISTRY.get(kind).pulse_kind
    if pulse_kind == "ac":
        return replace(config, ac=override_settings(config.ac, overrides, "pulses.ac"))
    return replace(config, dc=override_settings(config.dc, overrides, "pulses.dc"))


def make_simulator(
    ctx: SimulationContext,
    *,
    session: Optional[Session] = None,
    command: str = "gate",
    threads: Optional[int] = None,
    registry: Optional[GateKindRegistry] = None,
) -> GateSimulator:
    return GateSimulator(
        ctx.model,
        ctx.idle.spectrum,
        tol=ctx.config.dynamics.tol,
        threads=threads,
        registry=registry,
        config_hash=ctx.config_hash,
        session=session,
        command=command,
    )


def ac_family(ctx: SimulationContext) -> AcPulseFamily:
    """Ac family at the idle point, modulated at ``Delta(Theta_0)``."""
    ac = ctx.config.ac
    return AcPulseFamily(
        theta0=ctx.idle.theta,
        alpha=ac.alpha_over_pi * math.pi,
        beta=ac.beta_per_ns,
        carrier=rad_s_to_rad_ns(ctx.idle.spectrum.delta),
    )


def dc_family(
    ctx: SimulationContext,
    *,
    theta_peak: Optional[float] = None,
    threads: Optional[int] = None,
) -> DcPulseFamily:
    """Dc family from the idle point to ``theta_peak``.

    The peak defaults to ``pulses.dc.theta_peak_over_pi`` and otherwise to
    the ``|zeta_ZZ|`` maximum between ``Theta_0`` and
    ``spectrum.peak_bracket_stop_over_pi``.
    """
    dc = ctx.config.dc
    if theta_peak is None and dc.theta_peak_over_pi is not None:
        theta_peak = dc.theta_peak_over_pi * math.pi
    if theta_peak is None:
        stop = ctx.config.spectrum.peak_bracket_stop_over_pi * math.pi
        theta_peak, _ = peak_from_zz_max(ctx.model, (ctx.idle.theta, stop), ctx.k, threads=threads)
    return DcPulseFamily(
        theta0=ctx.idle.theta,
        theta_peak=theta_peak,
        ramp_fraction=dc.ramp_fraction,
        ramp_coeffs=dc.ramp_coeffs,
        max_overshoot=dc.max_overshoot_over_pi * math.pi,
    )


def pulse_family(ctx: SimulationContext, kind: str, *, threads: Optional[int] = None) -> PulseFamily:
    pulse_kind = DEFAULT_GATE_REGISTRY.get(kind).pulse_kind
    return ac_family(ctx) if pulse_kind == "ac" else dc_family(ctx, threads=threads)


def default_gate_time(ctx: SimulationContext, kind: str) -> float:
    pulse_kind = DEFAULT_GATE_REGISTRY.get(kind).pulse_kind
    return ctx.config.ac.gate_time_ns if pulse_kind == "ac" else ctx.config.dc.gate_time_ns


def build_pulse(
    ctx: SimulationContext,
    kind: str,
    gate_time: Optional[float] = None,
    *,
    threads: Optional[int] = None,
) -> Pulse:
    """The configured pulse for gate ``kind`` at ``gate_time`` ns (config default when omitted)."""
    family = pulse_family(ctx, kind, threads=threads)
    return family.at(gate_time if gate_time is not None else default_gate_time(ctx, kind))


def simulate_gate(
    ctx: SimulationContext,
    kind: str,
    gate_time: Optional[float] = None,
    *,
    session: Optional[Session] = None,
    sample_stride_ns: Optional[float] = None,
    threads: Optional[int] = None,
) -> GateReport:
    """Simulate one gate and, with a ``session``, upsert it as a ``"gate"`` run."""
    pulse = build_pulse(ctx, kind, gate_time, threads=threads)
    simulator = make_simulator(ctx, session=session, command="gate", threads=threads)
    return simulator.run(kind, pulse, sample_stride_ns=sample_stride_ns)


@dataclass(frozen=True, eq=False)
class CalibrationOutcome:
    """Calibrated gate time, the curve sampled around it and, for CZ, the ramp tuning."""

    kind: str
    solution: GateTimeSolution
    curve: list[CurvePoint]
    family: PulseFamily
    tuning: Optional[RampTuning] = None

    @property
    def report(self) -> GateReport:
        return self.solution.report

    def runlog_record(self, config_hash: str, bracket: Sequence[float]) -> dict[str, Any]:
        record = {
            "command": "calibrate",
            "gate_kind": self.kind,
            "config_hash": config_hash,
            "target_angle": self.solution.target_angle,
            "bracket_ns": [float(b) for b in bracket],
            "gate_time_ns": self.solution.gate_time,
            "angle": self.solution.angle,
            "curve_angles": [p.angle for p in self.curve],
            "avg_fidelity": self.report.avg_fidelity,
            "leakage": [float(v) for v in self.report.leakage],
        }
        if self.tuning is not None:
            record["ramp_coeffs"] = list(self.tuning.coeffs)
            record["tuning_status"] = self.tuning.status
        return record


def _finish_calibration(
    ctx: SimulationContext,
    outcome: CalibrationOutcome,
    bracket: Sequence[float],
    session: Optional[Session],
    runlog: Optional[RunLog],
) -> CalibrationOutcome:
    if session is not None:
        record_gate_report(session, outcome.report, "calibrate", target_angle=outcome.solution.target_angle)
        session.flush()
    if runlog is not None:
        runlog.append(outcome.runlog_record(ctx.config_hash, bracket))
    return outcome


def calibrate_gate(
    ctx: SimulationContext,
    kind: str,
    bracket: Sequence[float],
    *,
    target_angle: Optional[float] = None,
    curve_times: Optional[Sequence[float]] = None,
    family: Optional[PulseFamily] = None,
    session: Optional[Session] = None,
    runlog: Optional[RunLog] = None,
    threads: Optional[int] = None,
) -> CalibrationOutcome:
    """Sample the angle curve and solve for the gate time reaching ``target_angle``.

    Parameters
    ----------
    bracket : Sequence[float]
        Gate-time bracket ``(lo, hi)`` in ns.
    target_angle : Optional[float], default: None
        Target in rad; defaults to the gate kind's target (pi/4 or pi).
    curve_times : Optional[Sequence[float]], default: None
        Times of the reported curve; nine points across the bracket by default.
    family : Optional[PulseFamily], default: None
        Pulse family to calibrate; defaults to the configured one.

    Raises
    ------
    CalibrationBracketError
        If the bracket does not straddle the target.
    """
    lo, hi = (float(b) for b in bracket)
    if not 0.0 < lo < hi:
        raise ConfigurationError(f"gate-time bracket must satisfy 0 < lo < hi (got {lo}, {hi})")
    gate_kind = DEFAULT_GATE_REGISTRY.get(kind)
    target = gate_kind.target_angle if target_angle is None else float(target_angle)
    family = family or pulse_family(ctx, kind, threads=threads)
    simulator = make_simulator(ctx, threads=1)

    times = list(curve_times) if curve_times is not None else list(np.linspace(lo, hi, 9))
    curve = angle_vs_time(simulator, kind, family, times, target_angle=target, threads=threads)
    solution = solve_gate_time(
        simulator,
        kind,
        family,
        target,
        (lo, hi),
        angle_tol=ctx.config.calibration.angle_tol,
        threads=threads,
    )
    outcome = CalibrationOutcome(kind=kind, solution=solution, curve=curve, family=family)
    return _finish_calibration(ctx, outcome, (lo, hi), session, runlog)


def calibrate_cz(
    ctx: SimulationContext,
    bracket: Sequence[float],
    *,
    target_angle: Optional[float] = None,
    tune_gate_time: Optional[float] = None,
    budget: Optional[int] = None,
    curve_times: Optional[Sequence[float]] = None,
    session: Optional[Session] = None,
    runlog: Optional[RunLog] = None,
    threads: Optional[int] = None,
) -> CalibrationOutcome:
    """Calibrate a CZ gate.

    The dc peak is placed at the ``|zeta_ZZ|`` maximum, the ramp corrections
    are tuned for minimal leakage at ``tune_gate_time`` (the configured dc
    gate time by default), and the gate time reaching ``phi_CPHASE = pi`` is
    then solved inside ``bracket`` (``target_angle`` overrides pi).
    """
    calibration = ctx.config.calibration
    family = dc_family(ctx, threads=threads)
    tuning_time = tune_gate_time if tune_gate_time is not None else ctx.config.dc.gate_time_ns
    tuning = tune_dc_ramp(
        make_simulator(ctx, threads=1),
        family,
        tuning_time,
        calibration.tune_budget if budget is None else budget,
        kind="cz",
        step=calibration.tune_step,
        min_step=calibration.tune_min_step,
        threads=threads,
    )
    tuned = family.with_coeffs(tuning.coeffs)
    outcome = calibrate_gate(
        ctx,
        "cz",
        bracket,
        target_angle=math.pi if target_angle is None else target_angle,
        curve_times=curve_times,
        family=tuned,
        threads=threads,
    )
    outcome = replace(outcome, tuning=tuning)
    return _finish_calibration(ctx, outcome, bracket, session, runlog)


__all__ = [
    "CalibrationOutcome",
    "SimulationContext",
    "ac_family",
    "build_config_model",
    "build_pulse",
    "calibrate_cz",
    "calibrate_gate",
    "dc_family",
    "default_gate_time",
    "make_simulator",
    "prepare_context",
    "pulse_family",
    "simulate_gate",
    "with_pulse_overrides",
]
