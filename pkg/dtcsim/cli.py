"""Command-line entry point: ``dtcsim <command> ...``.

Exit codes: 0 success, 2 configuration or usage error, 3 numerical failure,
4 calibration bracket failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import re
import sys
from contextlib import contextmanager
from dataclasses import replace
from pathlib import Path
from typing import Iterator, Optional, Sequence

import numpy as np
from sqlalchemy import inspect
from sqlalchemy.orm import Session

from .calibration.curves import curve_table, fidelity_vs_angle
from .calibration.runlog import RunLog
from .db.engine import make_engine
from .device.config import RunConfig, load_run_config, parse_overrides
from .device.params import device_summary
from .errors import ConfigurationError, DtcSimError, exit_code_for
from .gates.registry import DEFAULT_GATE_REGISTRY
from .models import SimulationRun
from .pulses.io import pulse_to_dict, sample_pulse
from .settings import get_settings
from .spectrum.sweep import cutoff_convergence, sweep_spectrum, sweep_table
from .tables import write_table
from .workflows import (
    build_config_model,
    build_pulse,
    calibrate_cz,
    calibrate_gate,
    prepare_context,
    simulate_gate,
    with_pulse_overrides,
)

logger = logging.getLogger(__name__)

_ANGLE_RE = re.compile(r"^(?P<coef>[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)?\s*\*?\s*pi(?:\s*/\s*(?P<div>\d+\.?\d*))?$")


def parse_angle(text: str) -> float:
    """Parse ``"pi"``, ``"0.25pi"``, ``"pi/4"`` or a plain number of radians."""
    raw = text.strip().lower()
    match = _ANGLE_RE.match(raw)
    if match:
        coef = float(match.group("coef")) if match.group("coef") else 1.0
        div = float(match.group("div")) if match.group("div") else 1.0
        return coef * math.pi / div
    try:
        return float(raw)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid angle {text!r}") from None


def parse_bracket(text: str) -> tuple[float, float]:
    """Parse ``"lo:hi"`` with ``0 < lo < hi``."""
    parts = text.split(":")
    try:
        lo, hi = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bracket must look like LO:HI (got {text!r})") from None
    if not 0.0 < lo < hi:
        raise argparse.ArgumentTypeError(f"bracket needs 0 < LO < HI (got {text!r})")
    return lo, hi


def parse_grid(text: str) -> list[float]:
    """Parse ``"start:stop:count"`` or a single value, in units of pi, into radians."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return [float(parts[0]) * math.pi]
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except (ValueError, IndexError):
        raise argparse.ArgumentTypeError(f"grid must look like START:STOP:COUNT (got {text!r})") from None
    if count < 1 or (count > 1 and not start < stop):
        raise argparse.ArgumentTypeError(f"grid needs COUNT >= 1 and START < STOP (got {text!r})")
    return list(np.linspace(start, stop, count) * math.pi)


def parse_times(text: str) -> list[float]:
    """Parse ``"start:stop:count"`` gate times in ns."""
    parts = text.split(":")
    try:
        start, stop, count = float(parts[0]), float(parts[1]), int(parts[2])
    except (ValueError, IndexError):
        raise argparse.ArgumentTypeError(f"times must look like START:STOP:COUNT (got {text!r})") from None
    if count < 2 or not 0.0 < start < stop:
        raise argparse.ArgumentTypeError(f"times need COUNT >= 2 and 0 < START < STOP (got {text!r})")
    return list(np.linspace(start, stop, count))


def parse_cutoffs(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"cutoffs must be comma-separated integers (got {text!r})") from None


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    kinds = sorted(DEFAULT_GATE_REGISTRY.available_kinds())

    parser = argparse.ArgumentParser(
        prog="dtcsim",
        description="Spectra, gate simulation and calibration of two transmons coupled by a double-transmon coupler.",
    )
    parser.add_argument("--config", default=settings.config_path, help="Run-config TOML file (env DTCSIM_CONFIG).")
    parser.add_argument("--threads", type=int, default=settings.threads, help="Worker cap (env DTCSIM_THREADS).")
    parser.add_argument("--log-level", default=settings.log_level, help="Log level (env DTCSIM_LOG_LEVEL).")
    parser.add_argument("--cutoff", type=int, help="Override the charge cutoff N.")
    parser.add_argument("--eigen-count", type=int, help="Override the number of eigenpairs k.")
    parser.add_argument("--tol", type=float, help="Override the propagation tolerance.")
    parser.add_argument(
        "--db",
        nargs="?",
        const="",
        default=None,
        metavar="URL",
        help="Persist gate and calibration results (URL defaults to DTCSIM_DB_URL).",
    )
    parser.add_argument("--print-derived", action="store_true", help="Print derived device parameters and exit.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")

    p_sweep = sub.add_parser("sweep", help="Flux sweep of the spectrum, zeta_ZZ or |g|.")
    p_sweep.add_argument("--what", choices=("spectrum", "zz", "g"), default="spectrum")
    p_sweep.add_argument("--grid", type=parse_grid, help="START:STOP:COUNT in units of pi (config default).")
    p_sweep.add_argument("--out", type=Path, required=True, help="Output CSV.")

    p_gate = sub.add_parser("gate", help="Simulate one gate and score it.")
    p_gate.add_argument("--kind", choices=kinds, required=True)
    p_gate.add_argument("--T", dest="gate_time", type=float, help="Gate time in ns (config default).")
    p_gate.add_argument(
        "--pulse-override",
        "--pulse-overrides",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Override a pulse setting, e.g. alpha_over_pi=0 (repeatable; TOML values).",
    )
    p_gate.add_argument("--report", type=Path, help="Write the JSON gate report here.")
    p_gate.add_argument("--trajectory", type=Path, help="Write computational populations versus time here.")
    p_gate.add_argument("--stride", type=float, default=0.1, help="Trajectory sample stride in ns.")

    p_cal = sub.add_parser("calibrate", help="Solve for the gate time reaching a target angle.")
    p_cal.add_argument("--kind", choices=kinds, required=True)
    p_cal.add_argument("--target", type=parse_angle, help="Target angle, e.g. 0.25pi (gate default).")
    p_cal.add_argument("--bracket", type=parse_bracket, required=True, help="LO:HI gate-time bracket in ns.")
    p_cal.add_argument("--curve", type=parse_times, help="START:STOP:COUNT curve times in ns (bracket default).")
    p_cal.add_argument("--budget", type=int, help="cz only: ramp-tuning simulation budget.")
    p_cal.add_argument("--out", type=Path, required=True, help="Curve CSV; a *_fidelity.csv is written beside it.")
    p_cal.add_argument("--runlog", type=Path, default=Path(settings.runlog_path), help="Run-log file (env DTCSIM_RUNLOG).")

    sub.add_parser("derived", help="Print derived device parameters.")

    p_pulse = sub.add_parser("dump-pulse", help="Sample the configured pulse to CSV.")
    p_pulse.add_argument("--kind", choices=kinds, required=True)
    p_pulse.add_argument("--T", dest="gate_time", type=float, help="Gate time in ns (config default).")
    p_pulse.add_argument("--rate", type=float, default=20.0, help="Samples per ns.")
    p_pulse.add_argument(
        "--pulse-override", "--pulse-overrides", dest="overrides", action="append", default=[], metavar="KEY=VALUE"
    )
    p_pulse.add_argument("--out", type=Path, required=True)

    p_conv = sub.add_parser("convergence", help="Tabulate Delta or zeta_ZZ at the idle point against N.")
    p_conv.add_argument("--quantity", choices=("delta", "zz"), default="delta")
    p_conv.add_argument("--cutoffs", type=parse_cutoffs, required=True, help="Ascending list, e.g. 5,6,7,8.")
    p_conv.add_argument("--out", type=Path, required=True)

    return parser


def _configure_logging(level: str) -> None:
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def _load_config(args: argparse.Namespace) -> RunConfig:
    config = load_run_config(args.config)
    if args.cutoff is not None:
        config = replace(config, device=config.device.replace(charge_cutoff=args.cutoff))
    if args.eigen_count is not None:
        config = replace(config, spectrum=replace(config.spectrum, eigen_count=args.eigen_count))
    if args.tol is not None:
        config = replace(config, dynamics=replace(config.dynamics, tol=args.tol))
    return config


@contextmanager
def _session_scope(db: Optional[str]) -> Iterator[Optional[Session]]:
    if db is None:
        yield None
        return
    engine = make_engine(db or None)
    if not inspect(engine).has_table(SimulationRun.__tablename__):
        raise ConfigurationError("results database has no simulation_runs table; run scripts/init_db.py first")
    with Session(engine) as session, session.begin():
        yield session


def _print_derived(config: RunConfig) -> int:
    print(json.dumps(device_summary(config.device), indent=2))
    return 0


def cmd_sweep(args: argparse.Namespace, config: RunConfig) -> int:
    spectrum = config.spectrum
    grid = args.grid or list(
        np.linspace(spectrum.grid_start_over_pi, spectrum.grid_stop_over_pi, spectrum.grid_points) * math.pi
    )
    model, idle = None, None
    if args.what == "zz":
        _, model = build_config_model(config)
    else:
        ctx = prepare_context(config)
        model, idle = ctx.model, ctx.idle.spectrum
    results = sweep_spectrum(model, grid, spectrum.eigen_count, threads=args.threads)
    frame = sweep_table(results, what=args.what, model=model, idle=idle)
    write_table(frame, args.out, config.config_hash())
    return 0


def cmd_gate(args: argparse.Namespace, config: RunConfig) -> int:
    config = with_pulse_overrides(config, args.kind, parse_overrides(args.overrides))
    stride = args.stride if args.trajectory else None
    with _session_scope(args.db) as session:
        ctx = prepare_context(config)
        report = simulate_gate(
            ctx, args.kind, args.gate_time, session=session, sample_stride_ns=stride, threads=args.threads
        )
    print(report.summary())
    if args.report:
        args.report.parent.mkdir(parents=True, exist_ok=True)
        args.report.write_text(json.dumps(report.to_json(), indent=2), encoding="utf-8")
    if args.trajectory and report.trajectory is not None:
        write_table(report.trajectory, args.trajectory, ctx.config_hash)
    return 0


def cmd_calibrate(args: argparse.Namespace, config: RunConfig) -> int:
    runlog = RunLog(args.runlog)
    with _session_scope(args.db) as session:
        ctx = prepare_context(config)
        if args.kind == "cz":
            outcome = calibrate_cz(
                ctx,
                args.bracket,
                target_angle=args.target,
                budget=args.budget,
                curve_times=args.curve,
                session=session,
                runlog=runlog,
                threads=args.threads,
            )
        else:
            outcome = calibrate_gate(
                ctx,
                args.kind,
                args.bracket,
                target_angle=args.target,
                curve_times=args.curve,
                session=session,
                runlog=runlog,
                threads=args.threads,
            )
    write_table(curve_table(outcome.curve), args.out, ctx.config_hash)
    fidelity_path = args.out.with_name(f"{args.out.stem}_fidelity.csv")
    write_table(fidelity_vs_angle(outcome.curve), fidelity_path, ctx.config_hash)
    solution = outcome.solution
    print(f"T* = {solution.gate_time:.6f} ns  angle = {solution.angle / math.pi:.6f} pi")
    print(outcome.report.summary())
    return 0


def cmd_dump_pulse(args: argparse.Namespace, config: RunConfig) -> int:
    config = with_pulse_overrides(config, args.kind, parse_overrides(args.overrides))
    ctx = prepare_context(config)
    pulse = build_pulse(ctx, args.kind, args.gate_time, threads=args.threads)
    logger.info(f"Pulse descriptor: {json.dumps(pulse_to_dict(pulse), sort_keys=True)}")
    write_table(sample_pulse(pulse, args.rate), args.out, ctx.config_hash)
    return 0


def cmd_convergence(args: argparse.Namespace, config: RunConfig) -> int:
    lo, hi = config.spectrum.idle_bracket_over_pi
    frame = cutoff_convergence(
        config.device,
        args.cutoffs,
        args.quantity,
        k=config.spectrum.eigen_count,
        truncation_levels=config.spectrum.truncation_levels or None,
        bracket=(lo * math.pi, hi * math.pi),
    )
    write_table(frame, args.out, config.config_hash())
    return 0


COMMANDS = {
    "sweep": cmd_sweep,
    "gate": cmd_gate,
    "calibrate": cmd_calibrate,
    "derived": lambda args, config: _print_derived(config),
    "dump-pulse": cmd_dump_pulse,
    "convergence": cmd_convergence,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.log_level)
    if args.command is None and not args.print_derived:
        parser.print_help()
        return 2
    try:
        config = _load_config(args)
        if args.print_derived:
            return _print_derived(config)
        return COMMANDS[args.command](args, config)
    except DtcSimError as exc:
        logger.error(f"{type(exc).__name__}: {exc}")
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
