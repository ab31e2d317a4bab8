"""Structured-text (TOML) run configuration.

A config file mirrors the parameter table field names with units embedded in
the keys::

    reference_defaults = true          # optional: fill missing device fields

    [device]
    r_j = 0.3
    charge_cutoff = 10

    [device.capacitance]
    c11_fF = 60.0
    c13_fF = 6.0

    [device.frequencies]
    omega1_GHz = 7.0

Every table other than ``[device]`` is optional.
"""

from __future__ import annotations

import hashlib
import json
import logging
import math
import tomllib
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Mapping, Optional, Sequence, Union

from ..errors import ConfigurationError
from .params import N_TRANSMONS, DeviceParams, cap_field_name, reference_device

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

DEFAULTS_FLAGS = ("reference_defaults", "reference-defaults", "paper_defaults", "paper-defaults")


@dataclass(frozen=True)
class SpectrumSettings:
    eigen_count: int = 20
    grid_start_over_pi: float = 0.3
    grid_stop_over_pi: float = 0.9
    grid_points: int = 121
    idle_bracket_over_pi: tuple[float, float] = (0.6, 0.7)
    peak_bracket_stop_over_pi: float = 0.9
    # 0 keeps the full charge basis
    truncation_levels: int = 0


@dataclass(frozen=True)
class AcPulseSettings:
    alpha_over_pi: float = 0.1575
    beta_per_ns: float = 0.3
    gate_time_ns: float = 24.0


@dataclass(frozen=True)
class DcPulseSettings:
    gate_time_ns: float = 18.0
    ramp_fraction: float = 1.0
    ramp_coeffs: tuple[float, ...] = ()
    max_overshoot_over_pi: float = 0.02
    # None: take the |zeta_ZZ| maximum
    theta_peak_over_pi: Optional[float] = None


@dataclass(frozen=True)
class DynamicsSettings:
    tol: float = 1e-10


@dataclass(frozen=True)
class CalibrationSettings:
    tune_budget: int = 40
    tune_step: float = 0.05
    tune_min_step: float = 1e-3
    angle_tol: float = 1e-4


@dataclass(frozen=True)
class RunConfig:
    """Complete configuration of a simulator run."""

    device: DeviceParams
    spectrum: SpectrumSettings = field(default_factory=SpectrumSettings)
    ac: AcPulseSettings = field(default_factory=AcPulseSettings)
    dc: DcPulseSettings = field(default_factory=DcPulseSettings)
    dynamics: DynamicsSettings = field(default_factory=DynamicsSettings)
    calibration: CalibrationSettings = field(default_factory=CalibrationSettings)

    def to_json(self) -> dict[str, Any]:
        return {
            "device": self.device.to_json(),
            "spectrum": asdict(self.spectrum),
            "pulses": {"ac": asdict(self.ac), "dc": asdict(self.dc)},
            "dynamics": asdict(self.dynamics),
            "calibration": asdict(self.calibration),
        }

    def config_hash(self) -> str:
        """Short SHA-1 of the canonical JSON form, used as a provenance header."""
        canonical = json.dumps(self.to_json(), sort_keys=True, default=list)
        return hashlib.sha1(canonical.encode("utf-8")).hexdigest()[:12]


def _read_toml(path: PathLike) -> dict[str, Any]:
    file_path = Path(path)
    if not file_path.exists():
        raise ConfigurationError(f"config file not found: {file_path}")
    try:
        with file_path.open("rb") as fh:
            return tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"cannot parse config file {file_path}: {exc}") from exc


def _number(value: Any, name: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ConfigurationError(f"{name} must be a number (got {value!r})")
    if not math.isfinite(float(value)):
        raise ConfigurationError(f"{name} must be finite")
    return float(value)


def _check_keys(table: Mapping[str, Any], allowed: set[str], where: str) -> None:
    for key in table:
        if key not in allowed:
            raise ConfigurationError(f"unknown key '{where}.{key}'")


def _table(data: Mapping[str, Any], key: str, where: str) -> dict[str, Any]:
    value = data.get(key, {})
    if not isinstance(value, dict):
        raise ConfigurationError(f"'{where}' must be a table")
    return value


def _device_from_mapping(data: Mapping[str, Any]) -> DeviceParams:
    use_defaults = any(bool(data.get(flag, False)) for flag in DEFAULTS_FLAGS)
    device = _table(data, "device", "device")
    _check_keys(device, {"r_j", "charge_cutoff", "capacitance", "frequencies"}, "device")
    caps = _table(device, "capacitance", "device.capacitance")
    freqs = _table(device, "frequencies", "device.frequencies")

    reference = reference_device()
    cap_names = {
        cap_field_name(i, j): (i, j)
        for i in range(N_TRANSMONS)
        for j in range(i, N_TRANSMONS)
    }
    freq_names = {f"omega{i + 1}_GHz": i for i in range(N_TRANSMONS)}
    _check_keys(caps, set(cap_names), "device.capacitance")
    _check_keys(freqs, set(freq_names), "device.frequencies")

    def _required(table: Mapping[str, Any], key: str, where: str, fallback: float) -> float:
        if key in table:
            return _number(table[key], f"{where}.{key}")
        if use_defaults:
            return fallback
        raise ConfigurationError(f"missing field '{where}.{key}'")

    rows = [[0.0] * N_TRANSMONS for _ in range(N_TRANSMONS)]
    for name, (i, j) in cap_names.items():
        value = _required(caps, name, "device.capacitance", reference.cap[i][j])
        rows[i][j] = value
        rows[j][i] = value

    qubit_freqs = [0.0] * N_TRANSMONS
    for name, i in freq_names.items():
        qubit_freqs[i] = _required(freqs, name, "device.frequencies", reference.qubit_freqs[i])

    r_j = _required(device, "r_j", "device", reference.r_j)
    cutoff = device.get("charge_cutoff", reference.charge_cutoff)
    if isinstance(cutoff, bool) or not isinstance(cutoff, int):
        raise ConfigurationError(f"device.charge_cutoff must be an integer (got {cutoff!r})")

    return DeviceParams(
        cap=tuple(tuple(row) for row in rows),
        qubit_freqs=tuple(qubit_freqs),
        r_j=r_j,
        charge_cutoff=cutoff,
    )


def load_config(path: PathLike) -> DeviceParams:
    """Load and validate the ``[device]`` part of a config file.

    Missing fields fall back to the reference design values only when the
    file sets ``reference_defaults = true``.

    Raises
    ------
    ConfigurationError
        On parse failures, missing fields, or invariant violations. The
        message names the offending field.
    """
    params = _device_from_mapping(_read_toml(path))
    logger.debug(f"Loaded device parameters from {path}")
    return params


def _settings_from_table(cls: type, table: Mapping[str, Any], where: str) -> Any:
    defaults = cls()
    allowed = set(asdict(defaults))
    _check_keys(table, allowed, where)
    values: dict[str, Any] = {}
    for key, raw in table.items():
        default = getattr(defaults, key)
        name = f"{where}.{key}"
        if isinstance(default, tuple) or key == "ramp_coeffs":
            if not isinstance(raw, list):
                raise ConfigurationError(f"{name} must be an array")
            values[key] = tuple(_number(v, name) for v in raw)
        elif isinstance(default, bool):
            values[key] = bool(raw)
        elif isinstance(default, int):
            if isinstance(raw, bool) or not isinstance(raw, int):
                raise ConfigurationError(f"{name} must be an integer (got {raw!r})")
            values[key] = raw
        else:
            values[key] = _number(raw, name)
    return cls(**{**asdict(defaults), **values})


def override_settings(settings: Any, values: Mapping[str, Any], where: str) -> Any:
    """Return ``settings`` with ``values`` applied, validated like the config table ``where``."""
    parsed = _settings_from_table(type(settings), values, where)
    return replace(settings, **{key: getattr(parsed, key) for key in values})


def parse_overrides(assignments: Sequence[str]) -> dict[str, Any]:
    """Parse ``key=value`` strings whose values use TOML syntax (``ramp_coeffs=[0.01, 0]``)."""
    try:
        return tomllib.loads("\n".join(assignments))
    except tomllib.TOMLDecodeError as exc:
        raise ConfigurationError(f"cannot parse overrides {list(assignments)!r}: {exc}") from exc


def run_config_from_mapping(data: Mapping[str, Any]) -> RunConfig:
    """Build a :class:`RunConfig` from an already-parsed mapping."""
    _check_keys(
        data,
        {"device", "spectrum", "pulses", "dynamics", "calibration", *DEFAULTS_FLAGS},
        "config",
    )
    pulses = _table(data, "pulses", "pulses")
    _check_keys(pulses, {"ac", "dc"}, "pulses")
    spectrum = _settings_from_table(SpectrumSettings, _table(data, "spectrum", "spectrum"), "spectrum")
    if len(spectrum.idle_bracket_over_pi) != 2:
        raise ConfigurationError("spectrum.idle_bracket_over_pi must hold two values")
    return RunConfig(
        device=_device_from_mapping(data),
        spectrum=spectrum,
        ac=_settings_from_table(AcPulseSettings, _table(pulses, "ac", "pulses.ac"), "pulses.ac"),
        dc=_settings_from_table(DcPulseSettings, _table(pulses, "dc", "pulses.dc"), "pulses.dc"),
        dynamics=_settings_from_table(DynamicsSettings, _table(data, "dynamics", "dynamics"), "dynamics"),
        calibration=_settings_from_table(
            CalibrationSettings, _table(data, "calibration", "calibration"), "calibration"
        ),
    )


def load_run_config(path: Optional[PathLike] = None) -> RunConfig:
    """Load a full run configuration; ``None`` gives the reference device with defaults."""
    if path is None:
        return RunConfig(device=reference_device())
    return run_config_from_mapping(_read_toml(path))


__all__ = [
    "AcPulseSettings",
    "CalibrationSettings",
    "DcPulseSettings",
    "DynamicsSettings",
    "RunConfig",
    "SpectrumSettings",
    "load_config",
    "load_run_config",
    "override_settings",
    "parse_overrides",
    "run_config_from_mapping",
]
