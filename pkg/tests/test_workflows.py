import math
import tempfile
import unittest
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest
from sqlalchemy import create_engine, select
from sqlalchemy.orm import sessionmaker

from dtcsim.calibration import RunLog, angle_vs_time, curve_table
from dtcsim.device import load_run_config, reference_device
from dtcsim.device.constants import rad_s_to_rad_ns
from dtcsim.errors import ConfigurationError
from dtcsim.models import Base, SimulationRun
from dtcsim.pulses import AcPulse, DcPulse
from dtcsim.spectrum import spectrum_at
from dtcsim.spectrum.sweep import IdlePoint
from dtcsim.tables import write_table
from dtcsim.workflows import (
    SimulationContext,
    ac_family,
    build_config_model,
    build_pulse,
    calibrate_cz,
    calibrate_gate,
    dc_family,
    default_gate_time,
    make_simulator,
    prepare_context,
    simulate_gate,
    with_pulse_overrides,
)

THETA0 = 0.6525 * math.pi


def _small_context(**ac_overrides) -> SimulationContext:
    """A truncated low-cutoff context pinned at the reference idle flux."""
    config = load_run_config()
    config = replace(
        config,
        device=reference_device(charge_cutoff=3),
        spectrum=replace(config.spectrum, truncation_levels=3, eigen_count=12),
    )
    if ac_overrides:
        config = with_pulse_overrides(config, "sqiswap", ac_overrides)
    derived, model = build_config_model(config)
    spectrum = spectrum_at(model, THETA0, 12)
    idle = IdlePoint(theta=THETA0, zz=spectrum.zz, spectrum=spectrum)
    return SimulationContext(config=config, derived=derived.with_idle(THETA0), model=model, idle=idle)


class PulseOverrideTests(unittest.TestCase):
    def test_ac_override_changes_hash(self):
        config = load_run_config()
        changed = with_pulse_overrides(config, "sqiswap", {"alpha_over_pi": 0.0})
        self.assertEqual(changed.ac.alpha_over_pi, 0.0)
        self.assertEqual(changed.dc, config.dc)
        self.assertNotEqual(changed.config_hash(), config.config_hash())

    def test_dc_override_and_empty_override(self):
        config = load_run_config()
        self.assertIs(with_pulse_overrides(config, "cz", {}), config)
        changed = with_pulse_overrides(config, "cz", {"ramp_coeffs": [0.01, -0.002]})
        self.assertEqual(changed.dc.ramp_coeffs, (0.01, -0.002))

    def test_bad_overrides(self):
        config = load_run_config()
        with self.assertRaises(ConfigurationError):
            with_pulse_overrides(config, "sqiswap", {"ramp_coeffs": [0.01]})
        with self.assertRaises(KeyError):
            with_pulse_overrides(config, "swap", {"alpha_over_pi": 0.0})


class ContextTests(unittest.TestCase):
    @classmethod
    def setUpClass(cls):
        cls.ctx = _small_context()

    def test_ac_family_is_modulated_at_idle_detuning(self):
        family = ac_family(self.ctx)
        self.assertEqual(family.theta0, THETA0)
        self.assertAlmostEqual(family.alpha, 0.1575 * math.pi)
        self.assertAlmostEqual(family.carrier, rad_s_to_rad_ns(self.ctx.idle.spectrum.delta))

    def test_dc_family_uses_explicit_peak(self):
        family = dc_family(self.ctx, theta_peak=0.78 * math.pi)
        self.assertEqual(family.theta_peak, 0.78 * math.pi)
        self.assertEqual(family.ramp_coeffs, self.ctx.config.dc.ramp_coeffs)

    def test_build_pulse_defaults_to_configured_time(self):
        pulse = build_pulse(self.ctx, "sqiswap")
        self.assertIsInstance(pulse, AcPulse)
        self.assertEqual(pulse.gate_time, 24.0)
        self.assertEqual(default_gate_time(self.ctx, "cz"), 18.0)
        self.assertEqual(build_pulse(self.ctx, "sqiswap", 12.0).gate_time, 12.0)

    def test_config_hash_matches_config(self):
        self.assertEqual(self.ctx.config_hash, self.ctx.config.config_hash())
        self.assertEqual(self.ctx.k, 12)


class SimulateGateTests(unittest.TestCase):
    def setUp(self):
        self.engine = create_engine("sqlite+pysqlite:///:memory:", future=True)
        Base.metadata.create_all(self.engine)
        self.Session = sessionmaker(bind=self.engine, future=True, expire_on_commit=False)

    def tearDown(self):
        self.engine.dispose()

    def test_idle_gate_is_persisted_once(self):
        ctx = _small_context(alpha_over_pi=0.0)
        with self.Session() as session, session.begin():
            first = simulate_gate(ctx, "sqiswap", 0.4, session=session)
            simulate_gate(ctx, "sqiswap", 0.4, session=session)
        self.assertAlmostEqual(first.avg_fidelity, 1.0, places=7)
        self.assertEqual(first.config_hash, ctx.config_hash)
        with self.Session() as session:
            runs = session.scalars(select(SimulationRun)).all()
            self.assertEqual(len(runs), 1)
            self.assertEqual(runs[0].command, "gate")
            self.assertEqual(runs[0].config_hash, ctx.config_hash)

    def test_reversed_bracket_is_rejected(self):
        ctx = _small_context()
        with self.assertRaises(ConfigurationError):
            calibrate_gate(ctx, "sqiswap", (28.0, 20.0))


class CurveDeterminismTests(unittest.TestCase):
    def test_repeated_curves_write_identical_csv(self) -> None:
        ctx = _small_context()
        times = [0.3, 0.4, 0.5]
        with tempfile.TemporaryDirectory() as tmp:
            paths = []
            for name, threads in (("first.csv", 1), ("second.csv", 3)):
                curve = angle_vs_time(make_simulator(ctx), "sqiswap", ac_family(ctx), times, threads=threads)
                paths.append(write_table(curve_table(curve), Path(tmp) / name, ctx.config_hash))
            self.assertEqual(paths[0].read_bytes(), paths[1].read_bytes())


@pytest.mark.slow
def test_sqiswap_calibration_at_full_cutoff():
    ctx = prepare_context(load_run_config())
    with tempfile.TemporaryDirectory() as tmp:
        runlog = RunLog(Path(tmp) / "runlog.jsonl")
        outcome = calibrate_gate(ctx, "sqiswap", (20.0, 28.0), runlog=runlog)
        assert len(runlog.records()) == 1
    assert abs(outcome.solution.gate_time - 24.0) <= 2.0
    assert outcome.report.avg_fidelity >= 0.999
    leakage = outcome.report.leakage
    assert set(sorted(range(4), key=lambda i: leakage[i])[-2:]) == {1, 3}


@pytest.mark.slow
def test_exchange_angle_grows_linearly_with_gate_time():
    ctx = prepare_context(load_run_config())
    times = np.linspace(8.0, 32.0, 7)
    curve = angle_vs_time(make_simulator(ctx), "sqiswap", ac_family(ctx), times)
    angles = np.array([p.angle for p in curve])
    fit = np.polyval(np.polyfit(times, angles, 1), times)
    r_squared = 1.0 - np.sum((angles - fit) ** 2) / np.sum((angles - angles.mean()) ** 2)
    assert r_squared > 0.99


@pytest.mark.slow
def test_cphase_angle_grows_linearly_with_gate_time():
    ctx = prepare_context(load_run_config())
    times = np.linspace(10.0, 26.0, 9)
    curve = angle_vs_time(make_simulator(ctx), "cz", dc_family(ctx), times, target_angle=math.pi)
    angles = np.array([p.angle for p in curve])
    fit = np.polyval(np.polyfit(times, angles, 1), times)
    r_squared = 1.0 - np.sum((angles - fit) ** 2) / np.sum((angles - angles.mean()) ** 2)
    assert r_squared > 0.99


@pytest.mark.slow
def test_cz_calibration_at_full_cutoff():
    ctx = prepare_context(load_run_config())
    outcome = calibrate_cz(ctx, (14.0, 22.0))
    assert abs(outcome.solution.gate_time - 18.0) <= 2.0
    assert abs(outcome.solution.angle - math.pi) <= 1e-4
    assert outcome.report.avg_fidelity >= 0.999
    assert outcome.tuning is not None
    assert isinstance(outcome.family.at(18.0), DcPulse)


if __name__ == "__main__":
    unittest.main()
