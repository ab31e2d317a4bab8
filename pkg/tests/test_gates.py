from __future__ import annotations

import math
import unittest

import numpy as np
import pytest
from scipy.stats import unitary_group
from sqlalchemy import create_engine, func, select
from sqlalchemy.orm import sessionmaker

from dtcsim.device import derive_params, reference_device
from dtcsim.errors import FitError
from dtcsim.gates import (
    CPHASE,
    DEFAULT_GATE_REGISTRY,
    PARAMETRIC,
    GateKind,
    GateKindRegistry,
    GateSimulator,
    average_fidelity,
    cphase_unitary,
    extract_u_prime,
    fit_cphase,
    fit_parametric,
    leakage_rates,
    parametric_unitary,
)
from dtcsim.models import Base, SimulationRun
from dtcsim.operators import build_model
from dtcsim.pulses import AcPulse
from dtcsim.spectrum import spectrum_at

THETA0 = 0.6525 * math.pi


class FitTests(unittest.TestCase):
    def test_parametric_fit_recovers_parameters(self) -> None:
        u = parametric_unitary(0.3, 0.4, -1.1, 2.0)
        fit = fit_parametric(u)
        self.assertEqual(fit.kind, PARAMETRIC)
        self.assertAlmostEqual(fit.angle, 0.3, places=10)
        self.assertAlmostEqual(fit.phases["phi11"], 0.4, places=10)
        self.assertAlmostEqual(fit.phases["phi22"], -1.1, places=10)
        self.assertAlmostEqual(fit.phases["phi12"], 2.0, places=10)
        np.testing.assert_allclose(fit.u_id, u, atol=1e-10)

    def test_sqrt_iswap_angle(self) -> None:
        fit = fit_parametric(parametric_unitary(math.pi / 4, 0.0, 0.0, 0.0))
        self.assertAlmostEqual(fit.angle, math.pi / 4, places=12)

    def test_vanishing_exchange_sets_phi12_to_zero(self) -> None:
        fit = fit_parametric(np.eye(4, dtype=complex))
        self.assertEqual(fit.angle, 0.0)
        self.assertEqual(fit.phases["phi12"], 0.0)

    def test_cphase_fit_and_wrapping(self) -> None:
        fit = fit_cphase(cphase_unitary(0.2, -0.5, 0.2 - 0.5 + math.pi))
        self.assertEqual(fit.kind, CPHASE)
        self.assertAlmostEqual(fit.angle, math.pi, places=12)
        wrapped = fit_cphase(cphase_unitary(0.3, 0.3, 0.5))
        self.assertAlmostEqual(wrapped.angle, 2.0 * math.pi - 0.1, places=12)

    def test_zero_diagonal_cannot_be_fitted(self) -> None:
        u = parametric_unitary(math.pi / 2, 0.0, 0.0, 0.0)
        with self.assertRaises(FitError):
            fit_parametric(u)
        with self.assertRaises(FitError):
            fit_cphase(np.diag([1.0, 0.0, 1.0, 1.0]).astype(complex))


class FidelityAndLeakageTests(unittest.TestCase):
    def test_unitary_matches_itself(self) -> None:
        u = unitary_group.rvs(4, random_state=7)
        self.assertAlmostEqual(average_fidelity(u, u), 1.0, places=12)
        np.testing.assert_allclose(leakage_rates(u), 0.0, atol=1e-12)

    def test_uniform_loss(self) -> None:
        u_prime = 0.99 * np.eye(4, dtype=complex)
        leakage = leakage_rates(u_prime)
        np.testing.assert_allclose(leakage, 0.0199, rtol=1e-12)
        fidelity = average_fidelity(u_prime, np.eye(4))
        self.assertAlmostEqual(fidelity, 0.9801, places=12)
        self.assertGreaterEqual(1.0 - fidelity, leakage.sum() / 20.0)

    def test_fidelity_bounded_by_leakage_for_random_contractions(self) -> None:
        rng = np.random.default_rng(5)
        for seed in range(5):
            u = unitary_group.rvs(4, random_state=seed)
            u_prime = u @ np.diag(rng.uniform(0.9, 1.0, 4))
            fidelity = average_fidelity(u_prime, u)
            self.assertLessEqual(fidelity, 1.0)
            self.assertGreaterEqual(1.0 - fidelity, leakage_rates(u_prime).sum() / 20.0 - 1e-12)

    def test_global_phase_does_not_change_fidelity(self) -> None:
        u = unitary_group.rvs(4, random_state=3)
        u_prime = u @ np.diag([0.99, 0.97, 1.0, 0.98])
        reference = average_fidelity(u_prime, u)
        for chi in (0.3, -2.1, math.pi):
            phase = np.exp(1j * chi)
            self.assertAlmostEqual(average_fidelity(phase * u_prime, phase * u), reference, places=12)
            self.assertAlmostEqual(average_fidelity(phase * u_prime, u), reference, places=12)

    def test_shape_check(self) -> None:
        with self.assertRaises(ValueError):
            average_fidelity(np.eye(3), np.eye(4))


class ExtractionTests(unittest.TestCase):
    def setUp(self) -> None:
        q, _ = np.linalg.qr(unitary_group.rvs(8, random_state=3))
        self.basis = q[:, :4]
        self.freqs = np.array([0.0, 4.4e10, 4.8e10, 9.2e10])

    def test_idle_evolution_gives_identity(self) -> None:
        gate_time = 24.0
        finals = self.basis * np.exp(-1j * (self.freqs * gate_time * 1e-9 + 0.7))
        u_prime = extract_u_prime(finals, self.basis, self.freqs, gate_time)
        np.testing.assert_allclose(u_prime, np.eye(4), atol=1e-10)

    def test_global_phase_requires_ground_overlap(self) -> None:
        finals = self.basis[:, [1, 0, 2, 3]]
        with self.assertRaises(FitError):
            extract_u_prime(finals, self.basis, self.freqs, 10.0)


class RegistryTests(unittest.TestCase):
    def test_default_kinds(self) -> None:
        kinds = DEFAULT_GATE_REGISTRY.available_kinds()
        self.assertEqual(set(kinds), {"sqiswap", "cz"})
        self.assertEqual(kinds["sqiswap"].pulse_kind, "ac")
        self.assertAlmostEqual(kinds["cz"].target_angle, math.pi)

    def test_duplicate_and_unknown_keys(self) -> None:
        registry = GateKindRegistry()
        kind = GateKind(key="iswap", fit=fit_parametric, pulse_kind="ac", target_angle=math.pi / 2)
        registry.register(kind)
        with self.assertRaises(ValueError):
            registry.register(kind)
        registry.register(kind, replace=True)
        with self.assertRaises(KeyError):
            registry.get("swap")

    def test_report_serialization(self) -> None:
        report = DEFAULT_GATE_REGISTRY.evaluate("cz", cphase_unitary(0.0, 0.0, math.pi), 18.0)
        data = report.to_json()
        self.assertAlmostEqual(data["phi_cphase"], math.pi)
        self.assertAlmostEqual(data["angle_over_pi"], 1.0)
        self.assertEqual(set(data["leakage"]), {"00", "01", "10", "11"})
        self.assertEqual(len(data["u_prime"]["real"]), 4)
        self.assertIn("phi_cphase=1.000000 pi", report.summary())


class GateSimulatorTests(unittest.TestCase):
    """A zero-amplitude pulse leaves the idle states untouched."""

    @classmethod
    def setUpClass(cls) -> None:
        cls.model = build_model(derive_params(reference_device(charge_cutoff=4)), 4, truncation_levels=3)
        cls.idle = spectrum_at(cls.model, THETA0, 12)
        cls.pulse = AcPulse(theta0=THETA0, alpha=0.0, beta=0.3, gate_time=0.5, carrier=4.4)

    def setUp(self) -> None:
        self.engine = create_engine("sqlite+pysqlite:///:memory:", future=True)
        Base.metadata.create_all(self.engine)
        self.Session = sessionmaker(bind=self.engine, future=True, expire_on_commit=False)

    def tearDown(self) -> None:
        self.engine.dispose()

    def test_idle_pulse_is_identity(self) -> None:
        simulator = GateSimulator(self.model, self.idle, config_hash="abc123")
        report = simulator.run("sqiswap", self.pulse)
        np.testing.assert_allclose(report.u_prime, np.eye(4), atol=1e-7)
        self.assertAlmostEqual(report.avg_fidelity, 1.0, places=7)
        self.assertLess(report.total_leakage, 1e-8)
        self.assertAlmostEqual(report.angle, 0.0, places=6)
        self.assertEqual(report.config_hash, "abc123")
        self.assertEqual(len(report.propagation), 4)

    def test_trajectory_has_populations_and_leakage(self) -> None:
        report = GateSimulator(self.model, self.idle).simulate("sqiswap", self.pulse, sample_stride_ns=0.1)
        frame = report.trajectory
        self.assertEqual(set(frame["initial"]), {"00", "01", "10", "11"})
        self.assertIn("leakage", frame.columns)
        start = frame[(frame["initial"] == "10") & (frame["t_ns"] == 0.0)]
        self.assertAlmostEqual(float(start["P_10"].iloc[0]), 1.0, places=10)

    def test_reruns_update_a_single_row(self) -> None:
        with self.Session() as session, session.begin():
            simulator = GateSimulator(self.model, self.idle, config_hash="abc123", session=session)
            simulator.run("cz", self.pulse)
            simulator.run("cz", self.pulse, target_angle=math.pi)
        with self.Session() as session:
            self.assertEqual(session.scalar(select(func.count()).select_from(SimulationRun)), 1)
            run = session.scalars(select(SimulationRun)).one()
            self.assertEqual(run.gate_kind, "cz")
            self.assertEqual(run.target_angle, math.pi)
            self.assertEqual(len(run.leakage), 4)
            self.assertEqual(run.report["gate_time_ns"], 0.5)

    def test_batch_keeps_input_order(self) -> None:
        simulator = GateSimulator(self.model, self.idle)
        pulses = [self.pulse.with_gate_time(t) for t in (0.3, 0.2)]
        reports = simulator.run_batch("sqiswap", pulses, threads=2)
        self.assertEqual([r.gate_time for r in reports], [0.3, 0.2])

    def test_unknown_kind(self) -> None:
        with self.assertRaises(KeyError):
            GateSimulator(self.model, self.idle).run("swap", self.pulse)


@pytest.mark.parametrize("theta", [0.0, math.pi / 8, math.pi / 4])
def test_parametric_unitary_is_unitary(theta: float) -> None:
    u = parametric_unitary(theta, 0.1, 0.2, 0.3)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(4), atol=1e-12)


if __name__ == "__main__":
    unittest.main()
