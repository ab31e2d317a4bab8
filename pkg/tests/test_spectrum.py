from __future__ import annotations

import math
import unittest

import numpy as np
import pytest
import scipy.sparse as sp

from dtcsim.device import DeviceParams, derive_params, reference_device
from dtcsim.device.params import TABLE_I_FREQUENCIES
from dtcsim.errors import ConfigurationError, LabelingError, NoInteriorExtremumError
from dtcsim.operators import build_model
from dtcsim.operators.hamiltonian import bare_transmon_eigensystem
from dtcsim.spectrum import (
    COMPUTATIONAL_LABELS,
    Eigenpairs,
    cutoff_convergence,
    effective_coupling,
    eigensolve,
    find_idle_point,
    label_states,
    locate_interior_maximum,
    locate_interior_minimum,
    spectrum_at,
    sweep_spectrum,
    sweep_table,
)
from dtcsim.spectrum.sweep import TAG_COMPUTATIONAL


def _decoupled_device(cutoff: int) -> DeviceParams:
    # Only the two coupler transmons touch each other.
    cap = np.diag([60.0, 60.0, 60.0, 60.0])
    cap[2, 3] = cap[3, 2] = 1.0
    return DeviceParams(cap=tuple(map(tuple, cap)), qubit_freqs=TABLE_I_FREQUENCIES, charge_cutoff=cutoff)


def _random_hermitian(dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return 0.5 * (a + a.conj().T)


class EigensolveTests(unittest.TestCase):
    def test_dense_path_matches_numpy(self) -> None:
        h = _random_hermitian(40, seed=1)
        pairs = eigensolve(sp.csr_matrix(h), 6)
        np.testing.assert_allclose(pairs.values, np.linalg.eigvalsh(h)[:6], rtol=1e-10, atol=1e-10)

    def test_sparse_path_matches_numpy(self) -> None:
        rng = np.random.default_rng(3)
        perturbation = sp.random(300, 300, density=0.02, random_state=rng) * 0.01
        h = sp.diags(np.arange(300, dtype=float)) + perturbation + perturbation.T
        pairs = eigensolve(sp.csr_matrix(h, dtype=complex), 6, dense_limit=10)
        np.testing.assert_allclose(pairs.values, np.linalg.eigvalsh(h.toarray())[:6], atol=1e-9)

    def test_vectors_are_orthonormal_and_phase_fixed(self) -> None:
        pairs = eigensolve(sp.csr_matrix(_random_hermitian(30, seed=2)), 5)
        np.testing.assert_allclose(pairs.vectors.conj().T @ pairs.vectors, np.eye(5), atol=1e-10)
        for i in range(5):
            vec = pairs.vectors[:, i]
            pivot = vec[np.argmax(np.abs(vec))]
            self.assertAlmostEqual(pivot.imag, 0.0, places=12)
            self.assertGreater(pivot.real, 0.0)

    def test_repeated_runs_are_identical(self) -> None:
        h = sp.csr_matrix(_random_hermitian(50, seed=4))
        first = eigensolve(h, 4, dense_limit=10)
        second = eigensolve(h, 4, dense_limit=10)
        np.testing.assert_array_equal(first.values, second.values)


class LabelingTests(unittest.TestCase):
    def _pairs(self) -> Eigenpairs:
        values = np.array([0.0, 1.0, 2.0, 3.0])
        q, _ = np.linalg.qr(_random_hermitian(4, seed=5))
        return Eigenpairs(values=values, vectors=q, residuals=np.zeros(4))

    def test_assignment_is_independent_of_input_order(self) -> None:
        pairs = self._pairs()
        references = {"a": pairs.vectors[:, 2], "b": pairs.vectors[:, 0]}
        order = np.array([3, 0, 2, 1])
        shuffled = Eigenpairs(pairs.values[order], pairs.vectors[:, order], pairs.residuals[order])
        first = label_states(pairs, references)
        second = label_states(shuffled, references)
        self.assertEqual(first, second)
        self.assertEqual(first["a"].index, 2)
        self.assertAlmostEqual(first["a"].overlap, 1.0, places=12)

    def test_tie_goes_to_lower_energy(self) -> None:
        pairs = Eigenpairs(np.array([0.0, 1.0]), np.eye(2, dtype=complex), np.zeros(2))
        reference = np.array([1.0, 1.0]) / math.sqrt(2.0)
        assignment = label_states(pairs, {"x": reference}, min_overlap=0.4)
        self.assertEqual(assignment["x"].index, 0)

    def test_weak_overlap_raises(self) -> None:
        pairs = Eigenpairs(np.array([0.0, 1.0, 2.0]), np.eye(3, dtype=complex), np.zeros(3))
        reference = np.array([1.0, 1.0, 1.0]) / math.sqrt(3.0)
        with self.assertRaises(LabelingError) as ctx:
            label_states(pairs, {"x": reference}, theta=0.5 * math.pi)
        self.assertAlmostEqual(ctx.exception.theta, 0.5 * math.pi)

    def test_double_claim_raises(self) -> None:
        pairs = Eigenpairs(np.array([0.0, 1.0]), np.eye(2, dtype=complex), np.zeros(2))
        near = np.array([0.95, math.sqrt(1 - 0.95**2)])
        with self.assertRaises(LabelingError):
            label_states(pairs, {"x": np.array([1.0, 0.0]), "y": near})


class ExtremumSearchTests(unittest.TestCase):
    def test_interior_minimum(self) -> None:
        x, value = locate_interior_minimum(lambda v: (v - 1.0) ** 2 + 0.5, (0.0, 3.0), xatol=1e-8)
        self.assertAlmostEqual(x, 1.0, places=6)
        self.assertAlmostEqual(value, 0.5, places=10)

    def test_minimum_on_edge_raises(self) -> None:
        with self.assertRaises(NoInteriorExtremumError):
            locate_interior_minimum(lambda v: v, (2.0, 3.0))

    def test_maximum_with_coarse_scan_picks_highest_peak(self) -> None:
        def two_peaks(v: float) -> float:
            return math.exp(-((v - 1.0) ** 2) / 0.01) + 2.0 * math.exp(-((v - 2.0) ** 2) / 0.01)

        x, value = locate_interior_maximum(two_peaks, (0.0, 3.0), grid_points=61, xatol=1e-8)
        self.assertAlmostEqual(x, 2.0, places=5)
        self.assertAlmostEqual(value, 2.0, places=8)

    def test_monotone_maximum_raises(self) -> None:
        with self.assertRaises(NoInteriorExtremumError):
            locate_interior_maximum(lambda v: -v, (0.0, 1.0), grid_points=11)


class DecoupledLimitTests(unittest.TestCase):
    """With qubits capacitively isolated the dressed spectrum is a sum of bare parts."""

    @classmethod
    def setUpClass(cls) -> None:
        cls.params = _decoupled_device(6)
        cls.derived = derive_params(cls.params)
        cls.model = build_model(cls.derived, 6, truncation_levels=3)
        cls.theta = 0.65 * math.pi

    def _bare_transition(self, site: int) -> float:
        evals, _ = bare_transmon_eigensystem(6, self.derived.w[site, site], self.derived.omega_j[site])
        return float(evals[1] - evals[0])

    def test_computational_frequencies_are_bare_transitions(self) -> None:
        result = spectrum_at(self.model, self.theta)
        self.assertAlmostEqual(result.frequency(1, 0) / self._bare_transition(0), 1.0, places=9)
        self.assertAlmostEqual(result.frequency(0, 1) / self._bare_transition(1), 1.0, places=9)
        self.assertEqual(result.frequency(0, 0), 0.0)
        for label in COMPUTATIONAL_LABELS:
            self.assertAlmostEqual(result.computational[label].overlap, 1.0, places=9)

    def test_zz_and_coupling_vanish(self) -> None:
        result = spectrum_at(self.model, self.theta)
        self.assertLess(abs(result.zz), 1.0)
        for theta in (0.4 * math.pi, 0.8 * math.pi):
            self.assertLess(abs(effective_coupling(self.model, theta, result)), 1.0)

    def test_computational_levels_are_tagged(self) -> None:
        result = spectrum_at(self.model, self.theta)
        tagged = [level for level in result.levels if level.tag == TAG_COMPUTATIONAL]
        self.assertEqual(len(tagged), 4)
        self.assertEqual(result.idle_basis().shape, (self.model.dim, 4))
        self.assertEqual(len(result.idle_frequencies()), 4)

    def test_sweep_keeps_labels_and_tabulates(self) -> None:
        grid = np.linspace(0.5, 0.8, 4) * math.pi
        results = sweep_spectrum(self.model, grid, 12, threads=2)
        self.assertEqual([r.theta for r in results], list(grid))
        for result in results:
            self.assertAlmostEqual(result.frequency(1, 0) / self._bare_transition(0), 1.0, places=9)
        frame = sweep_table(results, what="spectrum", model=self.model, idle=results[0])
        for column in ("theta_over_pi", "omega_11_GHz", "zeta_zz_kHz", "abs_g_MHz", "delta_MHz", "level0_GHz"):
            self.assertIn(column, frame.columns)
        zz_frame = sweep_table(results, what="zz")
        self.assertEqual(list(zz_frame.columns), ["theta_over_pi", "zeta_zz_kHz"])

    def test_truncation_below_three_levels_cannot_tag(self) -> None:
        model = build_model(self.derived, 6, truncation_levels=2)
        with self.assertRaises(LabelingError):
            spectrum_at(model, self.theta, 8)


class EffectiveCouplingTests(unittest.TestCase):
    """``g`` with the idle states frozen at a reference flux."""

    @classmethod
    def setUpClass(cls) -> None:
        cls.model = build_model(derive_params(reference_device(charge_cutoff=3)), 3, truncation_levels=3)
        cls.theta = 0.6525 * math.pi
        cls.idle = spectrum_at(cls.model, cls.theta, 12)

    def _g(self, theta: float) -> complex:
        return effective_coupling(self.model, theta, self.idle)

    def test_vanishes_at_reference_and_grows_linearly(self) -> None:
        step = 0.001 * math.pi
        g_plus, g_minus = self._g(self.theta + step), self._g(self.theta - step)
        self.assertGreater(abs(g_plus), 1.0)
        self.assertLess(abs(self._g(self.theta)), 1e-3 * abs(g_plus))
        self.assertLess(abs(g_plus + g_minus), 0.05 * abs(g_plus))
        self.assertAlmostEqual(abs(self._g(self.theta + step / 2)) / abs(g_plus), 0.5, delta=0.02)

    def test_magnitude_has_no_jumps_along_sweep(self) -> None:
        grid = np.linspace(0.55, 0.75, 41) * math.pi
        magnitude = np.array([abs(self._g(theta)) for theta in grid])
        jumps = np.abs(np.diff(magnitude))
        self.assertLess(jumps.max(), 10.0 * np.median(jumps))


def test_sweep_grid_outside_range_is_rejected() -> None:
    model = build_model(derive_params(_decoupled_device(2)), 2, truncation_levels=3)
    with pytest.raises(ConfigurationError):
        sweep_spectrum(model, [0.5 * math.pi, 1.2 * math.pi])
    with pytest.raises(ConfigurationError):
        sweep_spectrum(model, [])


def test_sweep_table_argument_checks() -> None:
    with pytest.raises(ConfigurationError):
        sweep_table([], what="phase")
    with pytest.raises(ValueError):
        sweep_table([], what="g")


def test_cutoff_list_must_ascend() -> None:
    with pytest.raises(ConfigurationError):
        cutoff_convergence(reference_device(), [6, 5])
    with pytest.raises(ConfigurationError):
        cutoff_convergence(reference_device(), [5, 6], quantity="energy")


def test_cutoff_convergence_at_fixed_flux() -> None:
    frame = cutoff_convergence(
        reference_device(), [4, 5], "delta", theta=0.65 * math.pi, k=12, truncation_levels=3
    )
    assert list(frame.columns) == ["N", "theta_over_pi", "delta_MHz", "relative_change"]
    assert list(frame["N"]) == [4, 5]
    assert math.isnan(frame["relative_change"].iloc[0])
    assert frame["relative_change"].iloc[1] < 0.1


@pytest.mark.slow
def test_idle_point_and_detuning_at_full_cutoff() -> None:
    model = build_model(derive_params(reference_device()), 10, truncation_levels=6)
    idle = find_idle_point(model, (0.6 * math.pi, 0.7 * math.pi), 20)
    assert abs(idle.theta_over_pi - 0.6525) < 0.002
    assert abs(abs(idle.zz) / (2 * math.pi * 1e3) - 2.53) < 1.0
    assert abs(idle.spectrum.delta / (2 * math.pi * 1e6) - 700.0) < 10.0
    assert idle.spectrum.index(0, 0) == 0
    for label in COMPUTATIONAL_LABELS:
        assert idle.spectrum.computational[label].overlap > 0.9


@pytest.mark.slow
def test_detuning_is_flat_over_the_ac_swing() -> None:
    model = build_model(derive_params(reference_device()), 10, truncation_levels=6)
    idle = find_idle_point(model, (0.6 * math.pi, 0.7 * math.pi), 20)
    swing = 0.1575 * math.pi
    grid = np.linspace(idle.theta - swing, idle.theta + swing, 9)
    deltas = np.array([spectrum_at(model, theta, 20).delta for theta in grid])
    assert np.max(np.abs(deltas - idle.spectrum.delta)) < 0.01 * abs(idle.spectrum.delta)


@pytest.mark.slow
def test_zz_peak_exists_only_for_stronger_loop_junction() -> None:
    from dtcsim.pulses import peak_from_zz_max

    model = build_model(derive_params(reference_device()), 10, truncation_levels=6)
    idle = find_idle_point(model, (0.6 * math.pi, 0.7 * math.pi), 20)
    theta_peak, zz = peak_from_zz_max(model, (idle.theta, 0.9 * math.pi), 20)
    assert idle.theta < theta_peak < 0.9 * math.pi
    assert abs(zz) / (2 * math.pi * 1e6) > 1.0

    weak = build_model(derive_params(reference_device(r_j=0.25)), 10, truncation_levels=6)
    with pytest.raises(NoInteriorExtremumError):
        peak_from_zz_max(weak, (idle.theta, 0.9 * math.pi), 20)


if __name__ == "__main__":
    unittest.main()
