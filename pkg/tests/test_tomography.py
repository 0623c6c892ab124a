"""
状態トモグラフィのテスト
"""
import math
import sys
import unittest
from pathlib import Path

import numpy as np

# プロジェクトルートをパスに追加
sys.path.insert(0, str(Path(__file__).parent.parent))

from common.error_handling import DataValidationError, DomainError, MissingSettingError
from cheshire_duality.constants import TomographyConstants
from cheshire_duality.duality import ABSTRACT_LABELS, DualityParams, bs2_output_state, postselection
from cheshire_duality.optics import output_amplitudes
from cheshire_duality.qstate import PureState
from cheshire_duality.tomography import (
    DensityMatrix,
    TomographySetting,
    depolarize,
    fidelity,
    outcome_probabilities,
    pauli_expectations,
    pure_density_matrix,
    reconstruct_linear,
    reduced_density_matrix,
    run_tomography,
    simulate_tomography,
)

MIXED = DensityMatrix(np.eye(4) / 4)


class TestDensityMatrix(unittest.TestCase):
    """DensityMatrix の検証"""

    def test_pure_state(self):
        rho = pure_density_matrix(postselection())
        self.assertAlmostEqual(rho.purity(), 1.0, places=14)
        self.assertTrue(rho.diagnostics()['physical'])

    def test_non_hermitian_rejected(self):
        matrix = np.eye(4, dtype=complex) / 4
        matrix[0, 1] = 0.1j
        with self.assertRaises(DataValidationError):
            DensityMatrix(matrix)

    def test_trace_must_be_one(self):
        with self.assertRaises(DataValidationError):
            DensityMatrix(np.eye(4) / 2)

    def test_negative_eigenvalue_is_reported(self):
        rho = DensityMatrix(np.diag([0.6, 0.5, -0.05, -0.05]))
        diagnostics = rho.diagnostics()
        self.assertEqual(diagnostics['negative_count'], 2)
        self.assertFalse(diagnostics['physical'])
        self.assertAlmostEqual(diagnostics['min_eigenvalue'], -0.05)

    def test_json_round_trip(self):
        rho = depolarize(pure_density_matrix(bs2_output_state(DualityParams(0.3))), 0.2)
        restored = DensityMatrix.from_json_dict(rho.to_json_dict())
        np.testing.assert_array_equal(restored.matrix, rho.matrix)

    def test_reduced_state_of_postselection_is_maximally_mixed(self):
        rho = pure_density_matrix(postselection())
        for keep in ('A', 'B'):
            np.testing.assert_allclose(reduced_density_matrix(rho, keep), np.eye(2) / 2, atol=1e-15)
        with self.assertRaises(DataValidationError):
            reduced_density_matrix(rho, 'C')

    def test_depolarize_range(self):
        with self.assertRaises(DomainError):
            depolarize(MIXED, 1.5)


class TestSimulation(unittest.TestCase):
    """測定カウントの生成"""

    def test_nine_settings(self):
        settings = simulate_tomography(postselection(), 1e3, seed=1)
        self.assertEqual(len(settings), 9)
        self.assertEqual(len({(s.basis_a, s.basis_b) for s in settings}), 9)

    def test_product_state_in_zz(self):
        ket = PureState.basis(ABSTRACT_LABELS, ABSTRACT_LABELS[0])
        settings = {(s.basis_a, s.basis_b): s for s in simulate_tomography(ket, 1e4, seed=2)}
        counts = settings[('Z', 'Z')].counts
        self.assertGreater(counts[0], 0)
        self.assertEqual(counts[1:], (0.0, 0.0, 0.0))

    def test_maximally_mixed_state(self):
        for basis_a in TomographyConstants.BASES:
            for basis_b in TomographyConstants.BASES:
                np.testing.assert_allclose(outcome_probabilities(MIXED, basis_a, basis_b), [0.25] * 4, atol=1e-15)

    def test_postselection_correlations(self):
        settings = simulate_tomography(postselection(), 1.0, exact=True)
        expectations = pauli_expectations(settings)
        self.assertAlmostEqual(expectations[('Z', 'Z')], -1.0, places=14)
        self.assertAlmostEqual(expectations[('X', 'X')], 1.0, places=14)
        self.assertAlmostEqual(expectations[('Y', 'Y')], 1.0, places=14)
        self.assertAlmostEqual(expectations[('Z', 'I')], 0.0, places=14)

    def test_same_seed_same_counts(self):
        first = simulate_tomography(postselection(), 1e4, seed=5)
        second = simulate_tomography(postselection(), 1e4, seed=5)
        self.assertEqual(first, second)

    def test_outcome_counts_are_independent_poisson(self):
        """各結果を独立にポアソン標本化するので設定ごとの合計は λ に固定されない"""
        settings = simulate_tomography(postselection(), 1e4, seed=8)
        totals = [sum(setting.counts) for setting in settings]
        self.assertGreater(len(set(totals)), 1)
        for total in totals:
            self.assertLess(abs(total - 1e4), 5 * math.sqrt(1e4))
        for setting in settings:
            self.assertTrue(all(float(count).is_integer() for count in setting.counts))

    def test_invalid_flux(self):
        with self.assertRaises(DomainError):
            simulate_tomography(postselection(), 0.0)


class TestReconstruction(unittest.TestCase):
    """線形逆変換と忠実度"""

    def setUp(self):
        self.psi = bs2_output_state(DualityParams(0.7))
        self.rho = pure_density_matrix(self.psi)

    def test_exact_counts_recover_state(self):
        reconstructed = reconstruct_linear(simulate_tomography(self.psi, 1e6, exact=True))
        self.assertLess(np.abs(reconstructed.matrix - self.rho.matrix).max(), 1e-10)

    def test_depolarized_reconstruction_within_shot_noise(self):
        noisy = depolarize(self.rho, 0.1)
        reconstructed = reconstruct_linear(simulate_tomography(noisy, 1e6, seed=3))
        self.assertLess(np.abs(reconstructed.matrix - noisy.matrix).max(), 0.01)
        self.assertAlmostEqual(np.trace(reconstructed.matrix).real, 1.0, places=12)

    def test_reconstruction_is_linear(self):
        other = pure_density_matrix(postselection())
        mixture = DensityMatrix(0.3 * self.rho.matrix + 0.7 * other.matrix)
        combined = reconstruct_linear(simulate_tomography(mixture, 1.0, exact=True))
        separate = (0.3 * reconstruct_linear(simulate_tomography(self.rho, 1.0, exact=True)).matrix
                    + 0.7 * reconstruct_linear(simulate_tomography(other, 1.0, exact=True)).matrix)
        self.assertLess(np.abs(combined.matrix - separate).max(), 1e-12)

    def test_missing_setting(self):
        settings = simulate_tomography(self.psi, 1e3, seed=4)[:-1]
        with self.assertRaises(MissingSettingError):
            reconstruct_linear(settings)

    def test_empty_setting(self):
        settings = simulate_tomography(self.psi, 1e3, seed=4)
        settings[0] = TomographySetting(settings[0].basis_a, settings[0].basis_b, (0, 0, 0, 0))
        with self.assertRaises(MissingSettingError):
            reconstruct_linear(settings)

    def test_invalid_setting(self):
        with self.assertRaises(DataValidationError):
            TomographySetting('W', 'Z', (1, 0, 0, 0))
        with self.assertRaises(DataValidationError):
            TomographySetting('Z', 'Z', (1, -1, 0, 0))

    def test_fidelity_examples(self):
        self.assertAlmostEqual(fidelity(self.rho, self.psi).value, 1.0, places=14)
        self.assertAlmostEqual(fidelity(MIXED, self.psi).value, 0.25, places=15)
        for p in (0.0, 0.00733, 0.1, 0.5):
            self.assertAlmostEqual(fidelity(depolarize(self.rho, p), self.psi).value, 1 - 0.75 * p, places=14)

    def test_fidelity_keeps_raw_value(self):
        rho = DensityMatrix(np.diag([1.1, -0.05, -0.05, 0.0]))
        ket = PureState.basis(ABSTRACT_LABELS, ABSTRACT_LABELS[0])
        result = fidelity(rho, ket)
        self.assertEqual(result.value, 1.0)
        self.assertAlmostEqual(result.raw, 1.1)

    def test_fidelity_decreases_with_noise(self):
        values = [run_tomography(DualityParams(0.7), 1e6, p, 0, 1, exact=True).mean_fidelity
                  for p in (0.0, 0.01, 0.05, 0.2)]
        self.assertEqual(values, sorted(values, reverse=True))
        self.assertAlmostEqual(values[0], 1.0, places=10)


class TestTomographyRun(unittest.TestCase):
    """繰り返しトモグラフィ"""

    def test_reference_noise_gives_expected_average_fidelity(self):
        run = run_tomography(DualityParams(math.pi / 4), 1e6, TomographyConstants.REFERENCE_NOISE_P, 0, 50)
        self.assertEqual(len(run.fidelities), 50)
        self.assertGreaterEqual(run.mean_fidelity, 0.992)
        self.assertLessEqual(run.mean_fidelity, 0.997)
        self.assertGreater(run.std_fidelity, 0.0)

    def test_spread_shrinks_with_flux(self):
        params = DualityParams(math.pi / 4)
        low = run_tomography(params, 1e3, TomographyConstants.REFERENCE_NOISE_P, 7, 50)
        high = run_tomography(params, 1e6, TomographyConstants.REFERENCE_NOISE_P, 7, 50)
        self.assertGreater(low.std_fidelity, high.std_fidelity)

    def test_exact_mode_runs_once(self):
        run = run_tomography(DualityParams(0.2), 1e6, 0.0, 0, 50, exact=True)
        self.assertEqual(len(run.fidelities), 1)
        self.assertEqual(run.std_fidelity, 0.0)
        self.assertGreater(run.min_eigenvalue, -1e-10)

    def test_optical_readout_is_the_target_state(self):
        params = DualityParams(1.1, 0.4, 2.0)
        run = run_tomography(params, 1e6, 0.0, 0, 1, exact=True, prepared=output_amplitudes(params))
        self.assertAlmostEqual(run.mean_fidelity, 1.0, places=10)

    def test_repeats_must_be_positive(self):
        with self.assertRaises(DomainError):
            run_tomography(DualityParams(0.2), 1e6, 0.0, 0, 0)

    def test_seeded_runs_are_reproducible(self):
        first = run_tomography(DualityParams(0.5), 1e4, 0.01, 42, 3)
        second = run_tomography(DualityParams(0.5), 1e4, 0.01, 42, 3)
        self.assertEqual(first.fidelities, second.fidelities)


if __name__ == '__main__':
    unittest.main()
