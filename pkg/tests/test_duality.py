"""
事前/事後選択状態と弱値のテスト
"""
import math
import sys
import unittest
from pathlib import Path

import numpy as np

# プロジェクトルートをパスに追加
sys.path.insert(0, str(Path(__file__).parent.parent))

from common.error_handling import DataValidationError, DomainError, OrthogonalSelectionError
from cheshire_duality.duality import (
    ABSTRACT_LABELS,
    Attribute,
    DualityParams,
    Path as InterferometerPath,
    all_observables,
    attribute_swap_gate,
    backpropagate_detection,
    bs2_output_state,
    closed_form_weak_values,
    exact_weak_values,
    observable,
    observable_from_key,
    path_beam_splitter,
    postselection,
    preselection,
    success_probability,
    verify_postselection_backward,
    wave_state,
    particle_state,
    weak_value_exact,
)
from cheshire_duality.qstate import LinearOperator, PureState

ALPHA_GRID = np.linspace(0.0, math.pi / 2, 100)


class TestStates(unittest.TestCase):
    """状態と観測量のテスト"""

    def test_params_range(self):
        with self.assertRaises(DomainError):
            DualityParams(alpha=-0.1)
        with self.assertRaises(DomainError):
            DualityParams(alpha=0.5, phi1=2 * math.pi)

    def test_from_degrees(self):
        params = DualityParams.from_degrees(45.0, 90.0)
        self.assertAlmostEqual(params.alpha, math.pi / 4)
        self.assertAlmostEqual(params.phi1, math.pi / 2)
        self.assertAlmostEqual(params.alpha_deg, 45.0)

    def test_phase_free_wave_and_particle(self):
        np.testing.assert_allclose(wave_state(0.0).amplitudes, [1, 0])
        np.testing.assert_allclose(particle_state(0.0).amplitudes, [1 / math.sqrt(2), 1 / math.sqrt(2)])

    def test_wave_and_particle_are_normalized(self):
        for phi in (0.0, 0.7, math.pi / 2, 3.0):
            self.assertAlmostEqual(wave_state(phi).norm, 1.0, places=14)
            self.assertAlmostEqual(particle_state(phi).norm, 1.0, places=14)

    def test_preselection_at_45_degrees(self):
        state = preselection(DualityParams(math.pi / 4))
        self.assertEqual(state.labels, ABSTRACT_LABELS)
        np.testing.assert_allclose(np.abs(state.amplitudes), [0.5] * 4, atol=1e-15)

    def test_postselection(self):
        state = postselection()
        expected = [0, 1 / math.sqrt(2), 1 / math.sqrt(2), 0]
        np.testing.assert_allclose(state.amplitudes, expected, atol=1e-15)

    def test_observable_is_rank_one_projector(self):
        for obs in all_observables():
            self.assertTrue(obs.operator.is_projector())
            self.assertAlmostEqual(obs.operator.trace(), 1.0)
        self.assertEqual([obs.key for obs in all_observables()], ["PL", "PR", "WL", "WR"])

    def test_observable_from_key(self):
        obs = observable_from_key("WR")
        self.assertIs(obs.path, InterferometerPath.R)
        self.assertIs(obs.attribute, Attribute.WAVE)
        with self.assertRaises(DataValidationError):
            observable_from_key("XR")

    def test_gates_are_unitary(self):
        self.assertTrue(path_beam_splitter().is_unitary())
        self.assertTrue(attribute_swap_gate().is_unitary())

    def test_postselection_by_backward_reasoning(self):
        self.assertTrue(verify_postselection_backward())
        self.assertTrue(verify_postselection_backward(global_phase=0.9))

    def test_wrong_gate_fails_backward_check(self):
        self.assertFalse(verify_postselection_backward(LinearOperator.identity(ABSTRACT_LABELS)))

    def test_backpropagation_returns_postselection(self):
        self.assertTrue(backpropagate_detection().equals_up_to_phase(postselection()))

    def test_bs2_output_is_normalized(self):
        for alpha in (0.0, 0.3, math.pi / 2):
            self.assertAlmostEqual(bs2_output_state(DualityParams(alpha)).norm, 1.0, places=14)


class TestWeakValues(unittest.TestCase):
    """弱値のテスト"""

    def test_definition_matches_closed_form(self):
        for alpha in ALPHA_GRID:
            exact = exact_weak_values(DualityParams(alpha))
            closed = closed_form_weak_values(alpha)
            for e, c in zip(exact, closed):
                self.assertLess(abs(e - c), 1e-12)

    def test_separation_of_attributes(self):
        """左経路に粒子属性なし、右経路に波動属性なし"""
        for alpha in ALPHA_GRID:
            values = exact_weak_values(DualityParams(alpha))
            self.assertLess(abs(values.PL), 1e-12)
            self.assertLess(abs(values.WR), 1e-12)

    def test_half_particle_on_right_at_45_degrees(self):
        values = closed_form_weak_values(math.pi / 4)
        self.assertAlmostEqual(values.PR, 0.5, places=15)
        self.assertAlmostEqual(values.WL, 0.5, places=15)
        self.assertEqual(values.PL, 0.0)
        self.assertEqual(values.WR, 0.0)

    def test_endpoints(self):
        self.assertEqual(tuple(closed_form_weak_values(0.0)), (0.0, 1.0, 0.0, 0.0))
        values = closed_form_weak_values(math.pi / 2)
        self.assertAlmostEqual(values.PR, 0.0, places=15)
        self.assertAlmostEqual(values.WL, 1.0, places=15)

    def test_weak_values_sum_to_one(self):
        for alpha in ALPHA_GRID:
            self.assertLess(abs(exact_weak_values(DualityParams(alpha)).total() - 1.0), 1e-12)

    def test_phases_do_not_change_weak_values(self):
        base = exact_weak_values(DualityParams(0.6))
        shifted = exact_weak_values(DualityParams(0.6, math.pi / 4, math.pi / 2))
        for a, b in zip(base, shifted):
            self.assertLess(abs(a - b), 1e-12)

    def test_success_probability(self):
        for alpha in (0.0, math.pi / 4, 1.0):
            expected = (math.cos(alpha) + math.sin(alpha)) ** 2 / 4
            self.assertAlmostEqual(success_probability(DualityParams(alpha)), expected, places=14)

    def test_orthogonal_selection(self):
        psi_i = PureState.basis(ABSTRACT_LABELS, ABSTRACT_LABELS[0])
        with self.assertRaises(OrthogonalSelectionError):
            weak_value_exact(observable("L", "Particle"), psi_i, postselection())

    def test_weak_value_of_identity_is_one(self):
        params = DualityParams(0.4)
        value = weak_value_exact(LinearOperator.identity(ABSTRACT_LABELS), preselection(params), postselection())
        self.assertAlmostEqual(value, 1.0, places=14)


if __name__ == '__main__':
    unittest.main()
