"""
純粋状態と線形演算子のテスト
"""
import math
import sys
import unittest
from pathlib import Path

import numpy as np

# プロジェクトルートをパスに追加
sys.path.insert(0, str(Path(__file__).parent.parent))

from common.error_handling import DataValidationError, DimensionMismatchError, DomainError, NotProjectorError
from cheshire_duality.qstate import (
    LinearOperator,
    PureState,
    apply,
    evolution_operator,
    inner_product,
    matrix_exponential,
    projector_exponential,
    tensor_all,
    tensor_product,
)

QUBIT = ("0", "1")


def ket(*amplitudes):
    return PureState(QUBIT, np.array(amplitudes, dtype=complex))


def random_ket(rng, labels):
    values = rng.normal(size=len(labels)) + 1j * rng.normal(size=len(labels))
    return PureState(labels, values).normalized()


class TestPureState(unittest.TestCase):
    """PureState のテスト"""

    def test_basis_and_norm(self):
        state = PureState.basis(QUBIT, "1")
        self.assertEqual(state.amplitude("1"), 1.0)
        self.assertEqual(state.norm, 1.0)

    def test_unknown_basis_label(self):
        with self.assertRaises(DataValidationError):
            PureState.basis(QUBIT, "2")

    def test_duplicate_labels_rejected(self):
        with self.assertRaises(DataValidationError):
            PureState(("0", "0"), np.array([1.0, 0.0]))

    def test_nan_rejected(self):
        with self.assertRaises(DataValidationError):
            ket(math.nan, 0.0)

    def test_wrong_length(self):
        with self.assertRaises(DimensionMismatchError):
            PureState(QUBIT, np.array([1.0, 0.0, 0.0]))

    def test_amplitudes_are_read_only(self):
        state = ket(1.0, 0.0)
        with self.assertRaises(ValueError):
            state.amplitudes[0] = 2.0

    def test_subnormalized_state_is_kept(self):
        state = ket(0.5, 0.0)
        self.assertAlmostEqual(state.norm_squared, 0.25)
        self.assertAlmostEqual(state.normalized().norm, 1.0)

    def test_zero_vector_cannot_be_normalized(self):
        with self.assertRaises(DataValidationError):
            ket(0.0, 0.0).normalized()

    def test_equals_up_to_phase(self):
        state = ket(1.0, 1j).scaled(1 / math.sqrt(2))
        self.assertTrue(state.equals_up_to_phase(state.with_global_phase(1.234)))
        self.assertFalse(state.equals_up_to_phase(ket(1.0, -1j).scaled(1 / math.sqrt(2))))

    def test_addition_requires_same_space(self):
        with self.assertRaises(DimensionMismatchError):
            ket(1.0, 0.0) + PureState(("a", "b"), np.array([1.0, 0.0]))


class TestLinearAlgebra(unittest.TestCase):
    """テンソル積・内積・演算子のテスト"""

    def test_tensor_product_labels_and_order(self):
        state = tensor_product(ket(1.0, 0.0), ket(0.0, 1.0))
        self.assertEqual(state.labels, ("0⊗0", "0⊗1", "1⊗0", "1⊗1"))
        np.testing.assert_allclose(state.amplitudes, [0, 1, 0, 0])

    def test_tensor_all_is_left_associative(self):
        state = tensor_all(ket(1.0, 0.0), ket(1.0, 0.0), ket(0.0, 1.0))
        self.assertEqual(state.dim, 8)
        self.assertEqual(state.amplitude("0⊗0⊗1"), 1.0)

    def test_tensor_product_is_associative(self):
        rng = np.random.default_rng(11)
        a, b, c = (random_ket(rng, QUBIT) for _ in range(3))
        left = tensor_product(tensor_product(a, b), c)
        right = tensor_product(a, tensor_product(b, c))
        self.assertEqual(left.labels, right.labels)
        np.testing.assert_allclose(left.amplitudes, right.amplitudes, rtol=0, atol=1e-15)

    def test_inner_product_is_conjugate_symmetric(self):
        rng = np.random.default_rng(5)
        labels = ("a", "b", "c", "d")
        for _ in range(20):
            a, b = random_ket(rng, labels), random_ket(rng, labels)
            self.assertLess(abs(inner_product(a, b) - inner_product(b, a).conjugate()), 1e-15)

    def test_tensor_type_mismatch(self):
        with self.assertRaises(DataValidationError):
            tensor_product(ket(1.0, 0.0), LinearOperator.identity(QUBIT))

    def test_inner_product_is_conjugate_linear_in_bra(self):
        a = ket(1j, 0.0)
        b = ket(1.0, 0.0)
        self.assertEqual(inner_product(a, b), -1j)
        self.assertEqual(inner_product(b, a), 1j)

    def test_outer_product_is_projector(self):
        plus = ket(1.0, 1.0).scaled(1 / math.sqrt(2))
        projector = LinearOperator.outer_product(plus, plus)
        self.assertTrue(projector.is_projector())
        self.assertAlmostEqual(projector.trace(), 1.0)

    def test_unitary_and_dagger(self):
        hadamard = LinearOperator(QUBIT, np.array([[1, 1], [1, -1]]) / math.sqrt(2))
        self.assertTrue(hadamard.is_unitary())
        self.assertLess((hadamard @ hadamard.dagger()).distance(LinearOperator.identity(QUBIT)), 1e-14)

    def test_matmul_with_state(self):
        flip = LinearOperator(QUBIT, np.array([[0, 1], [1, 0]]))
        self.assertEqual((flip @ ket(1.0, 0.0)).amplitude("1"), 1.0)

    def test_apply_dimension_mismatch(self):
        with self.assertRaises(DimensionMismatchError):
            apply(LinearOperator.identity(("a", "b", "c")), ket(1.0, 0.0))


class TestExponentials(unittest.TestCase):
    """虚時間発展演算子のテスト"""

    def setUp(self):
        self.projector = LinearOperator.outer_product(ket(1.0, 0.0), ket(1.0, 0.0))

    def test_projector_closed_form_matches_expm(self):
        for t in (0.0, 0.01, 0.5, 3.0):
            closed = projector_exponential(self.projector, t)
            general = matrix_exponential(self.projector, -t)
            self.assertLess(closed.distance(general), 1e-12)

    def test_projector_exponential_at_zero_is_identity(self):
        self.assertEqual(projector_exponential(self.projector, 0.0).distance(LinearOperator.identity(QUBIT)), 0.0)

    def test_identity_at_unit_time(self):
        identity = LinearOperator.identity(QUBIT)
        expected = LinearOperator(QUBIT, np.eye(2) * math.exp(-1.0))
        self.assertLess(projector_exponential(identity, 1.0).distance(expected), 1e-15)

    def test_projector_exponential_is_a_semigroup(self):
        rng = np.random.default_rng(3)
        labels = ("a", "b", "c")
        state = random_ket(rng, labels)
        projector = LinearOperator.outer_product(state, state)
        for t1, t2 in ((0.1, 0.2), (0.0, 1.5), (2.0, 0.7)):
            product = projector_exponential(projector, t1) @ projector_exponential(projector, t2)
            self.assertLess(product.distance(projector_exponential(projector, t1 + t2)), 1e-12)

    def test_negative_time_rejected(self):
        with self.assertRaises(DomainError):
            projector_exponential(self.projector, -0.1)

    def test_non_projector_rejected(self):
        operator = LinearOperator(QUBIT, np.diag([2.0, 0.0]))
        with self.assertRaises(NotProjectorError):
            projector_exponential(operator, 0.1)

    def test_evolution_operator_general_path(self):
        operator = LinearOperator(QUBIT, np.diag([2.0, 0.5]))
        evolved = evolution_operator(operator, 0.3)
        np.testing.assert_allclose(np.diag(evolved.matrix), [math.exp(-0.6), math.exp(-0.15)], atol=1e-14)

    def test_evolution_shrinks_norm(self):
        state = apply(evolution_operator(self.projector, 1.0), ket(1.0, 0.0))
        self.assertAlmostEqual(state.norm, math.exp(-1.0), places=14)


if __name__ == '__main__':
    unittest.main()
