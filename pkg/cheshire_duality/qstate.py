"""
純粋状態と線形演算子の最小複素線形代数コア

状態は生のノルムを保持する。非ユニタリ発展のあとも暗黙の再規格化は行わず、
確率を求める側が明示的に割り算する。
"""
import logging
import math
from dataclasses import dataclass
from functools import reduce
from typing import Sequence, Tuple, Union

import numpy as np
from scipy.linalg import expm

from common.error_handling.exceptions import (
    DataValidationError,
    DimensionMismatchError,
    DomainError,
    NotProjectorError,
)
from .constants import BasisConstants, NumericConstants

logger = logging.getLogger(__name__)

Scalar = Union[complex, float, int]


def _check_labels(labels: Sequence[str]) -> Tuple[str, ...]:
    labels = tuple(str(label) for label in labels)
    if len(set(labels)) != len(labels):
        raise DataValidationError(f"基底ラベルが重複しています: {labels}")
    if not labels:
        raise DataValidationError("空の空間は扱えません")
    return labels


def _frozen(values, shape: Tuple[int, ...]) -> np.ndarray:
    array = np.array(values, dtype=np.complex128)
    if array.shape != shape:
        raise DimensionMismatchError(f"形状が一致しません: 期待 {shape}, 実際 {array.shape}")
    if not np.all(np.isfinite(array)):
        raise DataValidationError("NaN または Inf を含む振幅・行列要素は扱えません")
    array.setflags(write=False)
    return array


def _require_same_space(left: Tuple[str, ...], right: Tuple[str, ...]) -> None:
    if left != right:
        raise DimensionMismatchError(f"空間が一致しません: {len(left)}次元 {left} と {len(right)}次元 {right}")


@dataclass(frozen=True, eq=False)
class PureState:
    """ラベル付き基底上の複素振幅ベクトル（ノルム < 1 も許容）"""
    labels: Tuple[str, ...]
    amplitudes: np.ndarray

    def __post_init__(self):
        labels = _check_labels(self.labels)
        object.__setattr__(self, 'labels', labels)
        object.__setattr__(self, 'amplitudes', _frozen(self.amplitudes, (len(labels),)))

    @classmethod
    def basis(cls, labels: Sequence[str], label: str) -> 'PureState':
        """基底ベクトル |label⟩"""
        labels = tuple(labels)
        if label not in labels:
            raise DataValidationError(f"未知の基底ラベル: {label}")
        amplitudes = np.zeros(len(labels), dtype=np.complex128)
        amplitudes[labels.index(label)] = 1.0
        return cls(labels, amplitudes)

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def norm_squared(self) -> float:
        return float(np.vdot(self.amplitudes, self.amplitudes).real)

    @property
    def norm(self) -> float:
        return math.sqrt(self.norm_squared)

    def amplitude(self, label: str) -> complex:
        return complex(self.amplitudes[self.labels.index(label)])

    def probabilities(self) -> np.ndarray:
        """各基底の重み |a_k|^2（規格化はしない）"""
        return np.abs(self.amplitudes) ** 2

    def normalized(self) -> 'PureState':
        norm = self.norm
        if norm == 0.0:
            raise DataValidationError("ゼロベクトルは規格化できません")
        return PureState(self.labels, self.amplitudes / norm)

    def scaled(self, factor: Scalar) -> 'PureState':
        return PureState(self.labels, self.amplitudes * factor)

    def with_global_phase(self, theta: float) -> 'PureState':
        return self.scaled(np.exp(1j * theta))

    def __add__(self, other: 'PureState') -> 'PureState':
        _require_same_space(self.labels, other.labels)
        return PureState(self.labels, self.amplitudes + other.amplitudes)

    def __sub__(self, other: 'PureState') -> 'PureState':
        _require_same_space(self.labels, other.labels)
        return PureState(self.labels, self.amplitudes - other.amplitudes)

    def equals_up_to_phase(self, other: 'PureState', tol: float = NumericConstants.PHASE_MATCH_TOL) -> bool:
        """大域位相を除いて一致するか"""
        if self.labels != other.labels:
            return False
        overlap = np.vdot(other.amplitudes, self.amplitudes)
        phase = overlap / abs(overlap) if abs(overlap) > 0 else 1.0
        return bool(np.linalg.norm(self.amplitudes - phase * other.amplitudes) < tol)


@dataclass(frozen=True, eq=False)
class LinearOperator:
    """ラベル付き空間上の稠密な複素正方行列"""
    labels: Tuple[str, ...]
    matrix: np.ndarray

    def __post_init__(self):
        labels = _check_labels(self.labels)
        object.__setattr__(self, 'labels', labels)
        object.__setattr__(self, 'matrix', _frozen(self.matrix, (len(labels), len(labels))))

    @classmethod
    def identity(cls, labels: Sequence[str]) -> 'LinearOperator':
        return cls(tuple(labels), np.eye(len(labels), dtype=np.complex128))

    @classmethod
    def zeros(cls, labels: Sequence[str]) -> 'LinearOperator':
        return cls(tuple(labels), np.zeros((len(labels), len(labels)), dtype=np.complex128))

    @classmethod
    def outer_product(cls, ket: PureState, bra: PureState) -> 'LinearOperator':
        """|ket⟩⟨bra|"""
        _require_same_space(ket.labels, bra.labels)
        return cls(ket.labels, np.outer(ket.amplitudes, np.conj(bra.amplitudes)))

    @property
    def dim(self) -> int:
        return len(self.labels)

    def dagger(self) -> 'LinearOperator':
        return LinearOperator(self.labels, self.matrix.conj().T)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def scaled(self, factor: Scalar) -> 'LinearOperator':
        return LinearOperator(self.labels, self.matrix * factor)

    def __add__(self, other: 'LinearOperator') -> 'LinearOperator':
        _require_same_space(self.labels, other.labels)
        return LinearOperator(self.labels, self.matrix + other.matrix)

    def __sub__(self, other: 'LinearOperator') -> 'LinearOperator':
        _require_same_space(self.labels, other.labels)
        return LinearOperator(self.labels, self.matrix - other.matrix)

    def __matmul__(self, other):
        if isinstance(other, LinearOperator):
            _require_same_space(self.labels, other.labels)
            return LinearOperator(self.labels, self.matrix @ other.matrix)
        if isinstance(other, PureState):
            return apply(self, other)
        return NotImplemented

    def distance(self, other: 'LinearOperator') -> float:
        """フロベニウスノルムでの距離"""
        _require_same_space(self.labels, other.labels)
        return float(np.linalg.norm(self.matrix - other.matrix))

    def is_hermitian(self, eps: float = NumericConstants.STRUCTURE_EPS) -> bool:
        return bool(np.linalg.norm(self.matrix - self.matrix.conj().T) < eps)

    def is_projector(self, eps: float = NumericConstants.STRUCTURE_EPS) -> bool:
        """‖A² − A‖ < ε かつ ‖A† − A‖ < ε"""
        square = self.matrix @ self.matrix
        return bool(np.linalg.norm(square - self.matrix) < eps) and self.is_hermitian(eps)

    def is_unitary(self, eps: float = NumericConstants.STRUCTURE_EPS) -> bool:
        """‖A†A − I‖ < ε"""
        product = self.matrix.conj().T @ self.matrix
        return bool(np.linalg.norm(product - np.eye(self.dim)) < eps)


def tensor_product(a, b):
    """a ⊗ b（状態同士または演算子同士）。ラベルは (a, b) の順で連結する"""
    sep = BasisConstants.TENSOR_SEPARATOR
    labels = tuple(f"{left}{sep}{right}" for left in a.labels for right in b.labels)
    if isinstance(a, PureState) and isinstance(b, PureState):
        return PureState(labels, np.kron(a.amplitudes, b.amplitudes))
    if isinstance(a, LinearOperator) and isinstance(b, LinearOperator):
        return LinearOperator(labels, np.kron(a.matrix, b.matrix))
    raise DataValidationError(f"テンソル積の型が一致しません: {type(a).__name__} と {type(b).__name__}")


def tensor_all(*items):
    """複数オペランドのテンソル積（左結合）"""
    if not items:
        raise DataValidationError("テンソル積には1つ以上のオペランドが必要です")
    return reduce(tensor_product, items)


def inner_product(bra: PureState, ket: PureState) -> complex:
    """⟨bra|ket⟩（braについて共役線形）"""
    _require_same_space(bra.labels, ket.labels)
    return complex(np.vdot(bra.amplitudes, ket.amplitudes))


def apply(op: LinearOperator, state: PureState) -> PureState:
    """行列・ベクトル積。非ユニタリならノルムは縮みうる"""
    _require_same_space(op.labels, state.labels)
    return PureState(state.labels, op.matrix @ state.amplitudes)


def projector_exponential(projector: LinearOperator, t: float) -> LinearOperator:
    """射影演算子 P に対する e^{-Pt} = I + (e^{-t} − 1) P"""
    if t < 0 or not math.isfinite(t):
        raise DomainError(f"相互作用時間 t は非負である必要があります: {t}")
    if not projector.is_projector():
        raise NotProjectorError("射影演算子ではありません。matrix_exponential を使用してください")
    identity = np.eye(projector.dim, dtype=np.complex128)
    return LinearOperator(projector.labels, identity + math.expm1(-t) * projector.matrix)


def matrix_exponential(op: LinearOperator, scale: Scalar = 1.0) -> LinearOperator:
    """exp(scale · A)（スケーリング・二乗法による一般の行列指数関数）"""
    return LinearOperator(op.labels, expm(scale * op.matrix))


def evolution_operator(op: LinearOperator, t: float) -> LinearOperator:
    """虚時間発展 e^{-At}。射影演算子なら閉形式を使う"""
    if op.is_projector():
        return projector_exponential(op, t)
    if t < 0:
        raise DomainError(f"相互作用時間 t は非負である必要があります: {t}")
    logger.debug("射影演算子でないため一般の行列指数関数を使用します")
    return matrix_exponential(op, -t)
