"""
波動・粒子属性の状態、事前/事後選択状態、射影観測量、弱値

抽象4次元空間 {|L⟩,|R⟩} ⊗ {|Particle⟩,|Wave⟩} の基底順序は
{L⊗Particle, L⊗Wave, R⊗Particle, R⊗Wave} に固定する。
BS2 通過後は経路ラベル L/R をそれぞれ出力ポート 0/1 として読む。
検出器 D1 は出力ポート 0 の |Wave⟩ 成分を受ける（X の役割は符号化で自然に実現される）。
"""
import math
from dataclasses import dataclass
from enum import Enum
from typing import Dict, NamedTuple, Optional, Tuple, Union

import numpy as np

from common.error_handling.exceptions import DataValidationError, DomainError, OrthogonalSelectionError
from .constants import BasisConstants, NumericConstants
from .qstate import (
    LinearOperator,
    PureState,
    apply,
    inner_product,
    tensor_product,
)

TWO_PI = 2.0 * math.pi
HALF_PI = 0.5 * math.pi


class Path(str, Enum):
    """干渉計の経路"""
    L = "L"
    R = "R"


class Attribute(str, Enum):
    """光子の属性"""
    PARTICLE = "Particle"
    WAVE = "Wave"

    @property
    def short(self) -> str:
        return self.value[0]


def _check_alpha(alpha: float) -> float:
    if not (0.0 <= alpha <= HALF_PI):
        raise DomainError(f"α は [0, π/2] の範囲で指定してください: {alpha}")
    return float(alpha)


@dataclass(frozen=True)
class DualityParams:
    """波動・粒子重ね合わせのパラメータ（ラジアン）"""
    alpha: float
    phi1: float = 0.0
    phi2: float = 0.0

    def __post_init__(self):
        _check_alpha(self.alpha)
        for name in ('phi1', 'phi2'):
            value = getattr(self, name)
            if not (0.0 <= value < TWO_PI):
                raise DomainError(f"{name} は [0, 2π) の範囲で指定してください: {value}")

    @classmethod
    def from_degrees(cls, alpha_deg: float, phi1_deg: float = 0.0, phi2_deg: float = 0.0) -> 'DualityParams':
        return cls(math.radians(alpha_deg), math.radians(phi1_deg), math.radians(phi2_deg))

    @property
    def alpha_deg(self) -> float:
        return math.degrees(self.alpha)


@dataclass(frozen=True)
class PathAttributeObservable:
    """Π_a^x = |x⟩⟨x| ⊗ |a⟩⟨a|"""
    path: Path
    attribute: Attribute
    operator: LinearOperator

    def __post_init__(self):
        if not self.operator.is_projector():
            raise DataValidationError(f"{self.key} は射影演算子ではありません")
        if abs(self.operator.trace() - 1.0) > NumericConstants.STRUCTURE_EPS:
            raise DataValidationError(f"{self.key} はランク1ではありません")

    @property
    def key(self) -> str:
        """例: Π_P^R → "PR" """
        return f"{self.attribute.short}{self.path.value}"


class WeakValues(NamedTuple):
    """4つの射影観測量の弱値"""
    PL: complex
    PR: complex
    WL: complex
    WR: complex

    def as_dict(self) -> Dict[str, complex]:
        return dict(zip(BasisConstants.OBSERVABLE_KEYS, self))

    def real(self) -> 'WeakValues':
        return WeakValues(*(float(np.real(value)) for value in self))

    def total(self) -> complex:
        return sum(self)


ABSTRACT_LABELS: Tuple[str, ...] = tuple(
    f"{path}{BasisConstants.TENSOR_SEPARATOR}{attribute}"
    for path in BasisConstants.PATH_LABELS
    for attribute in BasisConstants.ATTRIBUTE_LABELS
)


def path_state(path: Path) -> PureState:
    return PureState.basis(BasisConstants.PATH_LABELS, Path(path).value)


def attribute_state(attribute: Attribute) -> PureState:
    return PureState.basis(BasisConstants.ATTRIBUTE_LABELS, Attribute(attribute).value)


def wave_state(phi1: float = 0.0) -> PureState:
    """|Wave⟩ = e^{iφ1/2}(cos(φ1/2)|0⟩ − i sin(φ1/2)|1⟩)"""
    phase = np.exp(0.5j * phi1)
    return PureState(BasisConstants.QUBIT_LABELS,
                     phase * np.array([math.cos(0.5 * phi1), -1j * math.sin(0.5 * phi1)]))


def particle_state(phi2: float = 0.0) -> PureState:
    """|Particle⟩ = (|0⟩ + e^{iφ2}|1⟩)/√2"""
    return PureState(BasisConstants.QUBIT_LABELS,
                     np.array([1.0, np.exp(1j * phi2)]) / math.sqrt(2.0))


def input_superposition(alpha: float) -> PureState:
    """波動・粒子ツールボックスの出力 cosα|Particle⟩ + sinα|Wave⟩"""
    _check_alpha(alpha)
    return PureState(BasisConstants.ATTRIBUTE_LABELS, np.array([math.cos(alpha), math.sin(alpha)]))


def preselection(params: DualityParams) -> PureState:
    """|ψi⟩ = (|L⟩+|R⟩)(cosα|Particle⟩ + sinα|Wave⟩)/√2"""
    paths = (path_state(Path.L) + path_state(Path.R)).scaled(1.0 / math.sqrt(2.0))
    return tensor_product(paths, input_superposition(params.alpha))


def postselection() -> PureState:
    """|ψf⟩ = (|L⟩|Wave⟩ + |R⟩|Particle⟩)/√2"""
    left_wave = tensor_product(path_state(Path.L), attribute_state(Attribute.WAVE))
    right_particle = tensor_product(path_state(Path.R), attribute_state(Attribute.PARTICLE))
    return (left_wave + right_particle).scaled(1.0 / math.sqrt(2.0))


def observable(path: Union[Path, str], attribute: Union[Attribute, str]) -> PathAttributeObservable:
    """Π_attribute^path の構築"""
    path, attribute = Path(path), Attribute(attribute)
    ket = tensor_product(path_state(path), attribute_state(attribute))
    return PathAttributeObservable(path, attribute, LinearOperator.outer_product(ket, ket))


def observable_from_key(key: str) -> PathAttributeObservable:
    """"PR" → Π_P^R"""
    if key not in BasisConstants.OBSERVABLE_KEYS:
        raise DataValidationError(f"未知の観測量: {key}（{', '.join(BasisConstants.OBSERVABLE_KEYS)} のいずれか）")
    attribute = Attribute.PARTICLE if key[0] == 'P' else Attribute.WAVE
    return observable(Path(key[1]), attribute)


def all_observables() -> Tuple[PathAttributeObservable, ...]:
    return tuple(observable_from_key(key) for key in BasisConstants.OBSERVABLE_KEYS)


def path_beam_splitter() -> LinearOperator:
    """BS2: 経路に対するアダマール型 (1/√2)[[1, 1], [1, −1]]"""
    hadamard = LinearOperator(BasisConstants.PATH_LABELS,
                              np.array([[1.0, 1.0], [1.0, -1.0]]) / math.sqrt(2.0))
    return tensor_product(hadamard, LinearOperator.identity(BasisConstants.ATTRIBUTE_LABELS))


def attribute_swap_gate() -> LinearOperator:
    """U = |L⟩⟨L| ⊗ I + |R⟩⟨R| ⊗ σ_swap（右経路でのみ Particle ↔ Wave）"""
    left = LinearOperator.outer_product(path_state(Path.L), path_state(Path.L))
    right = LinearOperator.outer_product(path_state(Path.R), path_state(Path.R))
    swap = LinearOperator(BasisConstants.ATTRIBUTE_LABELS, np.array([[0.0, 1.0], [1.0, 0.0]]))
    return (tensor_product(left, LinearOperator.identity(BasisConstants.ATTRIBUTE_LABELS))
            + tensor_product(right, swap))


def d1_detection_state() -> PureState:
    """D1 が受ける状態: 出力ポート0の |Wave⟩"""
    return tensor_product(path_state(Path.L), attribute_state(Attribute.WAVE))


def backpropagate_detection(swap_gate: Optional[LinearOperator] = None,
                            beam_splitter: Optional[LinearOperator] = None,
                            global_phase: float = 0.0) -> PureState:
    """D1 の |Wave⟩ から X, BS2, U を逆にたどった状態"""
    swap_gate = attribute_swap_gate() if swap_gate is None else swap_gate
    beam_splitter = path_beam_splitter() if beam_splitter is None else beam_splitter
    detected = d1_detection_state().with_global_phase(global_phase)
    return apply(swap_gate.dagger(), apply(beam_splitter.dagger(), detected))


def verify_postselection_backward(swap_gate: Optional[LinearOperator] = None,
                                  global_phase: float = 0.0) -> bool:
    """逆向きの推論で |ψf⟩ が得られるか（大域位相は無視）"""
    return backpropagate_detection(swap_gate, global_phase=global_phase).equals_up_to_phase(postselection())


def bs2_output_state(params: DualityParams) -> PureState:
    """BS2 出力の2量子ビット状態（出力ポート ⊗ 属性）。トモグラフィの対象"""
    return apply(path_beam_splitter(), apply(attribute_swap_gate(), preselection(params)))


def selection_overlap(psi_i: PureState, psi_f: PureState) -> complex:
    """⟨ψf|ψi⟩。直交していれば OrthogonalSelectionError"""
    overlap = inner_product(psi_f, psi_i)
    if abs(overlap) < NumericConstants.ORTHOGONAL_TOL:
        raise OrthogonalSelectionError(f"事前選択と事後選択が直交しています: |⟨ψf|ψi⟩| = {abs(overlap):.3e}")
    return overlap


def success_probability(params: DualityParams) -> float:
    """|⟨ψf|ψi⟩|² = (cosα + sinα)²/4"""
    return abs(selection_overlap(preselection(params), postselection())) ** 2


def operator_of(observable_or_operator) -> LinearOperator:
    if isinstance(observable_or_operator, PathAttributeObservable):
        return observable_or_operator.operator
    return observable_or_operator


def weak_value_exact(operator, psi_i: PureState, psi_f: PureState) -> complex:
    """⟨A⟩_w = ⟨ψf|A|ψi⟩ / ⟨ψf|ψi⟩"""
    overlap = selection_overlap(psi_i, psi_f)
    return inner_product(psi_f, apply(operator_of(operator), psi_i)) / overlap


def exact_weak_values(params: DualityParams) -> WeakValues:
    """4つの射影観測量の弱値を定義式から計算"""
    psi_i, psi_f = preselection(params), postselection()
    return WeakValues(*(weak_value_exact(obs, psi_i, psi_f) for obs in all_observables()))


def closed_form_weak_values(alpha: float) -> WeakValues:
    """(0, cosα/(cosα+sinα), sinα/(cosα+sinα), 0)"""
    _check_alpha(alpha)
    c, s = math.cos(alpha), math.sin(alpha)
    return WeakValues(0.0, c / (c + s), s / (c + s), 0.0)
