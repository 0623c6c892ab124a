"""
8モード光学回路（ジョーンズ計算）によるセットアップの物理層シミュレーション

モードは 側(L/R) × レール(up/down) × 偏光(H/V) の8つで、順序は
L-up-H, L-up-V, L-down-H, L-down-V, R-up-H, R-up-V, R-down-H, R-down-V に固定する。

符号化（抽象層 → 光学層）:
    |x⟩|Particle⟩ → 側 x の up レール、偏光 (|H⟩ + e^{iφ2}|V⟩)/√2
    |x⟩|Wave⟩     → 側 x の down レール、偏光 e^{iφ1/2}(cos(φ1/2)|H⟩ − i sin(φ1/2)|V⟩)

回路の段:
    toolbox  HWP(α/2) で cosα|H⟩ + sinα|V⟩ を作り、BD でレールに分け、レールごとの波長板で属性を符号化
    bs1      L/R の経路ビームスプリッタ
    nd       対象の経路⊗属性を運ぶモードに振幅 √T の減衰
    swap     R 側だけで Particle 符号の up レールと Wave 符号の down レールを交換（U）
    decode   両側の偏光符号を |H⟩ に戻す
    bs2      BD で R 側を L 側の V に合流、HWP(22.5°) で干渉、PBS で出力ポート1を R 側 V へ

検出器の割り当て（X ゲートは符号化と PBS の振り分けで実現される）:
    出力ポート0 ⊗ Wave     → L-down-H → D1（事後選択の成功）
    出力ポート0 ⊗ Particle → L-up-H   → D3
    出力ポート1 と残りのモード       → D2
"""
import json
import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from common.error_handling.exceptions import (
    DataValidationError,
    DomainError,
    InvalidTargetError,
    SubspaceLeakageError,
)
from .constants import BasisConstants, NumericConstants, OpticsConstants
from .duality import (
    ABSTRACT_LABELS,
    Attribute,
    DualityParams,
    Path,
    PathAttributeObservable,
    observable_from_key,
    particle_state,
    wave_state,
)
from .qstate import LinearOperator, PureState

logger = logging.getLogger(__name__)

POLARIZATION_LABELS: Tuple[str, str] = OpticsConstants.POLARIZATIONS
QUARTER_PI = 0.25 * math.pi


@dataclass(frozen=True, order=True)
class ModeLabel:
    """光学モード（側, レール, 偏光）"""
    side: str
    rail: str
    pol: str

    def __post_init__(self):
        if (self.side not in OpticsConstants.SIDES or self.rail not in OpticsConstants.RAILS
                or self.pol not in OpticsConstants.POLARIZATIONS):
            raise InvalidTargetError(f"未知のモード: ({self.side}, {self.rail}, {self.pol})")

    def __str__(self) -> str:
        return OpticsConstants.MODE_SEPARATOR.join((self.side, self.rail, self.pol))

    @classmethod
    def from_string(cls, text: str) -> 'ModeLabel':
        parts = str(text).split(OpticsConstants.MODE_SEPARATOR)
        if len(parts) != 3:
            raise InvalidTargetError(f"モード表記が不正です: {text}")
        return cls(*parts)


MODES: Tuple[ModeLabel, ...] = tuple(
    ModeLabel(side, rail, pol)
    for side in OpticsConstants.SIDES
    for rail in OpticsConstants.RAILS
    for pol in OpticsConstants.POLARIZATIONS
)
MODE_LABELS: Tuple[str, ...] = tuple(str(mode) for mode in MODES)
MODE_INDEX: Dict[ModeLabel, int] = {mode: index for index, mode in enumerate(MODES)}


def modes(side: Optional[str] = None, rail: Optional[str] = None, pol: Optional[str] = None) -> Tuple[ModeLabel, ...]:
    """条件に合うモードを正準順序で返す"""
    return tuple(
        mode for mode in MODES
        if (side is None or mode.side == side)
        and (rail is None or mode.rail == rail)
        and (pol is None or mode.pol == pol)
    )


def jones_hwp(theta: float) -> LinearOperator:
    """半波長板 [[cos2θ, sin2θ], [sin2θ, −cos2θ]]"""
    c, s = math.cos(2.0 * theta), math.sin(2.0 * theta)
    return LinearOperator(POLARIZATION_LABELS, np.array([[c, s], [s, -c]]))


def jones_qwp(theta: float) -> LinearOperator:
    """1/4波長板 e^{−iπ/4}[[cos²θ + i sin²θ, (1−i)sinθcosθ], [(1−i)sinθcosθ, sin²θ + i cos²θ]]"""
    c, s = math.cos(theta), math.sin(theta)
    off = (1 - 1j) * s * c
    matrix = np.array([[c * c + 1j * s * s, off], [off, s * s + 1j * c * c]])
    return LinearOperator(POLARIZATION_LABELS, np.exp(-1j * QUARTER_PI) * matrix)


def jones_phase(delta: float) -> LinearOperator:
    """V 成分にだけ位相を与える位相板 diag(1, e^{iδ})"""
    return LinearOperator(POLARIZATION_LABELS, np.diag([1.0, np.exp(1j * delta)]))


def _orthogonal(vector: np.ndarray) -> np.ndarray:
    return np.array([-np.conj(vector[1]), np.conj(vector[0])])


def swap_u_matrix(phi1: float = 0.0, phi2: float = 0.0) -> np.ndarray:
    """R 側4モード (up-H, up-V, down-H, down-V) 上の交換ユニタリ

    up レールの Particle 符号と down レールの Wave 符号を入れ替え、
    それぞれの直交補も同様に入れ替える。
    """
    particle = particle_state(phi2).amplitudes
    wave = wave_state(phi1).amplitudes
    zero = np.zeros(2, dtype=np.complex128)

    def up(vector):
        return np.concatenate([vector, zero])

    def down(vector):
        return np.concatenate([zero, vector])

    pairs = [
        (up(particle), down(wave)),
        (up(_orthogonal(particle)), down(_orthogonal(wave))),
    ]
    matrix = np.zeros((4, 4), dtype=np.complex128)
    for a, b in pairs:
        matrix += np.outer(b, np.conj(a)) + np.outer(a, np.conj(b))
    return matrix


class ElementKind(str, Enum):
    """光学素子の種類"""
    HWP = "HWP"
    QWP = "QWP"
    PHASE = "PHASE"
    BD = "BD"
    BS = "BS"
    PBS = "PBS"
    ND = "ND"
    SWAP_U = "SWAP_U"


# 隣り合う2モードの組に同じ2x2ブロックを作用させる素子
PAIRED_KINDS = (ElementKind.HWP, ElementKind.QWP, ElementKind.PHASE,
                ElementKind.BD, ElementKind.BS, ElementKind.PBS)
WAVEPLATE_KINDS = (ElementKind.HWP, ElementKind.QWP, ElementKind.PHASE)


@dataclass(frozen=True)
class OpticalElement:
    """光学素子と作用するモード"""
    kind: ElementKind
    targets: Tuple[ModeLabel, ...]
    angle: float = 0.0
    transmission: float = 1.0
    phases: Tuple[float, float] = (0.0, 0.0)
    convention: str = OpticsConstants.BS_HADAMARD
    stage: str = ""

    def __post_init__(self):
        object.__setattr__(self, 'kind', ElementKind(self.kind))
        targets = tuple(target if isinstance(target, ModeLabel) else ModeLabel.from_string(target)
                        for target in self.targets)
        object.__setattr__(self, 'targets', targets)
        object.__setattr__(self, 'phases', tuple(float(value) for value in self.phases))

        if not targets or len(set(targets)) != len(targets):
            raise InvalidTargetError(f"{self.kind.value}: 対象モードが空または重複しています")
        if self.kind in PAIRED_KINDS and len(targets) % 2:
            raise InvalidTargetError(f"{self.kind.value}: 対象モードは2つ組で指定してください")
        if self.kind in WAVEPLATE_KINDS:
            for h_mode, v_mode in zip(targets[::2], targets[1::2]):
                if (h_mode.side, h_mode.rail, h_mode.pol, v_mode.pol) != (v_mode.side, v_mode.rail, 'H', 'V'):
                    raise InvalidTargetError(f"{self.kind.value}: 波長板は同じレールの (H, V) に作用します")
        if self.kind is ElementKind.SWAP_U and len(targets) != 4:
            raise InvalidTargetError("SWAP_U は4モードに作用します")
        if self.kind is ElementKind.ND and not (0.0 < self.transmission <= 1.0):
            raise DomainError(f"透過率は (0, 1] の範囲で指定してください: {self.transmission}")
        if self.kind is ElementKind.BS and self.convention not in OpticsConstants.BS_CONVENTIONS:
            raise DataValidationError(f"未知のビームスプリッタ規約: {self.convention}")

    def block(self) -> np.ndarray:
        """組ごとに作用する2x2ブロック（SWAP_U は4x4）"""
        if self.kind is ElementKind.HWP:
            return jones_hwp(self.angle).matrix
        if self.kind is ElementKind.QWP:
            return jones_qwp(self.angle).matrix
        if self.kind is ElementKind.PHASE:
            return jones_phase(self.angle).matrix
        if self.kind in (ElementKind.BD, ElementKind.PBS):
            return np.array([[0.0, 1.0], [1.0, 0.0]], dtype=np.complex128)
        if self.kind is ElementKind.BS:
            if self.convention == OpticsConstants.BS_SYMMETRIC:
                return np.array([[1.0, 1j], [1j, 1.0]]) / math.sqrt(2.0)
            return np.array([[1.0, 1.0], [1.0, -1.0]], dtype=np.complex128) / math.sqrt(2.0)
        if self.kind is ElementKind.SWAP_U:
            return swap_u_matrix(*self.phases)
        return np.diag(np.full(len(self.targets), math.sqrt(self.transmission), dtype=np.complex128))

    def support_matrix(self) -> np.ndarray:
        """対象モード上の行列（targets の順）"""
        if self.kind in PAIRED_KINDS:
            return np.kron(np.eye(len(self.targets) // 2), self.block())
        return self.block()

    def full_matrix(self) -> LinearOperator:
        """8モード全体への埋め込み"""
        matrix = np.eye(len(MODES), dtype=np.complex128)
        index = [MODE_INDEX[target] for target in self.targets]
        matrix[np.ix_(index, index)] = self.support_matrix()
        return LinearOperator(MODE_LABELS, matrix)

    def is_unitary(self, eps: float = NumericConstants.STRUCTURE_EPS) -> bool:
        support = self.support_matrix()
        return bool(np.linalg.norm(support.conj().T @ support - np.eye(len(support))) < eps)

    def to_dict(self) -> Dict:
        return {
            'kind': self.kind.value,
            'targets': [str(target) for target in self.targets],
            'angle': self.angle,
            'transmission': self.transmission,
            'phases': list(self.phases),
            'convention': self.convention,
            'stage': self.stage,
        }

    @classmethod
    def from_dict(cls, data: Dict) -> 'OpticalElement':
        return cls(
            kind=ElementKind(data['kind']),
            targets=tuple(ModeLabel.from_string(text) for text in data['targets']),
            angle=float(data.get('angle', 0.0)),
            transmission=float(data.get('transmission', 1.0)),
            phases=tuple(data.get('phases', (0.0, 0.0))),
            convention=data.get('convention', OpticsConstants.BS_HADAMARD),
            stage=data.get('stage', ''),
        )


@dataclass(frozen=True)
class Circuit:
    """素子の列と検出器の割り当て"""
    elements: Tuple[OpticalElement, ...]
    detectors: Dict[str, Tuple[ModeLabel, ...]] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, 'elements', tuple(self.elements))
        detectors = {name: tuple(mode_set) for name, mode_set in self.detectors.items()}
        seen: List[ModeLabel] = []
        for name, mode_set in detectors.items():
            overlap = set(seen) & set(mode_set)
            if overlap:
                raise InvalidTargetError(f"検出器 {name} のモードが他と重複しています: {sorted(map(str, overlap))}")
            seen.extend(mode_set)
        if set(seen) != set(MODES):
            missing = sorted(str(mode) for mode in set(MODES) - set(seen))
            raise InvalidTargetError(f"どの検出器にも割り当てられていないモードがあります: {missing}")
        object.__setattr__(self, 'detectors', detectors)

    def stages(self) -> Tuple[str, ...]:
        return tuple(dict.fromkeys(element.stage for element in self.elements))

    def to_json(self) -> str:
        data = {
            'elements': [element.to_dict() for element in self.elements],
            'detectors': {name: [str(mode) for mode in mode_set] for name, mode_set in self.detectors.items()},
        }
        return json.dumps(data, ensure_ascii=False, indent=2)

    @classmethod
    def from_json(cls, text: str) -> 'Circuit':
        try:
            data = json.loads(text)
        except json.JSONDecodeError as e:
            raise DataValidationError(f"回路記述のJSONが不正です: {e}")
        return cls(
            elements=tuple(OpticalElement.from_dict(item) for item in data.get('elements', [])),
            detectors={name: tuple(ModeLabel.from_string(text) for text in mode_set)
                       for name, mode_set in data.get('detectors', {}).items()},
        )


@dataclass(frozen=True)
class DetectionResult:
    """検出器ごとの検出確率と ND による損失"""
    probabilities: Dict[str, float]
    loss: float

    def __post_init__(self):
        if any(value < 0 for value in self.probabilities.values()) or self.loss < 0:
            raise DataValidationError("検出確率と損失は非負である必要があります")

    @property
    def total(self) -> float:
        return sum(self.probabilities.values()) + self.loss


def default_detectors() -> Dict[str, Tuple[ModeLabel, ...]]:
    d1_name, d2_name, d3_name = OpticsConstants.DETECTORS
    d1 = (ModeLabel('L', 'down', 'H'),)
    d3 = (ModeLabel('L', 'up', 'H'),)
    d2 = tuple(mode for mode in MODES if mode not in d1 + d3)
    return {d1_name: d1, d2_name: d2, d3_name: d3}


def source_state() -> PureState:
    """光源の光子: L 側 up レールの |H⟩"""
    return PureState.basis(MODE_LABELS, str(ModeLabel('L', 'up', 'H')))


def _rail_of(attribute: Attribute) -> str:
    return 'up' if Attribute(attribute) is Attribute.PARTICLE else 'down'


def _encoding_vector(attribute: Attribute, params: DualityParams) -> np.ndarray:
    if Attribute(attribute) is Attribute.PARTICLE:
        return particle_state(params.phi2).amplitudes
    return wave_state(params.phi1).amplitudes


def nd_targets(target: Union[str, PathAttributeObservable]) -> Tuple[ModeLabel, ...]:
    """観測量 Π_a^x を運ぶモード（側 x、属性 a のレールの H/V）"""
    if isinstance(target, str):
        try:
            target = observable_from_key(target)
        except DataValidationError as e:
            raise InvalidTargetError(f"ND の対象が不正です: {e}")
    if not isinstance(target, PathAttributeObservable):
        raise InvalidTargetError(f"ND の対象が不正です: {target!r}")
    return modes(side=Path(target.path).value, rail=_rail_of(target.attribute))


def _plate(kind: ElementKind, targets: Iterable[ModeLabel], angle: float, stage: str) -> OpticalElement:
    return OpticalElement(kind, tuple(targets), angle=angle, stage=stage)


def _toolbox(params: DualityParams) -> List[OpticalElement]:
    stage = 'toolbox'
    left_up, left_down = modes('L', 'up'), modes('L', 'down')
    elements = [
        _plate(ElementKind.HWP, left_up, 0.5 * params.alpha, stage),
        # H は直進、V は down レールへ
        OpticalElement(ElementKind.BD, (ModeLabel('L', 'up', 'V'), ModeLabel('L', 'down', 'V')), stage=stage),
    ]
    if params.phi1 == 0.0 and params.phi2 == 0.0:
        # Wave: HWP45° + QWP0°, Particle: HWP22.5° + QWP45°（共通位相 e^{-iπ/4}）
        elements += [
            _plate(ElementKind.HWP, left_down, math.radians(45.0), stage),
            _plate(ElementKind.QWP, left_down, 0.0, stage),
            _plate(ElementKind.HWP, left_up, math.radians(22.5), stage),
            _plate(ElementKind.QWP, left_up, math.radians(45.0), stage),
        ]
    else:
        elements += [
            _plate(ElementKind.HWP, left_down, math.radians(45.0), stage),
            _plate(ElementKind.HWP, left_down, math.radians(22.5), stage),
            _plate(ElementKind.PHASE, left_down, params.phi1, stage),
            _plate(ElementKind.HWP, left_down, math.radians(22.5), stage),
            _plate(ElementKind.HWP, left_up, math.radians(22.5), stage),
            _plate(ElementKind.PHASE, left_up, params.phi2, stage),
        ]
    return elements


def _beam_splitter(convention: str) -> OpticalElement:
    targets: List[ModeLabel] = []
    for rail in OpticsConstants.RAILS:
        for pol in OpticsConstants.POLARIZATIONS:
            targets += [ModeLabel('L', rail, pol), ModeLabel('R', rail, pol)]
    return OpticalElement(ElementKind.BS, tuple(targets), convention=convention, stage='bs1')


def _decoder(params: DualityParams) -> List[OpticalElement]:
    stage = 'decode'
    up, down = modes(rail='up'), modes(rail='down')
    if params.phi1 == 0.0 and params.phi2 == 0.0:
        return [_plate(ElementKind.HWP, up, math.radians(22.5), stage)]
    return [
        _plate(ElementKind.PHASE, up, -params.phi2, stage),
        _plate(ElementKind.HWP, up, math.radians(22.5), stage),
        _plate(ElementKind.HWP, down, math.radians(22.5), stage),
        _plate(ElementKind.PHASE, down, -params.phi1, stage),
        _plate(ElementKind.HWP, down, math.radians(22.5), stage),
    ]


def _second_beam_splitter(convention: str) -> List[OpticalElement]:
    stage = 'bs2'
    merge: List[ModeLabel] = []
    route: List[ModeLabel] = []
    for rail in OpticsConstants.RAILS:
        merge += [ModeLabel('R', rail, 'H'), ModeLabel('L', rail, 'V')]
        route += [ModeLabel('L', rail, 'V'), ModeLabel('R', rail, 'V')]
    elements = [OpticalElement(ElementKind.BD, tuple(merge), stage=stage)]
    if convention == OpticsConstants.BS_SYMMETRIC:
        # BS1 で R 側に付いた位相 i を打ち消す
        elements.append(_plate(ElementKind.PHASE, modes(side='L'), -0.5 * math.pi, stage))
    elements += [
        _plate(ElementKind.HWP, modes(side='L'), math.radians(22.5), stage),
        OpticalElement(ElementKind.PBS, tuple(route), stage=stage),
    ]
    return elements


def build_setup(params: DualityParams,
                nd: Optional[Tuple[Union[str, PathAttributeObservable], float]] = None,
                bs_convention: str = OpticsConstants.BS_HADAMARD) -> Circuit:
    """ツールボックスから検出器までの回路を組み立てる

    Args:
        params: α, φ₁, φ₂
        nd: (観測量またはキー, 透過率)。省略時は減衰なし
        bs_convention: ビームスプリッタの規約（hadamard または symmetric）

    Returns:
        Circuit: 素子列と既定の検出器 D1〜D3
    """
    if bs_convention not in OpticsConstants.BS_CONVENTIONS:
        raise DataValidationError(f"未知のビームスプリッタ規約: {bs_convention}")
    elements = _toolbox(params)
    elements.append(_beam_splitter(bs_convention))
    if nd is not None:
        target, transmission = nd
        elements.append(OpticalElement(ElementKind.ND, nd_targets(target),
                                       transmission=float(transmission), stage='nd'))
    right = modes(side='R')
    elements.append(OpticalElement(ElementKind.SWAP_U, right, phases=(params.phi1, params.phi2), stage='swap'))
    elements += _decoder(params)
    elements += _second_beam_splitter(bs_convention)
    return Circuit(tuple(elements), default_detectors())


def propagate(circuit: Circuit, state: PureState, until: Optional[str] = None) -> PureState:
    """素子を順に作用させる。until を指定するとその段の最後の素子で止める"""
    if tuple(state.labels) != MODE_LABELS:
        raise DataValidationError("8モードの状態を指定してください")
    elements: Sequence[OpticalElement] = circuit.elements
    if until is not None:
        stage_indices = [index for index, element in enumerate(elements) if element.stage == until]
        if not stage_indices:
            raise DataValidationError(f"回路に段 {until} がありません（{', '.join(circuit.stages())}）")
        elements = elements[:stage_indices[-1] + 1]
    amplitudes = np.array(state.amplitudes)
    for element in elements:
        index = [MODE_INDEX[target] for target in element.targets]
        amplitudes[index] = element.support_matrix() @ amplitudes[index]
    return PureState(MODE_LABELS, amplitudes)


def run_circuit(circuit: Circuit, state: PureState) -> DetectionResult:
    """検出器ごとの確率と損失（確率 + 損失 = 1）"""
    if abs(state.norm_squared - 1.0) > OpticsConstants.CONSERVATION_TOL:
        raise DataValidationError(f"入力状態が規格化されていません: ‖ψ‖² = {state.norm_squared}")
    final = propagate(circuit, state)
    weights = final.probabilities()
    probabilities = {
        name: float(sum(weights[MODE_INDEX[mode]] for mode in mode_set))
        for name, mode_set in circuit.detectors.items()
    }
    return DetectionResult(probabilities, max(0.0, 1.0 - final.norm_squared))


def embed_abstract(state: PureState, params: DualityParams) -> PureState:
    """抽象4次元状態を8モードへ符号化（等長写像）"""
    if tuple(state.labels) != ABSTRACT_LABELS:
        raise DataValidationError(f"抽象層の基底 {ABSTRACT_LABELS} の状態を指定してください")
    amplitudes = np.zeros(len(MODES), dtype=np.complex128)
    for label, coefficient in zip(ABSTRACT_LABELS, state.amplitudes):
        path, attribute = label.split(BasisConstants.TENSOR_SEPARATOR)
        index = [MODE_INDEX[mode] for mode in modes(side=path, rail=_rail_of(Attribute(attribute)))]
        amplitudes[index] += coefficient * _encoding_vector(Attribute(attribute), params)
    return PureState(MODE_LABELS, amplitudes)


def project_abstract(state: PureState, params: DualityParams) -> PureState:
    """符号化部分空間への射影（embed_abstract の逆）"""
    if tuple(state.labels) != MODE_LABELS:
        raise DataValidationError("8モードの状態を指定してください")
    coefficients = []
    for label in ABSTRACT_LABELS:
        path, attribute = label.split(BasisConstants.TENSOR_SEPARATOR)
        index = [MODE_INDEX[mode] for mode in modes(side=path, rail=_rail_of(Attribute(attribute)))]
        coefficients.append(np.vdot(_encoding_vector(Attribute(attribute), params), state.amplitudes[index]))
    projected = PureState(ABSTRACT_LABELS, np.array(coefficients))
    leakage = np.linalg.norm(state.amplitudes - embed_abstract(projected, params).amplitudes)
    if leakage > NumericConstants.LEAKAGE_TOL:
        raise SubspaceLeakageError(f"符号化部分空間の外に成分があります: ‖漏れ‖ = {leakage:.3e}")
    return projected


def _nd_argument(observable, transmission: float):
    if observable is None:
        if transmission != 1.0:
            raise InvalidTargetError("透過率を指定する場合は ND の対象観測量が必要です")
        return None
    return observable, transmission


def d1_probability(params: DualityParams, observable=None, transmission: float = 1.0,
                   bs_convention: str = OpticsConstants.BS_HADAMARD) -> float:
    """D1（事後選択成功）の検出確率"""
    circuit = build_setup(params, _nd_argument(observable, transmission), bs_convention)
    return run_circuit(circuit, source_state()).probabilities['D1']


def output_amplitudes(params: DualityParams, observable=None, transmission: float = 1.0,
                      bs_convention: str = OpticsConstants.BS_HADAMARD) -> PureState:
    """BS2 出力を（出力ポート ⊗ 属性）の4次元状態として読み出す"""
    circuit = build_setup(params, _nd_argument(observable, transmission), bs_convention)
    final = propagate(circuit, source_state())
    readout = (ModeLabel('L', 'up', 'H'), ModeLabel('L', 'down', 'H'),
               ModeLabel('R', 'up', 'V'), ModeLabel('R', 'down', 'V'))
    return PureState(ABSTRACT_LABELS, np.array([final.amplitudes[MODE_INDEX[mode]] for mode in readout]))
