"""
BS2 出力の2量子ビット状態トモグラフィ（シミュレーション、線形逆変換、忠実度）

量子ビット A は出力ポート（0 = L 側, 1 = R 側）、量子ビット B は属性（0 = Particle, 1 = Wave）。
各測定設定は A, B それぞれの基底 Z/X/Y で、結果ビット 0 は固有値 +1 の固有状態を表す。
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from common.error_handling.exceptions import DataValidationError, DomainError, MissingSettingError
from .constants import NumericConstants, TomographyConstants
from .duality import ABSTRACT_LABELS, DualityParams, bs2_output_state
from .qstate import PureState
from .shots import SeedLike, child_seeds, make_rng

logger = logging.getLogger(__name__)

PAULI = {
    'I': np.eye(2, dtype=np.complex128),
    'X': np.array([[0, 1], [1, 0]], dtype=np.complex128),
    'Y': np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    'Z': np.array([[1, 0], [0, -1]], dtype=np.complex128),
}

# 各基底の (+1 固有状態, −1 固有状態)
EIGENBASIS = {
    'Z': (np.array([1, 0], dtype=np.complex128), np.array([0, 1], dtype=np.complex128)),
    'X': (np.array([1, 1], dtype=np.complex128) / math.sqrt(2.0),
          np.array([1, -1], dtype=np.complex128) / math.sqrt(2.0)),
    'Y': (np.array([1, 1j], dtype=np.complex128) / math.sqrt(2.0),
          np.array([1, -1j], dtype=np.complex128) / math.sqrt(2.0)),
}


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """4x4 密度行列（エルミート、トレース1）。負の固有値は診断として報告し、補正はしない"""
    matrix: np.ndarray
    labels: Tuple[str, ...] = ABSTRACT_LABELS

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=np.complex128)
        dim = len(self.labels)
        if matrix.shape != (dim, dim):
            raise DataValidationError(f"密度行列の形状が不正です: {matrix.shape}")
        if np.linalg.norm(matrix - matrix.conj().T) > NumericConstants.DENSITY_HERMITIAN_TOL:
            raise DataValidationError("密度行列がエルミートではありません")
        if abs(np.trace(matrix) - 1.0) > NumericConstants.DENSITY_TRACE_TOL:
            raise DataValidationError(f"密度行列のトレースが1ではありません: {np.trace(matrix).real:.12f}")
        matrix.setflags(write=False)
        object.__setattr__(self, 'matrix', matrix)
        object.__setattr__(self, 'labels', tuple(self.labels))

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def purity(self) -> float:
        return float(np.real(np.trace(self.matrix @ self.matrix)))

    def diagnostics(self) -> Dict[str, object]:
        """固有値の診断（最尤推定との差が出うるかの目安）"""
        eigenvalues = self.eigenvalues()
        return {
            'eigenvalues': [float(value) for value in eigenvalues],
            'min_eigenvalue': float(eigenvalues.min()),
            'negative_count': int(np.sum(eigenvalues < 0)),
            'physical': bool(eigenvalues.min() >= NumericConstants.DENSITY_EIGEN_FLOOR),
            'purity': self.purity(),
        }

    def to_json_dict(self) -> List[List[List[float]]]:
        """行優先の [実部, 虚部] 組"""
        return [[[float(value.real), float(value.imag)] for value in row] for row in self.matrix]

    @classmethod
    def from_json_dict(cls, data: Sequence[Sequence[Sequence[float]]]) -> 'DensityMatrix':
        return cls(np.array([[complex(re, im) for re, im in row] for row in data]))


@dataclass(frozen=True)
class TomographySetting:
    """測定基底の組と4つの結果（00, 01, 10, 11）のカウント"""
    basis_a: str
    basis_b: str
    counts: Tuple[float, float, float, float]

    def __post_init__(self):
        for basis in (self.basis_a, self.basis_b):
            if basis not in TomographyConstants.BASES:
                raise DataValidationError(f"未知の測定基底: {basis}")
        counts = tuple(self.counts)
        if len(counts) != len(TomographyConstants.OUTCOMES) or any(value < 0 for value in counts):
            raise DataValidationError(f"カウントは非負の4値である必要があります: {counts}")
        object.__setattr__(self, 'counts', counts)

    @property
    def total(self) -> float:
        return float(sum(self.counts))

    def frequencies(self) -> np.ndarray:
        if self.total <= 0:
            raise MissingSettingError(f"設定 ({self.basis_a}, {self.basis_b}) のカウントが0です")
        return np.asarray(self.counts, dtype=float) / self.total


class Fidelity(NamedTuple):
    """報告用に [0, 1] へ丸めた値と、丸める前の値"""
    value: float
    raw: float


def pure_density_matrix(state: PureState) -> DensityMatrix:
    """|ψ⟩⟨ψ|"""
    if abs(state.norm_squared - 1.0) > NumericConstants.DENSITY_TRACE_TOL:
        raise DataValidationError(f"状態が規格化されていません: ‖ψ‖² = {state.norm_squared}")
    return DensityMatrix(np.outer(state.amplitudes, np.conj(state.amplitudes)), state.labels)


def _as_density(state: Union[PureState, DensityMatrix]) -> DensityMatrix:
    if isinstance(state, DensityMatrix):
        return state
    return pure_density_matrix(state)


def depolarize(rho: DensityMatrix, p: float) -> DensityMatrix:
    """(1 − p)ρ + p·I/4"""
    if not (0.0 <= p <= 1.0):
        raise DomainError(f"脱分極強度は [0, 1] の範囲で指定してください: {p}")
    dim = len(rho.labels)
    return DensityMatrix((1.0 - p) * rho.matrix + p * np.eye(dim) / dim, rho.labels)


def reduced_density_matrix(rho: DensityMatrix, keep: str = 'A') -> np.ndarray:
    """部分トレース（keep='A' で出力ポート、'B' で属性の2x2行列）"""
    tensor = rho.matrix.reshape(2, 2, 2, 2)
    if keep == 'A':
        return np.einsum('ijkj->ik', tensor)
    if keep == 'B':
        return np.einsum('ijil->jl', tensor)
    raise DataValidationError(f"keep は 'A' または 'B' です: {keep}")


def outcome_probabilities(rho: DensityMatrix, basis_a: str, basis_b: str) -> np.ndarray:
    """設定 (basis_a, basis_b) での結果 00, 01, 10, 11 の確率"""
    probabilities = []
    for bit_a, bit_b in itertools.product((0, 1), repeat=2):
        vector = np.kron(EIGENBASIS[basis_a][bit_a], EIGENBASIS[basis_b][bit_b])
        probabilities.append(np.real(np.vdot(vector, rho.matrix @ vector)))
    return np.clip(np.array(probabilities), 0.0, None)


def simulate_tomography(state: Union[PureState, DensityMatrix], lam: float, seed: SeedLike = 0,
                        exact: bool = False) -> List[TomographySetting]:
    """9設定それぞれで平均 λ·p のポアソンカウントを生成（exact では λ·p そのもの）"""
    if not (lam > 0) or not math.isfinite(lam):
        raise DomainError(f"平均光子数 λ は正である必要があります: {lam}")
    rho = _as_density(state)
    rng = None if exact else make_rng(seed)
    settings = []
    for basis_a, basis_b in itertools.product(TomographyConstants.BASES, repeat=2):
        means = lam * outcome_probabilities(rho, basis_a, basis_b)
        counts = means if exact else rng.poisson(means)
        settings.append(TomographySetting(basis_a, basis_b, tuple(float(value) for value in counts)))
    return settings


def _expectation(frequencies: np.ndarray, sign_a: bool, sign_b: bool) -> float:
    signs = [((-1) ** bit_a if sign_a else 1) * ((-1) ** bit_b if sign_b else 1)
             for bit_a, bit_b in itertools.product((0, 1), repeat=2)]
    return float(np.dot(signs, frequencies))


def pauli_expectations(settings: Iterable[TomographySetting]) -> Dict[Tuple[str, str], float]:
    """16個の ⟨σi⊗σj⟩。I を含む項は利用できる設定の平均をとる"""
    by_bases = {(setting.basis_a, setting.basis_b): setting for setting in settings}
    missing = [pair for pair in itertools.product(TomographyConstants.BASES, repeat=2) if pair not in by_bases]
    if missing:
        raise MissingSettingError(f"測定設定が不足しています: {missing}")
    frequencies = {pair: setting.frequencies() for pair, setting in by_bases.items()}

    expectations = {('I', 'I'): 1.0}
    for basis_a, basis_b in itertools.product(TomographyConstants.BASES, repeat=2):
        expectations[(basis_a, basis_b)] = _expectation(frequencies[(basis_a, basis_b)], True, True)
    for basis in TomographyConstants.BASES:
        expectations[(basis, 'I')] = float(np.mean(
            [_expectation(frequencies[(basis, other)], True, False) for other in TomographyConstants.BASES]))
        expectations[('I', basis)] = float(np.mean(
            [_expectation(frequencies[(other, basis)], False, True) for other in TomographyConstants.BASES]))
    return expectations


def reconstruct_linear(settings: Iterable[TomographySetting]) -> DensityMatrix:
    """ρ = (1/4) Σ ⟨σi⊗σj⟩ σi⊗σj"""
    expectations = pauli_expectations(settings)
    matrix = sum(value * np.kron(PAULI[a], PAULI[b]) for (a, b), value in expectations.items()) / 4.0
    # エルミート性は構成上保たれるが、丸め誤差を対称化で除く
    return DensityMatrix(0.5 * (matrix + matrix.conj().T))


def fidelity(rho: DensityMatrix, psi: PureState) -> Fidelity:
    """F = ⟨ψ|ρ|ψ⟩"""
    value = np.vdot(psi.amplitudes, rho.matrix @ psi.amplitudes)
    if abs(value.imag) > NumericConstants.STRUCTURE_EPS:
        logger.debug(f"忠実度の虚部が許容誤差を超えています: {value.imag:.3e}")
    raw = float(value.real)
    return Fidelity(min(max(raw, 0.0), 1.0), raw)


@dataclass(frozen=True)
class TomographyRun:
    """1つの α についての繰り返しトモグラフィの結果"""
    alpha_deg: float
    fidelities: Tuple[float, ...]
    raw_fidelities: Tuple[float, ...]
    reconstructed: DensityMatrix
    min_eigenvalue: float

    @property
    def mean_fidelity(self) -> float:
        return float(np.mean(self.fidelities))

    @property
    def std_fidelity(self) -> float:
        if len(self.fidelities) < 2:
            return 0.0
        return float(np.std(self.fidelities, ddof=1))


def tomography_target(params: DualityParams) -> PureState:
    """理想的な BS2 出力状態"""
    return bs2_output_state(params)


def run_tomography(params: DualityParams, lam: float, noise_p: float,
                   seed: Union[int, np.random.SeedSequence], repeats: int,
                   exact: bool = False, prepared: Optional[PureState] = None) -> TomographyRun:
    """脱分極させた状態の測定 → 線形逆変換 → 忠実度、を子シードで repeats 回繰り返す

    Args:
        params: α, φ₁, φ₂（目標状態を決める）
        lam: 1設定あたりの平均光子数 λ
        noise_p: 脱分極の強さ p
        seed: マスターシード（各繰り返しは子シードを使う）
        repeats: 繰り返し回数
        exact: True なら期待値そのもので再構成する（1回のみ）
        prepared: 実際に測定する状態。省略すると理想状態そのもの

    Returns:
        TomographyRun: 各回の忠実度と最初の再構成結果
    """
    if repeats < 1:
        raise DomainError(f"繰り返し回数は1以上にしてください: {repeats}")
    target = tomography_target(params)
    prepared = target if prepared is None else prepared
    rho_in = depolarize(pure_density_matrix(prepared.normalized()), noise_p)

    # 厳密モードには乱数がないので1回で足りる
    seeds: Sequence[Optional[np.random.SeedSequence]] = [None] if exact else child_seeds(seed, repeats)

    fidelities, raws, minimum, first = [], [], math.inf, None
    for child in seeds:
        rho = reconstruct_linear(simulate_tomography(rho_in, lam, child, exact))
        result = fidelity(rho, target)
        fidelities.append(result.value)
        raws.append(result.raw)
        minimum = min(minimum, float(rho.eigenvalues().min()))
        first = rho if first is None else first
    return TomographyRun(params.alpha_deg, tuple(fidelities), tuple(raws), first, minimum)
