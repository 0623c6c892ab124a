"""
虚時間発展（ITE）による弱値の抽出

NDフィルタの透過率 T = e^{-2t} を相互作用時間 t に対応させ、規格化入射率
N(t) = |⟨ψf|e^{-At}|ψi⟩|² / |⟨ψf|ψi⟩|² の原点での傾きから ⟨A⟩_w = −(∂N/∂t)/2 を得る。
射影演算子 A では e^{-At} = I + (e^{-t} − 1)A より
N(t) = |1 + (e^{-t} − 1)⟨A⟩_w|² が厳密に成り立つ。
"""
import math
from dataclasses import dataclass
from typing import Tuple

from common.error_handling.exceptions import DataValidationError, DomainError
from .constants import NumericConstants, ScheduleConstants
from .duality import PathAttributeObservable, operator_of, selection_overlap
from .qstate import PureState, apply, evolution_operator, inner_product


def transmission_to_time(transmission: float) -> float:
    """T = e^{-2t} → t = −ln(T)/2"""
    if not (0.0 < transmission <= 1.0):
        raise DomainError(f"透過率は (0, 1] の範囲で指定してください: {transmission}")
    # T = 1 で -0.0 を返さない
    return -0.5 * math.log(transmission) + 0.0


def time_to_transmission(t: float) -> float:
    if t < 0 or not math.isfinite(t):
        raise DomainError(f"相互作用時間 t は非負である必要があります: {t}")
    return math.exp(-2.0 * t)


@dataclass(frozen=True)
class AttenuationSchedule:
    """NDフィルタの透過率の列"""
    transmissions: Tuple[float, ...] = ScheduleConstants.DEFAULT_TRANSMISSIONS

    def __post_init__(self):
        transmissions = tuple(float(value) for value in self.transmissions)
        for value in transmissions:
            if not (0.0 < value <= 1.0):
                raise DomainError(f"透過率は (0, 1] の範囲で指定してください: {value}")
        if len(set(transmissions)) < 2:
            raise DomainError("透過率は少なくとも2種類必要です")
        object.__setattr__(self, 'transmissions', transmissions)

    @property
    def times(self) -> Tuple[float, ...]:
        return tuple(transmission_to_time(value) for value in self.transmissions)

    def __len__(self) -> int:
        return len(self.transmissions)


@dataclass(frozen=True)
class IteCurve:
    """減衰掃引の (t, N) 点列"""
    observable: PathAttributeObservable
    points: Tuple[Tuple[float, float], ...]

    def __post_init__(self):
        points = tuple((float(t), float(n)) for t, n in self.points)
        if any(t < 0 or n < 0 for t, n in points):
            raise DataValidationError("t と N は非負である必要があります")
        if list(points) != sorted(points, key=lambda point: point[0]):
            raise DataValidationError("点列は t の昇順である必要があります")
        for t, n in points:
            if t == 0.0 and abs(n - 1.0) > NumericConstants.STRUCTURE_EPS:
                raise DataValidationError(f"N(0) は 1 である必要があります: {n}")
        object.__setattr__(self, 'points', points)

    @property
    def times(self) -> Tuple[float, ...]:
        return tuple(t for t, _ in self.points)

    @property
    def values(self) -> Tuple[float, ...]:
        return tuple(n for _, n in self.points)


def normalized_incidence(psi_i: PureState, psi_f: PureState, operator, t: float) -> float:
    """N(t) = |⟨ψf|e^{-At}|ψi⟩|² / |⟨ψf|ψi⟩|²"""
    overlap = selection_overlap(psi_i, psi_f)
    if t == 0.0:
        return 1.0
    evolved = apply(evolution_operator(operator_of(operator), t), psi_i)
    return abs(inner_product(psi_f, evolved)) ** 2 / abs(overlap) ** 2


def analytic_incidence(weak_value: complex, t: float) -> float:
    """|1 + (e^{-t} − 1)w|²。t = 0 での微分は −2 Re(w)"""
    return abs(1.0 + math.expm1(-t) * weak_value) ** 2


def slope_at_origin(psi_i: PureState, psi_f: PureState, operator,
                    step: float = NumericConstants.FINITE_DIFFERENCE_STEP) -> float:
    """t = 0⁺ での dN/dt（t ≥ 0 なので片側2次差分）"""
    n0 = normalized_incidence(psi_i, psi_f, operator, 0.0)
    n1 = normalized_incidence(psi_i, psi_f, operator, step)
    n2 = normalized_incidence(psi_i, psi_f, operator, 2.0 * step)
    return (-3.0 * n0 + 4.0 * n1 - n2) / (2.0 * step)


def weak_value_from_slope(slope: float) -> float:
    """傾きの −1/2 倍が弱値"""
    return -0.5 * slope


def incidence_curve(psi_i: PureState, psi_f: PureState, obs: PathAttributeObservable,
                    schedule: AttenuationSchedule) -> IteCurve:
    """スケジュールの各透過率で厳密な N(t) を計算"""
    times = sorted(schedule.times)
    points = [(t, normalized_incidence(psi_i, psi_f, obs, t)) for t in times]
    return IteCurve(obs, tuple(points))

