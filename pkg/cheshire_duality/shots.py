"""
光子計数の統計シミュレーション

D1 の検出確率に平均光子数 λ を掛けたポアソン分布で、参照（ND なし）と
減衰ありのカウントを生成する。弱値の誤差はパラメトリック・ブートストラップ
（観測カウントを平均とするポアソン再標本化 → 再フィット）の標準偏差で見積もる。

乱数は numpy の SeedSequence → PCG64。試行ごとの子シードはマスターシードから
SeedSequence.spawn で決定的に導出する。
"""
import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from common.error_handling.exceptions import DataValidationError, DomainError, ZeroReferenceError
from .constants import CsvConstants, OpticsConstants, ShotConstants
from .duality import DualityParams, PathAttributeObservable, observable_from_key
from .fit import FitResult, batch_slopes, least_squares_line, weak_value_estimate
from .ite import AttenuationSchedule, transmission_to_time
from .optics import d1_probability

logger = logging.getLogger(__name__)

SeedLike = Union[int, np.random.SeedSequence, np.random.Generator, None]


@dataclass(frozen=True)
class CountRecord:
    """1つの透過率での参照カウント n0 と減衰ありのカウント n

    ノイズなしモードではカウントは λ·p の実数のまま保持する。
    """
    observable: str
    transmission: float
    t: float
    n0: float
    n: float
    flux: float

    def __post_init__(self):
        if self.n < 0 or self.n0 < 0:
            raise DataValidationError(f"カウントは非負である必要があります: n={self.n}, n0={self.n0}")
        if not (self.flux > 0):
            raise DomainError(f"平均光子数 λ は正である必要があります: {self.flux}")
        if not (0.0 < self.transmission <= 1.0):
            raise DomainError(f"透過率は (0, 1] の範囲で指定してください: {self.transmission}")

    @property
    def N_hat(self) -> float:
        """規格化入射率の推定値 n/n0"""
        if self.n0 == 0:
            raise ZeroReferenceError(f"{self.observable} T={self.transmission}: 参照カウントが0です（λ を増やしてください）")
        return self.n / self.n0

    def to_row(self) -> dict:
        return dict(zip(CsvConstants.COUNT_COLUMNS,
                        (self.observable, self.transmission, self.t, self.n0, self.n, self.N_hat)))


def make_rng(seed: SeedLike) -> np.random.Generator:
    """シードから PCG64 ジェネレータを作る（Generator はそのまま返す）"""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.Generator(np.random.PCG64(seed))


def child_seeds(seed: Union[int, np.random.SeedSequence], count: int) -> List[np.random.SeedSequence]:
    """マスターシードから count 個の独立な子シードを導出"""
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return seed.spawn(count)


def derived_seed(seed: int, *keys: int) -> np.random.SeedSequence:
    """マスターシードと整数キー（α、観測量、用途）から決まるシード"""
    return np.random.SeedSequence(entropy=seed, spawn_key=tuple(int(key) for key in keys))


def sample_counts(prob: float, lam: float, seed: SeedLike) -> int:
    """Poisson(λ·prob) の1標本"""
    if not (-OpticsConstants.CONSERVATION_TOL <= prob <= 1.0 + OpticsConstants.CONSERVATION_TOL):
        raise DomainError(f"確率は [0, 1] の範囲で指定してください: {prob}")
    if not (lam > 0) or not math.isfinite(lam):
        raise DomainError(f"平均光子数 λ は正である必要があります: {lam}")
    return int(make_rng(seed).poisson(lam * min(max(prob, 0.0), 1.0)))


def _observable_key(obs: Union[str, PathAttributeObservable]) -> str:
    if isinstance(obs, PathAttributeObservable):
        return obs.key
    return observable_from_key(obs).key


@lru_cache(maxsize=256)
def detection_probabilities(params: DualityParams, observable_key: str,
                            transmissions: Tuple[float, ...]) -> Tuple[float, Tuple[float, ...]]:
    """参照の D1 確率と各透過率での D1 確率（光学回路から計算）"""
    reference = d1_probability(params)
    disturbed = tuple(d1_probability(params, observable_key, value) for value in transmissions)
    return reference, disturbed


def run_trial(params: DualityParams, obs: Union[str, PathAttributeObservable], schedule: AttenuationSchedule,
              lam: float, seed: SeedLike, noiseless: bool = False) -> List[CountRecord]:
    """スケジュールの透過率ごとに1レコード（参照も透過率ごとに取り直す）

    Args:
        params: α, φ₁, φ₂
        obs: 減衰させる観測量（またはキー）
        schedule: NDフィルタの透過率列
        lam: 1設定あたりの平均検出光子数 λ
        seed: シード（noiseless のときは使わない）
        noiseless: True なら期待値そのものをカウントとする

    Returns:
        List[CountRecord]: 透過率の順のレコード

    Raises:
        ZeroReferenceError: 参照カウントが0になった場合
    """
    key = _observable_key(obs)
    if not (lam > 0) or not math.isfinite(lam):
        raise DomainError(f"平均光子数 λ は正である必要があります: {lam}")
    reference, disturbed = detection_probabilities(params, key, schedule.transmissions)

    rng = None if noiseless else make_rng(seed)
    records = []
    for transmission, prob in zip(schedule.transmissions, disturbed):
        if noiseless:
            n0, n = lam * reference, lam * prob
        else:
            n0, n = int(rng.poisson(lam * reference)), int(rng.poisson(lam * prob))
        if n0 == 0:
            raise ZeroReferenceError(f"{key} T={transmission}: 参照カウントが0です（λ={lam:g} が小さすぎます）")
        records.append(CountRecord(key, transmission, transmission_to_time(transmission), n0, n, lam))
    return records


def run_trials(params: DualityParams, obs, schedule: AttenuationSchedule, lam: float, seed: int,
               trials: int, optimizer=None) -> List[List[CountRecord]]:
    """独立な試行を子シードで実行（optimizer があれば並列、結果は試行順）"""
    seeds = child_seeds(seed, trials)

    def one(child):
        return run_trial(params, obs, schedule, lam, child)

    if optimizer is None:
        return [one(child) for child in seeds]
    return optimizer.parallel_map(one, seeds, desc="trials")


def _ordinate_variance(n: np.ndarray, n0: np.ndarray) -> np.ndarray:
    """var(n/n0) ≈ (n + N²·n0)/n0²（n = 0 では1カウント分の分散で下から抑える）"""
    ratio = n / n0
    variance = (n + ratio * ratio * n0) / (n0 * n0)
    return np.where(variance > 0, variance, 1.0 / (n0 * n0))


def _arrays(records: Sequence[CountRecord]) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    if not records:
        raise DataValidationError("カウントレコードがありません")
    for record in records:
        if record.n0 == 0:
            raise ZeroReferenceError(f"{record.observable} T={record.transmission}: 参照カウントが0です")
    t = np.array([record.t for record in records], dtype=float)
    n0 = np.array([record.n0 for record in records], dtype=float)
    n = np.array([record.n for record in records], dtype=float)
    return t, n0, n


def fit_records(records: Sequence[CountRecord], weighted: bool = False) -> FitResult:
    """(t, N_hat) の直線フィット"""
    t, n0, n = _arrays(records)
    points = list(zip(t, n / n0))
    weights = 1.0 / _ordinate_variance(n, n0) if weighted else None
    return least_squares_line(points, weights)


def _resample(records: Sequence[CountRecord], resamples: int, seed: SeedLike):
    if resamples < ShotConstants.MIN_RESAMPLES:
        raise DomainError(f"再標本化回数は {ShotConstants.MIN_RESAMPLES} 以上にしてください: {resamples}")
    t, n0, n = _arrays(records)
    rng = make_rng(seed)
    n0_star = rng.poisson(n0, size=(resamples, len(t))).astype(float)
    n_star = rng.poisson(n, size=(resamples, len(t))).astype(float)
    if np.any(n0_star == 0):
        raise ZeroReferenceError("再標本化で参照カウントが0になりました（λ が小さすぎます）")
    return t, n0_star, n_star


def monte_carlo_error(records: Sequence[CountRecord], resamples: int = ShotConstants.DEFAULT_RESAMPLES,
                      seed: SeedLike = 0, weighted: bool = False) -> float:
    """パラメトリック・ブートストラップによる弱値推定の標準偏差"""
    t, n0_star, n_star = _resample(records, resamples, seed)
    weights = 1.0 / _ordinate_variance(n_star, n0_star) if weighted else None
    slopes = batch_slopes(t, n_star / n0_star, weights)
    return float(np.std(-0.5 * slopes, ddof=1))


def point_errors(records: Sequence[CountRecord], resamples: int = ShotConstants.DEFAULT_RESAMPLES,
                 seed: SeedLike = 0) -> np.ndarray:
    """各点の N_hat の標準偏差（ITE曲線の N_err 列）"""
    _, n0_star, n_star = _resample(records, resamples, seed)
    return np.std(n_star / n0_star, axis=0, ddof=1)


@dataclass(frozen=True)
class TrialEstimate:
    """1試行から得た弱値の推定"""
    observable: str
    weak_value: float
    stderr: float
    fit: FitResult


def estimate_weak_value(records: Sequence[CountRecord], noiseless: bool = False,
                        resamples: int = ShotConstants.DEFAULT_RESAMPLES, seed: SeedLike = 0,
                        weighted: bool = False) -> TrialEstimate:
    """フィットで弱値を求め、誤差はノイズなしなら OLS の標準誤差、そうでなければモンテカルロで見積もる"""
    fit = fit_records(records, weighted)
    weak_value, ols_error = weak_value_estimate(fit)
    error = ols_error if noiseless else monte_carlo_error(records, resamples, seed, weighted)
    return TrialEstimate(records[0].observable, weak_value, error, fit)


def coverage_fraction(estimates: Sequence[float], errors: Sequence[float], truth: float,
                      sigmas: float = ShotConstants.COVERAGE_SIGMAS) -> float:
    """推定値 ± sigmas·誤差 の区間が真値を含む割合"""
    estimates, errors = np.asarray(estimates, dtype=float), np.asarray(errors, dtype=float)
    if estimates.shape != errors.shape or estimates.size == 0:
        raise DataValidationError("推定値と誤差は同じ長さの空でない列である必要があります")
    return float(np.mean(np.abs(estimates - truth) <= sigmas * errors))


def records_to_frame(records: Sequence[CountRecord]) -> pd.DataFrame:
    """CSV 出力用の DataFrame（列: observable,transmission,t,n0,n,N）"""
    return pd.DataFrame([record.to_row() for record in records], columns=CsvConstants.COUNT_COLUMNS)


def frame_to_records(df: pd.DataFrame, flux: float) -> List[CountRecord]:
    """records_to_frame の逆（N 列は n/n0 から再計算される）"""
    missing = [column for column in CsvConstants.COUNT_COLUMNS if column not in df.columns]
    if missing:
        raise DataValidationError(f"カウントCSVに必要な列がありません: {missing}")
    return [
        CountRecord(str(row.observable), float(row.transmission), float(row.t), float(row.n0), float(row.n), flux)
        for row in df.itertuples(index=False)
    ]
