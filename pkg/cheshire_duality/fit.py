"""
(t, N) 点列の最小二乗直線フィットと、傾きから弱値への変換
"""
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from common.error_handling.exceptions import DataValidationError, DegenerateAbscissaError, TooFewPointsError


@dataclass(frozen=True)
class FitResult:
    """直線 y = intercept + slope·x のフィット結果"""
    slope: float
    intercept: float
    slope_stderr: float
    rss: float
    n_points: int = 0
    weighted: bool = False

    def __post_init__(self):
        for name in ('slope', 'intercept', 'slope_stderr', 'rss'):
            if not math.isfinite(getattr(self, name)):
                raise DataValidationError(f"フィット結果 {name} が有限ではありません")
        if self.slope_stderr < 0 or self.rss < 0:
            raise DataValidationError("標準誤差と残差平方和は非負である必要があります")


def _as_arrays(points: Sequence[Tuple[float, float]]) -> Tuple[np.ndarray, np.ndarray]:
    if len(points) < 2:
        raise TooFewPointsError(f"少なくとも2点が必要です: {len(points)}点")
    array = np.asarray(points, dtype=float)
    if array.ndim != 2 or array.shape[1] != 2:
        raise DataValidationError("点列は (x, y) の組である必要があります")
    x, y = array[:, 0], array[:, 1]
    if np.ptp(x) == 0.0:
        raise DegenerateAbscissaError("すべての x が同一です")
    return x, y


def least_squares_line(points: Sequence[Tuple[float, float]],
                       weights: Optional[Sequence[float]] = None) -> FitResult:
    """通常の最小二乗（weights 指定時は重み付き）で Σ w_i (y_i − a − b x_i)² を最小化"""
    x, y = _as_arrays(points)
    n = len(x)
    if weights is None:
        w = np.ones(n)
    else:
        w = np.asarray(weights, dtype=float)
        if w.shape != x.shape or np.any(w <= 0) or not np.all(np.isfinite(w)):
            raise DataValidationError("重みは点数と同じ長さの正の有限値である必要があります")

    w_sum = w.sum()
    x_mean = np.dot(w, x) / w_sum
    y_mean = np.dot(w, y) / w_sum
    dx = x - x_mean
    sxx = np.dot(w, dx * dx)
    slope = np.dot(w, dx * (y - y_mean)) / sxx
    intercept = y_mean - slope * x_mean
    residuals = y - intercept - slope * x
    rss = float(np.dot(w, residuals * residuals))

    # 2点なら残差自由度が0なので標準誤差は0
    slope_stderr = math.sqrt(rss / (n - 2) / sxx) if n > 2 else 0.0
    return FitResult(float(slope), float(intercept), slope_stderr, rss, n, weights is not None)


def weak_value_estimate(fit: FitResult) -> Tuple[float, float]:
    """w_hat = −slope/2, w_err = slope_stderr/2"""
    return -0.5 * fit.slope, 0.5 * fit.slope_stderr


def batch_slopes(x: Sequence[float], y_samples: np.ndarray, weights: Optional[np.ndarray] = None) -> np.ndarray:
    """複数のy列（行ごと）に対する傾きをまとめて計算（ブートストラップ用）"""
    x = np.asarray(x, dtype=float)
    y_samples = np.atleast_2d(np.asarray(y_samples, dtype=float))
    if np.ptp(x) == 0.0:
        raise DegenerateAbscissaError("すべての x が同一です")
    w = np.ones_like(y_samples) if weights is None else np.atleast_2d(np.asarray(weights, dtype=float))
    w_sum = w.sum(axis=1, keepdims=True)
    x_mean = (w * x).sum(axis=1, keepdims=True) / w_sum
    y_mean = (w * y_samples).sum(axis=1, keepdims=True) / w_sum
    dx = x - x_mean
    return (w * dx * (y_samples - y_mean)).sum(axis=1) / (w * dx * dx).sum(axis=1)
