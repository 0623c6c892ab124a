"""
定数定義モジュール
"""

from typing import List, Tuple


class NumericConstants:
    """数値計算に関する定数"""
    # 射影・ユニタリ判定の許容誤差（8x8以下の積で蓄積する倍精度誤差の1000倍程度）
    STRUCTURE_EPS = 1e-12
    # <ψf|ψi> がこれ未満なら事後選択が不適切
    ORTHOGONAL_TOL = 1e-14
    # 原点での差分ステップ
    FINITE_DIFFERENCE_STEP = 1e-6
    # 位相込みの状態一致判定
    PHASE_MATCH_TOL = 1e-12
    # 符号化部分空間からの漏れの許容量
    LEAKAGE_TOL = 1e-10
    # 密度行列の検証
    DENSITY_HERMITIAN_TOL = 1e-10
    DENSITY_TRACE_TOL = 1e-10
    DENSITY_EIGEN_FLOOR = -1e-8


class BasisConstants:
    """基底ラベル（順序はここで一度だけ定義する）"""
    TENSOR_SEPARATOR = "⊗"
    PATH_LABELS: Tuple[str, str] = ("L", "R")
    ATTRIBUTE_LABELS: Tuple[str, str] = ("Particle", "Wave")
    QUBIT_LABELS: Tuple[str, str] = ("0", "1")
    # 抽象4次元空間 {L⊗Particle, L⊗Wave, R⊗Particle, R⊗Wave}
    OBSERVABLE_KEYS: Tuple[str, ...] = ("PL", "PR", "WL", "WR")


class ScheduleConstants:
    """減衰スケジュールに関する定数"""
    # t <= 0.0101 で N(t) の線形性が1%以内に保たれる
    DEFAULT_TRANSMISSIONS: Tuple[float, ...] = (0.98, 0.985, 0.99, 0.995, 1.0)
    # 線形化バイアスの上限: |w_hat - w| <= bound * max(w, 0.05)。w = 1 では既定スケジュールで約1.005%
    LINEARIZATION_REL_BOUND = 0.0101
    LINEARIZATION_FLOOR = 0.05


class OpticsConstants:
    """8モード光学回路に関する定数"""
    SIDES: Tuple[str, str] = ("L", "R")
    RAILS: Tuple[str, str] = ("up", "down")
    POLARIZATIONS: Tuple[str, str] = ("H", "V")
    MODE_SEPARATOR = "-"
    # 回路の段（propagate の until に指定できる）
    STAGES: Tuple[str, ...] = ("toolbox", "bs1", "nd", "swap", "decode", "bs2")
    BS_HADAMARD = "hadamard"
    BS_SYMMETRIC = "symmetric"
    BS_CONVENTIONS: Tuple[str, ...] = (BS_HADAMARD, BS_SYMMETRIC)
    DETECTORS: Tuple[str, ...] = ("D1", "D2", "D3")
    # 確率保存の許容誤差
    CONSERVATION_TOL = 1e-12


class ShotConstants:
    """光子計数に関する定数"""
    DEFAULT_FLUX = 1e6
    DEFAULT_RESAMPLES = 1000
    MIN_RESAMPLES = 100
    MAX_SEED = 2 ** 64 - 1
    # 2σ区間の被覆率の検証用
    COVERAGE_SIGMAS = 2.0


class TomographyConstants:
    """トモグラフィに関する定数"""
    BASES: Tuple[str, ...] = ("Z", "X", "Y")
    OUTCOMES: Tuple[str, ...] = ("00", "01", "10", "11")
    DEFAULT_REPEATS = 50
    # 平均忠実度 99.45% に対応する脱分極強度（F = 1 - 3p/4）
    REFERENCE_NOISE_P = 0.00733


class CsvConstants:
    """出力CSVの列定義"""
    COUNT_COLUMNS: List[str] = ['observable', 'transmission', 't', 'n0', 'n', 'N']
    WEAK_VALUE_COLUMNS: List[str] = [
        'alpha_deg', 'wPL', 'wPR', 'wWL', 'wWR', 'source',
        'stderr_PL', 'stderr_PR', 'stderr_WL', 'stderr_WR',
    ]
    ITE_CURVE_COLUMNS: List[str] = ['T', 't', 'N', 'N_err']
    SOURCE_CLOSED_FORM = 'closed_form'
    SOURCE_EXACT = 'exact'
    SOURCE_FITTED = 'fitted'


class AppConstants:
    """アプリケーション全体に関する定数"""
    APP_NAME = "Cheshire Duality Simulator"
    VERSION = "1.0.0"

    MODE_EXACT = "exact"
    MODE_SHOTS = "shots"
    MODES: Tuple[str, ...] = (MODE_EXACT, MODE_SHOTS)

    COMMAND_WEAK_VALUES = "weak-values"
    COMMAND_ITE_CURVE = "ite-curve"
    COMMAND_TOMOGRAPHY = "tomography"

    DEFAULT_CONFIG_FILE = "cheshire_config.json"
    TEMPLATE_CONFIG_FILE = "cheshire_config_template.json"
    WEAK_VALUES_FILE = "weak_values.csv"
    TOMOGRAPHY_FILE = "tomography_report.json"
    ITE_CURVE_FILE_FORMAT = "ite_curve_{observable}_alpha{alpha:g}.csv"
    COUNTS_FILE_FORMAT = "counts_{observable}_alpha{alpha:g}.csv"
