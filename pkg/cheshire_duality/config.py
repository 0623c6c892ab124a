"""
実行設定モジュール

ConfigManager が集めた値（デフォルト → 設定ファイル → 環境変数 → コマンドライン）を
検証し、不変の RunConfig を組み立てる。度はここでだけラジアンに変換する。
"""
import json
import logging
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Tuple

from common.config import ConfigManager
from common.error_handling.exceptions import CheshireSimulationError, ConfigurationError
from .constants import AppConstants, BasisConstants, ScheduleConstants, ShotConstants, TomographyConstants
from .duality import DualityParams
from .ite import AttenuationSchedule

logger = logging.getLogger(__name__)

DEFAULT_SETTINGS: Dict[str, Any] = {
    "alpha_deg": [45.0],
    "transmissions": list(ScheduleConstants.DEFAULT_TRANSMISSIONS),
    "flux": ShotConstants.DEFAULT_FLUX,
    "seed": 0,
    "observables": list(BasisConstants.OBSERVABLE_KEYS),
    "mode": AppConstants.MODE_EXACT,
    "noise_p": 0.0,
    "output_dir": "./out",
    "resamples": ShotConstants.DEFAULT_RESAMPLES,
    "phi1_deg": 0.0,
    "phi2_deg": 0.0,
    "weighted_fit": False,
    "tomography_repeats": TomographyConstants.DEFAULT_REPEATS,
    "max_workers": 1,
    "progress": False,
    "log_level": "INFO",
    "log_file": None,
    "use_json_logs": False,
}

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


@dataclass(frozen=True)
class RunConfig:
    """検証済みの実行設定"""
    alpha_deg: Tuple[float, ...]
    transmissions: Tuple[float, ...]
    flux: float
    seed: int
    observables: Tuple[str, ...]
    mode: str
    noise_p: float
    output_dir: Path
    resamples: int
    phi1_deg: float
    phi2_deg: float
    weighted_fit: bool
    tomography_repeats: int
    max_workers: int
    progress: bool
    log_level: str
    log_file: Optional[Path]
    use_json_logs: bool

    @property
    def exact(self) -> bool:
        return self.mode == AppConstants.MODE_EXACT

    @property
    def schedule(self) -> AttenuationSchedule:
        return AttenuationSchedule(self.transmissions)

    def params(self, alpha_deg: float) -> DualityParams:
        return DualityParams.from_degrees(alpha_deg, self.phi1_deg, self.phi2_deg)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data['output_dir'] = str(self.output_dir)
        data['log_file'] = str(self.log_file) if self.log_file else None
        return data


class _Validator:
    """ConfigManager の値を1項目ずつ検証し、失敗時は項目名と行番号を付ける"""

    def __init__(self, manager: ConfigManager):
        self.manager = manager

    def fail(self, key: str, message: str) -> ConfigurationError:
        return ConfigurationError(f"{message} [source={self.manager.source_of(key)}]",
                                  field=key, line=self.manager.line_of(key))

    def number(self, key: str, minimum: Optional[float] = None, maximum: Optional[float] = None,
               inclusive_min: bool = True) -> float:
        value = self.manager.get(key)
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise self.fail(key, f"数値を指定してください: {value!r}")
        value = float(value)
        if not math.isfinite(value):
            raise self.fail(key, f"有限の数値を指定してください: {value}")
        if minimum is not None and (value < minimum or (not inclusive_min and value == minimum)):
            bracket = "以上" if inclusive_min else "より大きい値"
            raise self.fail(key, f"{minimum:g} {bracket}を指定してください: {value:g}")
        if maximum is not None and value > maximum:
            raise self.fail(key, f"{maximum:g} 以下を指定してください: {value:g}")
        return value

    def integer(self, key: str, minimum: int, maximum: Optional[int] = None) -> int:
        """整数設定を float を経由せずに検証する

        Args:
            key: 設定キー
            minimum: 許容する最小値
            maximum: 許容する最大値（None なら上限なし）

        Returns:
            int: 検証済みの値
        """
        value = self.manager.get(key)
        if isinstance(value, str):
            try:
                value = int(value.strip())
            except ValueError:
                raise self.fail(key, f"整数を指定してください: {value!r}")
        elif isinstance(value, float) and value.is_integer() and abs(value) < 2 ** 53:
            # JSON の 5.0 のような表記は精度を失わない範囲でのみ受け付ける
            value = int(value)
        if isinstance(value, bool) or not isinstance(value, int):
            raise self.fail(key, f"整数を指定してください: {value!r}")
        if value < minimum:
            raise self.fail(key, f"{minimum} 以上を指定してください: {value}")
        if maximum is not None and value > maximum:
            raise self.fail(key, f"{maximum} 以下を指定してください: {value}")
        return value

    def flag(self, key: str) -> bool:
        value = self.manager.get(key)
        if isinstance(value, bool):
            return value
        if isinstance(value, str) and value.lower() in ("true", "false", "1", "0"):
            return value.lower() in ("true", "1")
        raise self.fail(key, f"true または false を指定してください: {value!r}")

    def number_list(self, key: str, minimum: float, maximum: float, inclusive_min: bool = True) -> Tuple[float, ...]:
        value = self.manager.get(key)
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            value = [value]
        if not isinstance(value, (list, tuple)) or not value:
            raise self.fail(key, f"数値のリストを指定してください: {value!r}")
        result = []
        for item in value:
            if isinstance(item, bool) or not isinstance(item, (int, float)) or not math.isfinite(item):
                raise self.fail(key, f"数値以外の要素があります: {item!r}")
            if item < minimum or item > maximum or (not inclusive_min and item == minimum):
                raise self.fail(key, f"範囲外の値があります: {item:g}")
            result.append(float(item))
        return tuple(result)

    def choice_list(self, key: str, choices: Tuple[str, ...]) -> Tuple[str, ...]:
        value = self.manager.get(key)
        if isinstance(value, str):
            value = [part.strip() for part in value.split(',') if part.strip()]
        if not isinstance(value, (list, tuple)) or not value:
            raise self.fail(key, f"{', '.join(choices)} から1つ以上指定してください")
        unknown = [item for item in value if item not in choices]
        if unknown:
            raise self.fail(key, f"未知の値: {unknown}（{', '.join(choices)} のいずれか）")
        # 重複を除き正準順序に並べる
        return tuple(choice for choice in choices if choice in value)

    def choice(self, key: str, choices: Tuple[str, ...], transform=str) -> str:
        value = self.manager.get(key)
        if not isinstance(value, str) or transform(value) not in choices:
            raise self.fail(key, f"{', '.join(choices)} のいずれかを指定してください: {value!r}")
        return transform(value)

    def optional_path(self, key: str) -> Optional[Path]:
        value = self.manager.get(key)
        if value in (None, ""):
            return None
        if not isinstance(value, str):
            raise self.fail(key, f"パスを文字列で指定してください: {value!r}")
        return Path(value)


def build_run_config(manager: ConfigManager) -> RunConfig:
    """ConfigManager の現在値を検証して RunConfig を返す"""
    unknown = manager.unknown_keys()
    if unknown:
        raise ConfigurationError(f"未知の設定キーがあります: {unknown}", field=unknown[0],
                                 line=manager.line_of(unknown[0]))
    check = _Validator(manager)

    alpha_deg = check.number_list("alpha_deg", 0.0, 90.0)
    transmissions = check.number_list("transmissions", 0.0, 1.0, inclusive_min=False)
    if len(set(transmissions)) < 2:
        raise check.fail("transmissions", "透過率は少なくとも2種類必要です")
    phi1_deg = check.number("phi1_deg", 0.0)
    phi2_deg = check.number("phi2_deg", 0.0)
    for key, value in (("phi1_deg", phi1_deg), ("phi2_deg", phi2_deg)):
        if value >= 360.0:
            raise check.fail(key, f"[0, 360) の範囲で指定してください: {value:g}")
    output_dir = check.optional_path("output_dir")
    if output_dir is None:
        raise check.fail("output_dir", "出力ディレクトリを指定してください")

    config = RunConfig(
        alpha_deg=alpha_deg,
        transmissions=transmissions,
        flux=check.number("flux", 0.0, inclusive_min=False),
        seed=check.integer("seed", 0, ShotConstants.MAX_SEED),
        observables=check.choice_list("observables", BasisConstants.OBSERVABLE_KEYS),
        mode=check.choice("mode", AppConstants.MODES, str.lower),
        noise_p=check.number("noise_p", 0.0, 1.0),
        output_dir=output_dir,
        resamples=check.integer("resamples", ShotConstants.MIN_RESAMPLES),
        phi1_deg=phi1_deg,
        phi2_deg=phi2_deg,
        weighted_fit=check.flag("weighted_fit"),
        tomography_repeats=check.integer("tomography_repeats", 1),
        max_workers=check.integer("max_workers", 1),
        progress=check.flag("progress"),
        log_level=check.choice("log_level", LOG_LEVELS, str.upper),
        log_file=check.optional_path("log_file"),
        use_json_logs=check.flag("use_json_logs"),
    )

    # 下流の検証（角度の範囲など）も読み込み時に通しておく
    try:
        config.params(alpha_deg[0])
    except CheshireSimulationError as e:
        raise check.fail("alpha_deg", str(e))
    return config


def load_run_config(config_path: Optional[Path] = None, overrides: Optional[Mapping[str, Any]] = None,
                    environ: Optional[Mapping[str, str]] = None) -> Tuple[RunConfig, ConfigManager]:
    """設定ファイル・環境変数・コマンドライン上書きをまとめて RunConfig にする

    Args:
        config_path: 設定ファイルのパス（None なら既定のファイル名を探す）
        overrides: コマンドライン由来の上書き値（None の値は無視）
        environ: 環境変数のマッピング（None なら os.environ）

    Returns:
        Tuple[RunConfig, ConfigManager]: 検証済み設定と、値の出所を保持するマネージャー

    Raises:
        ConfigurationError: 値が不正な場合（項目名と行番号付き）
    """
    # 設定の読み込み
    manager = ConfigManager(config_path, defaults=DEFAULT_SETTINGS, logger=logger, environ=environ)
    # コマンドライン引数で上書き
    if overrides:
        manager.update_config(overrides)
    return build_run_config(manager), manager


def alpha_range(start: float, stop: float, step: float) -> Tuple[float, ...]:
    """start から stop まで（両端含む）step 刻みの角度列"""
    if step <= 0:
        raise ConfigurationError(f"刻み幅は正の値を指定してください: {step:g}", field="alpha_deg")
    if stop < start:
        raise ConfigurationError(f"終点は始点以上にしてください: {start:g} > {stop:g}", field="alpha_deg")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    # 刻みの累積誤差を避けるため10桁で丸める
    return tuple(round(start + index * step, 10) for index in range(count))


def create_config_template(file_path: Optional[Path] = None) -> Path:
    """設定ファイルテンプレートを作成"""
    template_path = Path(file_path or AppConstants.TEMPLATE_CONFIG_FILE)
    try:
        with open(template_path, 'w', encoding='utf-8') as f:
            json.dump(DEFAULT_SETTINGS, f, indent=2, ensure_ascii=False)
            f.write('\n')
    except OSError as e:
        raise ConfigurationError(f"設定テンプレートファイルの作成に失敗しました: {template_path} - {e}")
    logger.info(f"設定テンプレートファイルを作成しました: {template_path}")
    return template_path
