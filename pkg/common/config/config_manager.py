"""
中央集約設定管理システム

読み込み順（後勝ち）: デフォルト値 → JSON設定ファイル → 環境変数 → update_config()
"""
import json
import os
import re
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional

from ..error_handling.exceptions import ConfigurationError

_KEY_PATTERN = re.compile(r'^\s*[{,]?\s*"([^"]+)"\s*:')


class ConfigManager:
    """設定管理の統一クラス"""

    DEFAULT_CONFIG_FILES = [
        'cheshire_config.json',
        'config.json',
    ]
    ENV_PREFIX = 'CHESHIRE_'

    def __init__(self, config_path: Optional[Path] = None, defaults: Optional[Mapping[str, Any]] = None,
                 logger=None, environ: Optional[Mapping[str, str]] = None):
        self.logger = logger
        self.config_path = Path(config_path) if config_path else None
        self.defaults = dict(defaults or {})
        self.environ = os.environ if environ is None else environ
        self.config_data: Dict[str, Any] = {}
        self.sources: Dict[str, str] = {}
        self.key_lines: Dict[str, int] = {}
        self.load_config(self.config_path)

    def load_config(self, config_path: Optional[Path] = None) -> Dict[str, Any]:
        """設定ファイルを読み込み"""
        self.config_data = dict(self.defaults)
        self.sources = {key: 'default' for key in self.defaults}

        if config_path:
            file_data = self._load_single_config(Path(config_path))
        else:
            file_data = {}
            # デフォルトの設定ファイルを順次試行
            for config_file in self.DEFAULT_CONFIG_FILES:
                candidate = Path(config_file)
                if candidate.exists():
                    file_data = self._load_single_config(candidate)
                    self.config_path = candidate
                    break
            else:
                if self.logger:
                    self.logger.debug("設定ファイルが見つかりません。デフォルト設定を使用します。")

        for key, value in file_data.items():
            self.config_data[key] = value
            self.sources[key] = 'file'

        self._apply_environment()
        return self.config_data

    def _load_single_config(self, config_path: Path) -> Dict[str, Any]:
        """単一の設定ファイルを読み込み"""
        try:
            text = config_path.read_text(encoding='utf-8')
        except FileNotFoundError:
            raise ConfigurationError(f"設定ファイルが見つかりません: {config_path}")
        except OSError as e:
            raise ConfigurationError(f"設定ファイル読み込みエラー: {config_path} - {e}")

        try:
            config_data = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigurationError(
                f"設定ファイルの形式が無効です: {config_path} - {e.msg} (column={e.colno})",
                line=e.lineno,
            )

        if not isinstance(config_data, dict):
            raise ConfigurationError(f"設定ファイルはJSONオブジェクトである必要があります: {config_path}", line=1)

        for key, value in config_data.items():
            if isinstance(value, dict):
                raise ConfigurationError("設定はフラットなキー・値である必要があります", field=key,
                                         line=self._find_key_line(text, key))

        self.key_lines = {key: self._find_key_line(text, key) for key in config_data}

        if self.logger:
            self.logger.info(f"設定ファイル読み込み成功: {config_path.name}")

        return config_data

    @staticmethod
    def _find_key_line(text: str, key: str) -> Optional[int]:
        for number, line in enumerate(text.splitlines(), 1):
            match = _KEY_PATTERN.match(line)
            if match and match.group(1) == key:
                return number
        return None

    def _apply_environment(self) -> None:
        """環境変数による上書き（CHESHIRE_<KEY>）"""
        for name, raw in self.environ.items():
            if not name.startswith(self.ENV_PREFIX):
                continue
            key = name[len(self.ENV_PREFIX):].lower()
            try:
                value = json.loads(raw)
            except json.JSONDecodeError:
                value = raw
            self.config_data[key] = value
            self.sources[key] = 'env'
            if self.logger:
                self.logger.debug(f"環境変数で設定を上書き: {name}")

    def get(self, key: str, default: Any = None) -> Any:
        """設定値を取得"""
        return self.config_data.get(key, default)

    def line_of(self, key: str) -> Optional[int]:
        """設定ファイル内でキーが現れる行番号（ファイル由来の値のみ）"""
        if self.sources.get(key) != 'file':
            return None
        return self.key_lines.get(key)

    def source_of(self, key: str) -> str:
        return self.sources.get(key, 'unknown')

    def unknown_keys(self) -> List[str]:
        """デフォルトに存在しないキー"""
        if not self.defaults:
            return []
        return sorted(key for key in self.config_data if key not in self.defaults)

    def get_logging_settings(self) -> Dict[str, Any]:
        """ログ関連の設定を取得"""
        return {
            'log_level': self.get('log_level', 'INFO'),
            'log_file': self.get('log_file'),
            'use_json_logs': self.get('use_json_logs', False),
        }

    def update_config(self, updates: Mapping[str, Any]) -> None:
        """設定を更新（コマンドライン引数など）"""
        for key, value in updates.items():
            if value is None:
                continue
            self.config_data[key] = value
            self.sources[key] = 'cli'

        if self.logger:
            self.logger.debug(f"設定更新: {list(updates.keys())}")

    def save_config(self, config_path: Optional[Path] = None) -> Path:
        """設定をファイルに保存"""
        config_path = Path(config_path or self.config_path or self.DEFAULT_CONFIG_FILES[0])
        try:
            with open(config_path, 'w', encoding='utf-8') as f:
                json.dump(self.config_data, f, ensure_ascii=False, indent=2)
                f.write('\n')
        except OSError as e:
            raise ConfigurationError(f"設定ファイル保存エラー: {config_path} - {e}")

        if self.logger:
            self.logger.info(f"設定ファイル保存完了: {config_path}")
        return config_path
