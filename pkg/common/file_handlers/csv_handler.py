"""
統一CSV/JSONハンドラー

数値は有効数字15桁で出力するため、読み込み→再出力でバイト単位に一致する。
"""
import io
import json
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd

from ..error_handling.exceptions import FileProcessingError

FLOAT_FORMAT = '%.15g'
FOOTER_PREFIX = '# '


class CSVHandler:
    """CSVファイルの統一処理クラス"""

    def __init__(self, logger=None, error_handler=None, encoding: str = 'utf-8'):
        self.logger = logger
        self.error_handler = error_handler
        self.encoding = encoding

    def to_csv_text(self, df: pd.DataFrame, footer: Optional[Dict[str, Any]] = None) -> str:
        """DataFrameをCSV文字列に変換（フッター行付き）"""
        body = df.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
        if footer:
            parts = [f"{key}={self._format_value(value)}" for key, value in footer.items()]
            body += FOOTER_PREFIX + ','.join(parts) + '\n'
        return body

    def write_csv(self, df: pd.DataFrame, file_path: Path, footer: Optional[Dict[str, Any]] = None) -> Path:
        """CSVファイルを書き出し"""
        file_path = Path(file_path)
        try:
            file_path.parent.mkdir(parents=True, exist_ok=True)
            with open(file_path, 'w', encoding=self.encoding, newline='') as f:
                f.write(self.to_csv_text(df, footer))
        except OSError as e:
            raise FileProcessingError(f"CSV書き込みエラー: {file_path.name} - {e}")

        if self.logger:
            self.logger.info(f"CSV出力完了: {file_path.name} ({len(df)}行)")
        return file_path

    def parse_csv_text(self, text: str) -> Tuple[pd.DataFrame, Dict[str, str]]:
        """CSV文字列を読み込み、本体とフッターを返す"""
        lines = text.splitlines(keepends=True)
        body = ''.join(line for line in lines if not line.startswith(FOOTER_PREFIX))
        footer: Dict[str, str] = {}
        for line in lines:
            if line.startswith(FOOTER_PREFIX):
                for part in line[len(FOOTER_PREFIX):].strip().split(','):
                    key, _, value = part.partition('=')
                    footer[key] = value
        df = pd.read_csv(io.StringIO(body), float_precision='round_trip')
        return df, footer

    def read_csv(self, file_path: Path) -> Tuple[pd.DataFrame, Dict[str, str]]:
        """CSVファイルを読み込み"""
        file_path = Path(file_path)
        try:
            text = file_path.read_text(encoding=self.encoding)
        except OSError as e:
            raise FileProcessingError(f"CSV読み込みエラー: {file_path.name} - {e}")
        return self.parse_csv_text(text)

    def read_csv_safe(self, file_path: Path) -> Optional[Tuple[pd.DataFrame, Dict[str, str]]]:
        """安全なCSV読み込み（エラー時はNoneを返す）"""
        try:
            return self.read_csv(file_path)
        except Exception as e:
            if self.error_handler:
                self.error_handler.log_and_continue(e, f"CSV読み込み: {Path(file_path).name}")
            elif self.logger:
                self.logger.error(f"CSV読み込みエラー: {Path(file_path).name} - {e}")
            return None

    def validate_csv_structure(self, df: pd.DataFrame, required_column_names: List[str]) -> bool:
        """CSVの列構成を検証"""
        missing_columns = [col for col in required_column_names if col not in df.columns]
        if missing_columns:
            if self.logger:
                self.logger.error(f"必須列が不足: {missing_columns}")
            return False
        return True

    def write_json(self, payload: Dict[str, Any], file_path: Path) -> Path:
        """JSONレポートを書き出し（キー順固定）"""
        file_path = Path(file_path)
        try:
            file_path.parent.mkdir(parents=True, exist_ok=True)
            with open(file_path, 'w', encoding=self.encoding, newline='') as f:
                json.dump(payload, f, ensure_ascii=False, indent=2, sort_keys=True)
                f.write('\n')
        except (OSError, TypeError) as e:
            raise FileProcessingError(f"JSON書き込みエラー: {file_path.name} - {e}")

        if self.logger:
            self.logger.info(f"JSON出力完了: {file_path.name}")
        return file_path

    @staticmethod
    def _format_value(value: Any) -> str:
        if isinstance(value, float):
            return FLOAT_FORMAT % value
        return str(value)
