"""
統一エラーハンドリングシステム
"""
import logging
import traceback
from enum import Enum
from typing import Any, Dict, List, Optional

from .exceptions import (
    ConfigurationError,
    DataValidationError,
    FileProcessingError,
    NumericalError,
)


class ErrorType(Enum):
    """エラータイプの分類"""
    CONFIGURATION = "configuration"
    NUMERICAL = "numerical"
    VALIDATION = "validation"
    FILE_SYSTEM = "file_system"
    UNKNOWN = "unknown"


class ExitCode:
    """終了コード"""
    SUCCESS = 0
    UNEXPECTED = 1
    CONFIG_ERROR = 2
    NUMERICAL_FAILURE = 3


class ErrorHandler:
    """エラーハンドリングの統一クラス"""

    def __init__(self, logger: Optional[logging.Logger] = None):
        self.logger = logger or logging.getLogger(__name__)
        self.errors: List[Exception] = []

    def classify_error(self, error: Exception) -> ErrorType:
        """エラーを分類"""
        if isinstance(error, ConfigurationError):
            return ErrorType.CONFIGURATION
        if isinstance(error, NumericalError):
            return ErrorType.NUMERICAL
        if isinstance(error, DataValidationError):
            return ErrorType.VALIDATION
        if isinstance(error, (FileProcessingError, OSError)):
            return ErrorType.FILE_SYSTEM
        return ErrorType.UNKNOWN

    def exit_code_for(self, error: Exception) -> int:
        """エラーに対応する終了コードを取得"""
        error_type = self.classify_error(error)
        if error_type is ErrorType.CONFIGURATION:
            return ExitCode.CONFIG_ERROR
        if error_type in (ErrorType.NUMERICAL, ErrorType.VALIDATION):
            # 検証エラーは設定読み込み後に起きるので数値失敗として扱う
            return ExitCode.NUMERICAL_FAILURE
        return ExitCode.UNEXPECTED

    def log_error_with_context(self, error: Exception, context: Dict[str, Any]) -> None:
        """コンテキスト情報付きでエラーをログ出力"""
        self.errors.append(error)
        error_type = self.classify_error(error)
        context_str = ", ".join(f"{k}={v}" for k, v in context.items())
        self.logger.error(f"[{error_type.value.upper()}] {error} | コンテキスト: {context_str}")
        self.logger.debug(f"スタックトレース: {traceback.format_exc()}")

    def log_and_continue(self, error: Exception, context: str) -> None:
        """エラーをログ出力して処理を継続"""
        self.errors.append(error)
        self.logger.error(f"処理継続エラー [{context}]: {error}")

    def log_and_raise(self, error: Exception, context: str) -> None:
        """エラーをログ出力して例外を再発生"""
        self.errors.append(error)
        self.logger.error(f"致命的エラー [{context}]: {error}")
        self.logger.debug(f"エラー詳細: {traceback.format_exc()}")
        raise error

    def create_error_summary(self, errors: Optional[List[Exception]] = None) -> Dict[str, Any]:
        """エラーリストから統計情報を作成"""
        errors = self.errors if errors is None else errors
        if not errors:
            return {'total_errors': 0, 'error_types': {}}

        error_types: Dict[str, int] = {}
        for error in errors:
            name = type(error).__name__
            error_types[name] = error_types.get(name, 0) + 1

        return {
            'total_errors': len(errors),
            'error_types': error_types,
            'first_error': str(errors[0]),
            'last_error': str(errors[-1]),
        }
