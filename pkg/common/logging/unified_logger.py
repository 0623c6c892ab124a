"""
統一ロギングシステム
"""
import json
import logging
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Optional

CONTEXT_FIELDS = ('command', 'alpha_deg', 'observable', 'seed', 'error_type')


class StructuredFormatter(logging.Formatter):
    """構造化ログフォーマッター（JSON Lines）"""

    def format(self, record: logging.LogRecord) -> str:
        log_entry = {
            'timestamp': datetime.fromtimestamp(record.created).isoformat(),
            'level': record.levelname,
            'logger': record.name,
            'function': record.funcName,
            'line': record.lineno,
            'message': record.getMessage(),
        }
        for field in CONTEXT_FIELDS:
            if hasattr(record, field):
                log_entry[field] = getattr(record, field)
        return json.dumps(log_entry, ensure_ascii=False)


class UnifiedLogger:
    """統一ロギングシステムクラス"""

    def __init__(self, name: str = "cheshire_duality", level: str = "INFO",
                 log_file: Optional[Path] = None, use_json: bool = False):
        self.use_json = use_json
        self.logger = self.setup_logger(name, level, log_file)

    def setup_logger(self, name: str, level: str = "INFO", log_file: Optional[Path] = None) -> logging.Logger:
        """ロガーをセットアップ"""
        logger = logging.getLogger(name)
        logger.setLevel(getattr(logging, level.upper(), logging.INFO))

        # 既存のハンドラーをクリア
        logger.handlers.clear()

        formatter = logging.Formatter(
            '%(asctime)s - %(name)s - %(levelname)s - %(message)s',
            datefmt='%Y-%m-%d %H:%M:%S'
        )

        console_handler = logging.StreamHandler()
        console_handler.setFormatter(formatter)
        logger.addHandler(console_handler)

        if log_file:
            log_file = Path(log_file)
            log_file.parent.mkdir(parents=True, exist_ok=True)
            file_handler = logging.FileHandler(log_file, encoding='utf-8')
            file_handler.setFormatter(StructuredFormatter() if self.use_json else formatter)
            logger.addHandler(file_handler)

        return logger

    def log_configuration_info(self, config: Dict[str, Any]) -> None:
        """設定情報のログ出力"""
        self.logger.info("設定情報:")
        for key, value in config.items():
            self.logger.info(f"  {key}: {value}")

    def log_sweep_progress(self, current: int, total: int, item: str) -> None:
        """掃引進捗のログ出力"""
        percentage = (current / total) * 100 if total > 0 else 0
        self.logger.info(f"掃引進捗: {current}/{total} ({percentage:.1f}%) - {item}")

    def log_weak_values(self, alpha_deg: float, source: str, values: Dict[str, float]) -> None:
        """弱値の1行ログ"""
        body = ", ".join(f"{key}={value:.6f}" for key, value in values.items())
        self.logger.debug(f"α={alpha_deg:g}° [{source}] {body}",
                          extra={'alpha_deg': alpha_deg})

    def log_error_with_context(self, error: Exception, context: Dict[str, Any]) -> None:
        """コンテキスト情報付きエラーログ"""
        context_str = ", ".join(f"{k}={v}" for k, v in context.items())
        self.logger.error(f"エラー: {error} | コンテキスト: {context_str}",
                          extra={'error_type': type(error).__name__})

    def log_run_summary(self, command: str, artifacts: int, rows: int, error_count: int,
                        duration_seconds: float) -> None:
        """処理結果サマリーのログ出力"""
        self.logger.info("=" * 50)
        self.logger.info(f"処理結果サマリー [{command}]", extra={'command': command})
        self.logger.info(f"出力ファイル数: {artifacts}")
        self.logger.info(f"出力行数: {rows}")
        self.logger.info(f"エラー数: {error_count}")
        self.logger.info(f"処理時間: {duration_seconds:.2f}秒")
        self.logger.info("=" * 50)

    def log_performance_metrics(self, metrics: Dict[str, float]) -> None:
        """パフォーマンス指標のログ出力"""
        self.logger.info("パフォーマンス指標:")
        for metric, value in metrics.items():
            if 'time' in metric.lower() or 'duration' in metric.lower():
                self.logger.info(f"  {metric}: {value:.3f}秒")
            else:
                self.logger.info(f"  {metric}: {value}")

    # 既存のロガーメソッドのプロキシ
    def info(self, message: str, **context: Any) -> None:
        self.logger.info(message, extra=context or None)

    def warning(self, message: str, **context: Any) -> None:
        self.logger.warning(message, extra=context or None)

    def error(self, message: str, **context: Any) -> None:
        self.logger.error(message, extra=context or None)

    def debug(self, message: str, **context: Any) -> None:
        self.logger.debug(message, extra=context or None)
