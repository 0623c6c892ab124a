"""
共通コンポーネントの統合テスト
"""
import json
import shutil
import sys
import tempfile
import threading
import time
import unittest
from datetime import datetime, timedelta
from pathlib import Path

import pandas as pd

# プロジェクトルートをパスに追加
sys.path.insert(0, str(Path(__file__).parent.parent))

from common import (
    CSVHandler,
    ConfigManager,
    ErrorHandler,
    ErrorType,
    ExitCode,
    OutputArtifact,
    PerformanceOptimizer,
    RunSummary,
    UnifiedLogger,
)
from common.error_handling import (
    ConfigurationError,
    DomainError,
    FileProcessingError,
    ZeroReferenceError,
)


class TestCommonComponents(unittest.TestCase):
    """共通コンポーネントの統合テスト"""

    def setUp(self):
        """テスト前の準備"""
        self.temp_dir = Path(tempfile.mkdtemp())
        self.logger = UnifiedLogger("test_logger", level="WARNING")
        self.error_handler = ErrorHandler(self.logger.logger)
        self.csv_handler = CSVHandler(self.logger.logger, self.error_handler)

    def tearDown(self):
        """テスト後のクリーンアップ"""
        for handler in list(self.logger.logger.handlers):
            handler.close()
        shutil.rmtree(self.temp_dir, ignore_errors=True)

    def test_csv_footer_round_trip(self):
        """フッター付きCSVの書き出しと読み込み"""
        df = pd.DataFrame({'T': [1.0, 0.99], 't': [0.0, 0.00502516792675], 'N': [1.0, 0.98999]})
        footer = {'slope': -1.0000123456789, 'weak_value': 0.5, 'stderr': 0.0}
        path = self.csv_handler.write_csv(df, self.temp_dir / "sub" / "curve.csv", footer)

        text = path.read_text(encoding='utf-8')
        self.assertTrue(text.splitlines()[-1].startswith("# slope=-1.0000123456789,"))

        loaded, loaded_footer = self.csv_handler.read_csv(path)
        self.assertEqual(list(loaded.columns), ['T', 't', 'N'])
        self.assertEqual(loaded['t'].iloc[1], 0.00502516792675)
        self.assertEqual(loaded_footer['weak_value'], '0.5')
        self.assertEqual(self.csv_handler.to_csv_text(loaded, footer), text)

    def test_csv_read_safe_returns_none(self):
        """存在しないファイルは None"""
        self.assertIsNone(self.csv_handler.read_csv_safe(self.temp_dir / "missing.csv"))
        self.assertEqual(len(self.error_handler.errors), 1)

    def test_csv_structure_validation(self):
        df = pd.DataFrame({'observable': ['PR'], 'n': [3]})
        self.assertTrue(self.csv_handler.validate_csv_structure(df, ['observable']))
        self.assertFalse(self.csv_handler.validate_csv_structure(df, ['observable', 'n0']))

    def test_json_report_has_sorted_keys(self):
        path = self.csv_handler.write_json({'b': 1, 'a': [0.5]}, self.temp_dir / "report.json")
        text = path.read_text(encoding='utf-8')
        self.assertLess(text.index('"a"'), text.index('"b"'))
        self.assertEqual(json.loads(text), {'a': [0.5], 'b': 1})

    def test_json_report_rejects_unserializable(self):
        with self.assertRaises(FileProcessingError):
            self.csv_handler.write_json({'value': object()}, self.temp_dir / "bad.json")

    def test_config_manager_layers(self):
        """デフォルト → ファイル → 環境変数 → 更新 の順で上書き"""
        config_file = self.temp_dir / "config.json"
        config_file.write_text('{\n  "seed": 1,\n  "flux": 10\n}\n', encoding='utf-8')
        manager = ConfigManager(config_file, defaults={'seed': 0, 'flux': 1.0, 'mode': 'exact'},
                                environ={'CHESHIRE_MODE': 'shots', 'OTHER': 'x'})
        self.assertEqual(manager.get('seed'), 1)
        self.assertEqual(manager.get('mode'), 'shots')
        self.assertEqual(manager.line_of('flux'), 3)
        self.assertIsNone(manager.line_of('mode'))

        manager.update_config({'seed': 5, 'flux': None})
        self.assertEqual(manager.get('seed'), 5)
        self.assertEqual(manager.get('flux'), 10)
        self.assertEqual(manager.source_of('seed'), 'cli')
        self.assertEqual(manager.unknown_keys(), [])

    def test_config_manager_rejects_nested_values(self):
        config_file = self.temp_dir / "nested.json"
        config_file.write_text('{\n  "seed": 1,\n  "fit": {"weighted": true}\n}\n', encoding='utf-8')
        with self.assertRaises(ConfigurationError) as context:
            ConfigManager(config_file, defaults={'seed': 0}, environ={})
        self.assertEqual(context.exception.field, 'fit')
        self.assertEqual(context.exception.line, 3)

    def test_config_manager_save(self):
        empty = self.temp_dir / "empty.json"
        empty.write_text('{}', encoding='utf-8')
        manager = ConfigManager(empty, defaults={'seed': 0}, environ={})
        manager.update_config({'seed': 4})
        path = manager.save_config(self.temp_dir / "saved.json")
        self.assertEqual(json.loads(path.read_text(encoding='utf-8')), {'seed': 4})
        self.assertEqual(manager.get_logging_settings()['log_level'], 'INFO')

    def test_error_handler_classification(self):
        """エラーの分類と終了コード"""
        cases = [
            (ConfigurationError("x"), ErrorType.CONFIGURATION, ExitCode.CONFIG_ERROR),
            (ZeroReferenceError("x"), ErrorType.NUMERICAL, ExitCode.NUMERICAL_FAILURE),
            (DomainError("x"), ErrorType.VALIDATION, ExitCode.NUMERICAL_FAILURE),
            (FileProcessingError("x"), ErrorType.FILE_SYSTEM, ExitCode.UNEXPECTED),
            (RuntimeError("x"), ErrorType.UNKNOWN, ExitCode.UNEXPECTED),
        ]
        for error, error_type, exit_code in cases:
            self.assertIs(self.error_handler.classify_error(error), error_type)
            self.assertEqual(self.error_handler.exit_code_for(error), exit_code)

    def test_error_summary(self):
        self.error_handler.log_and_continue(ValueError("first"), "test")
        self.error_handler.log_error_with_context(ValueError("second"), {'alpha': 45})
        with self.assertRaises(KeyError):
            self.error_handler.log_and_raise(KeyError("third"), "test")
        summary = self.error_handler.create_error_summary()
        self.assertEqual(summary['total_errors'], 3)
        self.assertEqual(summary['error_types'], {'ValueError': 2, 'KeyError': 1})
        self.assertEqual(summary['first_error'], 'first')

    def test_configuration_error_message(self):
        error = ConfigurationError("範囲外", field="flux", line=7)
        self.assertEqual(str(error), "範囲外 (field=flux, line=7)")

    def test_structured_log_file(self):
        """JSON Lines ログにコンテキストが含まれる"""
        log_file = self.temp_dir / "logs" / "run.jsonl"
        logger = UnifiedLogger("test_json_logger", level="INFO", log_file=log_file, use_json=True)
        logger.info("弱値を出力しました", alpha_deg=45.0, observable="PR")
        logger.log_error_with_context(ValueError("失敗"), {'command': 'tomography'})
        for handler in logger.logger.handlers:
            handler.flush()

        entries = [json.loads(line) for line in log_file.read_text(encoding='utf-8').splitlines()]
        self.assertEqual(entries[0]['message'], "弱値を出力しました")
        self.assertEqual(entries[0]['alpha_deg'], 45.0)
        self.assertEqual(entries[0]['observable'], "PR")
        self.assertEqual(entries[1]['level'], 'ERROR')
        self.assertEqual(entries[1]['error_type'], 'ValueError')
        for handler in list(logger.logger.handlers):
            handler.close()

    def test_sweep_progress_log(self):
        log_file = self.temp_dir / "progress.log"
        logger = UnifiedLogger("test_progress_logger", level="INFO", log_file=log_file)
        logger.log_sweep_progress(2, 4, "α=45° を処理中")
        for handler in list(logger.logger.handlers):
            handler.flush()
            handler.close()
        self.assertIn("掃引進捗: 2/4 (50.0%) - α=45° を処理中", log_file.read_text(encoding='utf-8'))

    def test_performance_optimizer_keeps_input_order(self):
        optimizer = PerformanceOptimizer(max_workers=4)

        def slow_square(value):
            # 後の要素ほど早く終わる
            time.sleep(0.002 * (10 - value))
            return value * value, threading.current_thread().name

        results = optimizer.parallel_map(slow_square, range(10))
        self.assertEqual([value for value, _ in results], [value * value for value in range(10)])
        self.assertEqual(optimizer.parallel_map(slow_square, []), [])

    def test_performance_measurement(self):
        optimizer = PerformanceOptimizer()

        @optimizer.measure_performance
        def work():
            return 42

        self.assertEqual(work(), 42)
        self.assertIn('work_time', optimizer.metrics)
        self.assertGreaterEqual(optimizer.metrics['work_time'], 0.0)

    def test_run_summary(self):
        start = datetime(2024, 1, 1, 12, 0, 0)
        summary = RunSummary(command='weak-values', processing_start=start,
                             processing_end=start + timedelta(seconds=2.5))
        summary.add_artifact(OutputArtifact(Path("out/weak_values.csv"), 'weak_values', 57))
        summary.add_artifact(OutputArtifact(Path("out/ite_curve_PR_alpha45.csv"), 'ite_curve', 5,
                                            {'observable': 'PR'}))
        self.assertTrue(summary.success)
        self.assertEqual(summary.total_rows, 62)
        self.assertEqual(summary.processing_duration, 2.5)

        data = summary.to_dict()
        self.assertEqual(data['artifacts'][1]['file_name'], "ite_curve_PR_alpha45.csv")
        self.assertEqual(data['artifacts'][1]['observable'], 'PR')

        summary.add_error("失敗")
        self.assertFalse(summary.success)


if __name__ == '__main__':
    unittest.main()
