"""
メインコントローラーモジュール

3つのサブコマンド（weak-values, ite-curve, tomography）の処理フローを統合管理する。
出力ファイルには時刻などの実行環境依存の値を含めず、同じ設定とシードから
同じバイト列が得られるようにする。
"""
import math
from datetime import datetime
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from common.data_models import OutputArtifact, RunSummary
from common.error_handling import ErrorHandler
from common.file_handlers import CSVHandler
from common.logging import UnifiedLogger
from common.utils import PerformanceOptimizer
from .config import RunConfig
from .constants import AppConstants, BasisConstants, CsvConstants, NumericConstants
from .duality import ABSTRACT_LABELS, DualityParams, closed_form_weak_values, exact_weak_values
from .fit import weak_value_estimate
from .messages import MessageTemplates
from .optics import output_amplitudes
from .shots import (
    derived_seed,
    estimate_weak_value,
    fit_records,
    point_errors,
    records_to_frame,
    run_trial,
)
from .tomography import TomographyRun, run_tomography, tomography_target

# derived_seed の用途キー
SEED_TRIAL, SEED_BOOTSTRAP, SEED_POINT_ERRORS, SEED_TOMOGRAPHY = range(4)


def _alpha_key(alpha_deg: float) -> int:
    """シード導出用に α をマイクロ度の整数へ"""
    return int(round(alpha_deg * 1e6))


def _observable_index(key: str) -> int:
    return BasisConstants.OBSERVABLE_KEYS.index(key)


class CheshireController:
    """メインコントローラークラス"""

    def __init__(self, config: RunConfig, unified_logger: Optional[UnifiedLogger] = None):
        """
        初期化

        Args:
            config: 検証済みの実行設定
            unified_logger: 使用するロガー（省略時は config のログ設定から作成）
        """
        self.config = config

        # ロガーと共通コンポーネントの準備
        self.unified_logger = unified_logger or UnifiedLogger(
            level=config.log_level, log_file=config.log_file, use_json=config.use_json_logs)
        self.logger = self.unified_logger.logger
        self.error_handler = ErrorHandler(self.logger)
        self.csv_handler = CSVHandler(self.logger, self.error_handler)
        self.optimizer = PerformanceOptimizer(self.logger, config.max_workers, config.progress)

    @property
    def alphas(self) -> Tuple[float, ...]:
        """重複を除き昇順に並べた α（出力順は完了順によらずこの順）"""
        return tuple(sorted(set(self.config.alpha_deg)))

    def run(self, command: str) -> RunSummary:
        """
        サブコマンドを実行し、サマリーをログに出す

        Args:
            command: weak-values, ite-curve, tomography のいずれか

        Returns:
            RunSummary: 出力ファイルと処理時間のサマリー
        """
        handlers: Dict[str, Callable[[RunSummary], None]] = {
            AppConstants.COMMAND_WEAK_VALUES: self.cmd_weak_values,
            AppConstants.COMMAND_ITE_CURVE: self.cmd_ite_curve,
            AppConstants.COMMAND_TOMOGRAPHY: self.cmd_tomography,
        }
        if command not in handlers:
            raise ValueError(f"未知のコマンド: {command}")

        summary = RunSummary(command=command, processing_start=datetime.now())
        self.unified_logger.info(
            MessageTemplates.format("run", "run_start", app=AppConstants.APP_NAME, command=command,
                                    mode=self.config.mode),
            command=command, seed=self.config.seed)
        self.unified_logger.log_configuration_info(self.config.to_dict())

        # コマンドの実行
        timed = self.optimizer.measure_performance(handlers[command])
        try:
            timed(summary)
        except Exception as e:
            summary.add_error(str(e))
            self.error_handler.log_error_with_context(e, {'command': command, 'mode': self.config.mode})
            raise
        finally:
            summary.processing_end = datetime.now()
            self.unified_logger.log_run_summary(command, len(summary.artifacts), summary.total_rows,
                                                len(summary.errors), summary.processing_duration or 0.0)
            self.unified_logger.log_performance_metrics(self.optimizer.metrics)

        self.unified_logger.info(MessageTemplates.format("run", "run_complete", command=command,
                                                         files=len(summary.artifacts)))
        return summary

    # ---- weak-values -------------------------------------------------

    def fitted_weak_values(self, params: DualityParams, alpha_deg: float) -> Dict[str, Tuple[float, float]]:
        """光学回路のカウントからフィットした弱値と誤差（観測量キー → (w_hat, w_err)）"""
        config = self.config
        results: Dict[str, Tuple[float, float]] = {}
        for key in config.observables:
            index = _observable_index(key)
            records = run_trial(params, key, config.schedule, config.flux,
                                derived_seed(config.seed, _alpha_key(alpha_deg), index, SEED_TRIAL),
                                noiseless=config.exact)
            estimate = estimate_weak_value(
                records, noiseless=config.exact, resamples=config.resamples,
                seed=derived_seed(config.seed, _alpha_key(alpha_deg), index, SEED_BOOTSTRAP),
                weighted=config.weighted_fit)
            results[key] = (estimate.weak_value, estimate.stderr)
            self.unified_logger.debug(
                MessageTemplates.format("sweep", "weak_value_fitted", alpha=alpha_deg, observable=key,
                                        value=estimate.weak_value, error=estimate.stderr),
                alpha_deg=alpha_deg, observable=key)
        return results

    def _weak_value_rows(self, alpha_deg: float) -> List[Dict[str, Any]]:
        alphas = self.alphas
        self.unified_logger.log_sweep_progress(
            alphas.index(alpha_deg) + 1, len(alphas),
            MessageTemplates.format("sweep", "sweep_point", alpha=alpha_deg))
        params = self.config.params(alpha_deg)
        blank_errors = {f"stderr_{key}": math.nan for key in BasisConstants.OBSERVABLE_KEYS}

        def row(source: str, values: Dict[str, float], errors: Dict[str, float]) -> Dict[str, Any]:
            self.unified_logger.log_weak_values(alpha_deg, source, values)
            data = {'alpha_deg': alpha_deg, 'source': source}
            data.update({f"w{key}": value for key, value in values.items()})
            data.update(errors)
            return data

        rows = [row(CsvConstants.SOURCE_CLOSED_FORM, closed_form_weak_values(params.alpha).as_dict(), blank_errors)]
        if self.config.exact:
            rows.append(row(CsvConstants.SOURCE_EXACT, exact_weak_values(params).real().as_dict(), blank_errors))

        fitted = self.fitted_weak_values(params, alpha_deg)
        values = {key: fitted[key][0] if key in fitted else math.nan for key in BasisConstants.OBSERVABLE_KEYS}
        errors = {f"stderr_{key}": fitted[key][1] if key in fitted else math.nan
                  for key in BasisConstants.OBSERVABLE_KEYS}
        rows.append(row(CsvConstants.SOURCE_FITTED, values, errors))
        return rows

    def weak_value_table(self) -> pd.DataFrame:
        """α ごとの弱値表（closed_form, exact, fitted の各行）"""
        alphas = self.alphas
        self.unified_logger.info(MessageTemplates.format("sweep", "sweep_start", count=len(alphas),
                                                         first=alphas[0], last=alphas[-1]))
        per_alpha = self.optimizer.parallel_map(self._weak_value_rows, alphas, desc="α sweep")
        rows = [row for rows in per_alpha for row in rows]
        return pd.DataFrame(rows, columns=CsvConstants.WEAK_VALUE_COLUMNS)

    def cmd_weak_values(self, summary: RunSummary) -> None:
        df = self.weak_value_table()
        path = self.csv_handler.write_csv(df, self.config.output_dir / AppConstants.WEAK_VALUES_FILE)
        summary.add_artifact(OutputArtifact(path, 'weak_values', len(df)))

    # ---- ite-curve ---------------------------------------------------

    def ite_curve(self, alpha_deg: float, key: str) -> Tuple[pd.DataFrame, Dict[str, float], Optional[pd.DataFrame]]:
        """1つの (α, 観測量) の ITE 曲線、フッター、（shots モードでは）生カウント"""
        config = self.config
        params = config.params(alpha_deg)
        index = _observable_index(key)
        records = run_trial(params, key, config.schedule, config.flux,
                            derived_seed(config.seed, _alpha_key(alpha_deg), index, SEED_TRIAL),
                            noiseless=config.exact)
        records = sorted(records, key=lambda record: record.t)

        if config.exact:
            fit = fit_records(records, config.weighted_fit)
            weak_value, stderr = weak_value_estimate(fit)
            errors = np.zeros(len(records))
            counts = None
        else:
            estimate = estimate_weak_value(
                records, resamples=config.resamples,
                seed=derived_seed(config.seed, _alpha_key(alpha_deg), index, SEED_BOOTSTRAP),
                weighted=config.weighted_fit)
            fit, weak_value, stderr = estimate.fit, estimate.weak_value, estimate.stderr
            errors = point_errors(records, config.resamples,
                                  derived_seed(config.seed, _alpha_key(alpha_deg), index, SEED_POINT_ERRORS))
            counts = records_to_frame(records)

        df = pd.DataFrame({
            'T': [record.transmission for record in records],
            't': [record.t for record in records],
            'N': [record.N_hat for record in records],
            'N_err': errors,
        }, columns=CsvConstants.ITE_CURVE_COLUMNS)
        footer = {'slope': fit.slope, 'weak_value': weak_value, 'stderr': stderr}
        return df, footer, counts

    def _write_ite_curve(self, item: Tuple[float, str]) -> List[OutputArtifact]:
        alpha_deg, key = item
        df, footer, counts = self.ite_curve(alpha_deg, key)
        artifacts = []
        name = AppConstants.ITE_CURVE_FILE_FORMAT.format(observable=key, alpha=alpha_deg)
        path = self.csv_handler.write_csv(df, self.config.output_dir / name, footer)
        artifacts.append(OutputArtifact(path, 'ite_curve', len(df), {'alpha_deg': alpha_deg, 'observable': key,
                                                                   'weak_value': footer['weak_value']}))
        if counts is not None:
            name = AppConstants.COUNTS_FILE_FORMAT.format(observable=key, alpha=alpha_deg)
            path = self.csv_handler.write_csv(counts, self.config.output_dir / name)
            artifacts.append(OutputArtifact(path, 'counts', len(counts), {'alpha_deg': alpha_deg, 'observable': key}))
        self.unified_logger.info(
            MessageTemplates.format("sweep", "curve_written", observable=key, alpha=alpha_deg,
                                    value=footer['weak_value']),
            alpha_deg=alpha_deg, observable=key)
        return artifacts

    def cmd_ite_curve(self, summary: RunSummary) -> None:
        alphas = self.alphas
        if len(alphas) > 1:
            self.unified_logger.info(MessageTemplates.format("sweep", "multiple_alpha", count=len(alphas)))
        items = [(alpha, key) for alpha in alphas for key in self.config.observables]
        for artifacts in self.optimizer.parallel_map(self._write_ite_curve, items, desc="ITE curves"):
            for artifact in artifacts:
                summary.add_artifact(artifact)

    # ---- tomography --------------------------------------------------

    def _tomography_for(self, alpha_deg: float) -> TomographyRun:
        config = self.config
        params = config.params(alpha_deg)
        # 測定するのは光学回路の検出モードから読み出した状態、比較するのは理想状態
        prepared = output_amplitudes(params).normalized()
        run = run_tomography(params, config.flux, config.noise_p,
                             derived_seed(config.seed, _alpha_key(alpha_deg), 0, SEED_TOMOGRAPHY),
                             config.tomography_repeats, exact=config.exact, prepared=prepared)
        self.unified_logger.info(
            MessageTemplates.format("tomography", "fidelity", alpha=alpha_deg, mean=run.mean_fidelity,
                                    std=run.std_fidelity),
            alpha_deg=alpha_deg)
        if run.min_eigenvalue < NumericConstants.DENSITY_EIGEN_FLOOR:
            self.unified_logger.warning(
                MessageTemplates.format("tomography", "negative_eigenvalue", alpha=alpha_deg,
                                        value=run.min_eigenvalue),
                alpha_deg=alpha_deg)
        return run

    def tomography_report(self) -> Dict[str, Any]:
        """α ごとと全体の忠実度、再構成した密度行列、固有値の診断"""
        config = self.config
        alphas = self.alphas
        repeats = 1 if config.exact else config.tomography_repeats
        self.unified_logger.info(MessageTemplates.format("tomography", "tomography_start", count=len(alphas),
                                                         repeats=repeats))
        runs = self.optimizer.parallel_map(self._tomography_for, alphas, desc="tomography")

        entries = []
        for run in runs:
            target = tomography_target(config.params(run.alpha_deg))
            entries.append({
                'alpha_deg': run.alpha_deg,
                'mean_fidelity': run.mean_fidelity,
                'std_fidelity': run.std_fidelity,
                'fidelities': list(run.fidelities),
                'raw_fidelities': list(run.raw_fidelities),
                'min_eigenvalue_over_repeats': run.min_eigenvalue,
                'rho': run.reconstructed.to_json_dict(),
                'diagnostics': run.reconstructed.diagnostics(),
                'target': [[float(value.real), float(value.imag)] for value in target.amplitudes],
            })

        everything = [value for run in runs for value in run.fidelities]
        overall_std = float(np.std(everything, ddof=1)) if len(everything) > 1 else 0.0
        return {
            'mode': config.mode,
            'flux': config.flux,
            'noise_p': config.noise_p,
            'repeats': repeats,
            'seed': config.seed,
            'basis_order': list(ABSTRACT_LABELS),
            'alphas': entries,
            'overall': {
                'count': len(everything),
                'mean_fidelity': float(np.mean(everything)),
                'std_fidelity': overall_std,
            },
        }

    def cmd_tomography(self, summary: RunSummary) -> None:
        report = self.tomography_report()
        path = self.csv_handler.write_json(report, self.config.output_dir / AppConstants.TOMOGRAPHY_FILE)
        summary.add_artifact(OutputArtifact(path, 'tomography', len(report['alphas']),
                                            {'mean_fidelity': report['overall']['mean_fidelity']}))
