"""
メッセージテンプレートモジュール
"""

from typing import Any


class MessageTemplates:
    """メッセージテンプレート定義クラス"""

    RUN_MESSAGES = {
        "run_start": "{app} 開始: コマンド={command}, モード={mode}",
        "run_complete": "コマンド {command} 完了: {files} ファイル出力",
        "run_failed": "コマンド {command} が失敗しました: {error}",
        "config_loaded": "設定読み込み完了: {source}",
        "config_invalid": "設定エラー: {error}",
        "template_created": "設定テンプレートを作成しました: {path}",
    }

    SWEEP_MESSAGES = {
        "sweep_start": "α掃引開始: {count} 点 ({first:g}°〜{last:g}°)",
        "sweep_point": "α={alpha:g}° を処理中",
        "weak_value_fitted": "α={alpha:g}° {observable}: w_hat={value:.5f} ± {error:.5f}",
        "curve_written": "ITE曲線を出力しました: {observable} α={alpha:g}° w_hat={value:.5f}",
        "multiple_alpha": "ITE曲線はα={count}点それぞれについて出力します",
    }

    TOMOGRAPHY_MESSAGES = {
        "tomography_start": "トモグラフィ開始: α={count}点 × {repeats}回",
        "fidelity": "α={alpha:g}° 平均忠実度 {mean:.5f} ± {std:.5f}",
        "negative_eigenvalue": "α={alpha:g}° 再構成行列に負の固有値 {value:.3e}（最尤推定とは異なる可能性）",
    }

    @classmethod
    def format(cls, category: str, key: str, **kwargs: Any) -> str:
        """カテゴリとキーからメッセージを生成"""
        templates = getattr(cls, f"{category.upper()}_MESSAGES")
        return templates[key].format(**kwargs)
