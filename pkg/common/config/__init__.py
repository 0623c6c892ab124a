"""
設定管理パッケージ（デフォルト → JSONファイル → 環境変数 → コマンドライン）
"""

from .config_manager import ConfigManager

__all__ = ['ConfigManager']
