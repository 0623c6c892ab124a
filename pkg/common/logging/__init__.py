"""
ロギングパッケージ
"""

from .unified_logger import UnifiedLogger, StructuredFormatter

__all__ = ['UnifiedLogger', 'StructuredFormatter']
