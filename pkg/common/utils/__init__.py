"""
ユーティリティパッケージ
"""

from .performance_optimizer import PerformanceOptimizer

__all__ = ['PerformanceOptimizer']
