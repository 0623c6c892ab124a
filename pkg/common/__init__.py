"""
共通コンポーネントパッケージ
"""

from .file_handlers.csv_handler import CSVHandler
from .error_handling.exceptions import (
    CheshireSimulationError,
    ConfigurationError,
    FileProcessingError,
    DataValidationError,
    NumericalError,
)
from .error_handling.error_handler import ErrorHandler, ErrorType, ExitCode
from .logging.unified_logger import UnifiedLogger
from .config.config_manager import ConfigManager
from .utils.performance_optimizer import PerformanceOptimizer
from .data_models import OutputArtifact, RunSummary

__all__ = [
    'CSVHandler',
    'CheshireSimulationError',
    'ConfigurationError',
    'FileProcessingError',
    'DataValidationError',
    'NumericalError',
    'ErrorHandler',
    'ErrorType',
    'ExitCode',
    'UnifiedLogger',
    'ConfigManager',
    'PerformanceOptimizer',
    'OutputArtifact',
    'RunSummary',
]
