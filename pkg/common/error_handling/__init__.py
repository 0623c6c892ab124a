"""
エラーハンドリングパッケージ
"""

from .exceptions import (
    CheshireSimulationError,
    ConfigurationError,
    FileProcessingError,
    DataValidationError,
    DimensionMismatchError,
    DomainError,
    NotProjectorError,
    MissingSettingError,
    InvalidTargetError,
    NumericalError,
    OrthogonalSelectionError,
    ZeroReferenceError,
    DegenerateAbscissaError,
    TooFewPointsError,
    SubspaceLeakageError,
)
from .error_handler import ErrorHandler, ErrorType, ExitCode

__all__ = [
    'CheshireSimulationError',
    'ConfigurationError',
    'FileProcessingError',
    'DataValidationError',
    'DimensionMismatchError',
    'DomainError',
    'NotProjectorError',
    'MissingSettingError',
    'InvalidTargetError',
    'NumericalError',
    'OrthogonalSelectionError',
    'ZeroReferenceError',
    'DegenerateAbscissaError',
    'TooFewPointsError',
    'SubspaceLeakageError',
    'ErrorHandler',
    'ErrorType',
    'ExitCode',
]
