"""
統一例外クラス定義
"""
from typing import Optional


class CheshireSimulationError(Exception):
    """シミュレーションシステムの基本例外クラス"""
    pass


class ConfigurationError(CheshireSimulationError):
    """設定関連のエラー"""

    def __init__(self, message: str, field: Optional[str] = None, line: Optional[int] = None):
        self.field = field
        self.line = line
        location = []
        if field:
            location.append(f"field={field}")
        if line is not None:
            location.append(f"line={line}")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)


class FileProcessingError(CheshireSimulationError):
    """ファイル処理関連のエラー"""
    pass


class DataValidationError(CheshireSimulationError):
    """入力データ検証関連のエラー"""
    pass


class DimensionMismatchError(DataValidationError):
    """状態・演算子の次元不一致"""
    pass


class DomainError(DataValidationError, ValueError):
    """引数が定義域外"""
    pass


class NotProjectorError(DataValidationError):
    """射影演算子でない入力"""
    pass


class MissingSettingError(DataValidationError):
    """トモグラフィ測定設定の欠落"""
    pass


class InvalidTargetError(DataValidationError):
    """NDフィルタの挿入先が不正"""
    pass


class NumericalError(CheshireSimulationError):
    """数値計算の失敗"""
    pass


class OrthogonalSelectionError(NumericalError):
    """事前選択状態と事後選択状態が直交している"""
    pass


class ZeroReferenceError(NumericalError):
    """参照カウントが0（光子フラックス不足）"""
    pass


class DegenerateAbscissaError(NumericalError):
    """すべてのx値が同一で直線が決まらない"""
    pass


class TooFewPointsError(NumericalError):
    """フィットに必要な点数が不足"""
    pass


class SubspaceLeakageError(NumericalError):
    """符号化部分空間の外に振幅が漏れている"""
    pass
