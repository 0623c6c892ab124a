"""
標準化されたデータモデル
"""
from dataclasses import dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, List, Optional


@dataclass
class OutputArtifact:
    """出力ファイルのメタデータ"""
    file_path: Path
    kind: str
    row_count: int = 0
    metadata: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        """辞書形式で出力"""
        return {
            'file_path': str(self.file_path),
            'file_name': Path(self.file_path).name,
            'kind': self.kind,
            'row_count': self.row_count,
            **self.metadata,
        }


@dataclass
class RunSummary:
    """コマンド実行サマリー"""
    command: str
    artifacts: List[OutputArtifact] = field(default_factory=list)
    errors: List[str] = field(default_factory=list)
    processing_start: Optional[datetime] = None
    processing_end: Optional[datetime] = None

    @property
    def success(self) -> bool:
        return not self.errors

    @property
    def total_rows(self) -> int:
        return sum(artifact.row_count for artifact in self.artifacts)

    @property
    def processing_duration(self) -> Optional[float]:
        """処理時間を計算（秒）"""
        if self.processing_start and self.processing_end:
            return (self.processing_end - self.processing_start).total_seconds()
        return None

    def add_artifact(self, artifact: OutputArtifact) -> None:
        self.artifacts.append(artifact)

    def add_error(self, error: str) -> None:
        self.errors.append(error)

    def to_dict(self) -> Dict[str, Any]:
        """辞書形式で出力"""
        return {
            'command': self.command,
            'success': self.success,
            'artifacts': [artifact.to_dict() for artifact in self.artifacts],
            'total_rows': self.total_rows,
            'errors': list(self.errors),
            'processing_duration': self.processing_duration,
        }
