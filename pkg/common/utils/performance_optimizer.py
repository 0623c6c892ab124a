"""
パフォーマンス最適化ユーティリティ
"""
import functools
import time
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Sequence

from tqdm import tqdm


class PerformanceOptimizer:
    """パフォーマンス最適化のユーティリティクラス"""

    def __init__(self, logger=None, max_workers: int = 1, show_progress: bool = False):
        self.logger = logger
        self.max_workers = max(1, int(max_workers))
        self.show_progress = show_progress
        self.metrics: Dict[str, float] = {}

    def measure_performance(self, func: Callable) -> Callable:
        """関数の実行時間を測定するデコレータ"""
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            start_time = time.perf_counter()
            try:
                return func(*args, **kwargs)
            finally:
                duration = time.perf_counter() - start_time
                self.metrics[f"{func.__name__}_time"] = duration
                if self.logger:
                    self.logger.debug(f"Performance: {func.__name__} took {duration:.3f}秒")
        return wrapper

    def parallel_map(self, func: Callable[[Any], Any], items: Sequence[Any],
                     desc: Optional[str] = None) -> List[Any]:
        """itemsを並列処理し、入力順で結果を返す"""
        items = list(items)
        if not items:
            return []

        progress = tqdm(total=len(items), desc=desc, disable=not self.show_progress, leave=False)
        try:
            if self.max_workers == 1 or len(items) == 1:
                results = []
                for item in items:
                    results.append(func(item))
                    progress.update(1)
                return results

            if self.logger:
                self.logger.debug(f"並列処理開始: {len(items)}件, 最大{self.max_workers}スレッド")

            with ThreadPoolExecutor(max_workers=self.max_workers) as executor:
                futures = [executor.submit(func, item) for item in items]
                for future in futures:
                    future.add_done_callback(lambda _: progress.update(1))
                # 完了順ではなく投入順で回収する
                return [future.result() for future in futures]
        finally:
            progress.close()
