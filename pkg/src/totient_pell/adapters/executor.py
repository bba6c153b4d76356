"""并行执行适配器 - 搜索与 Pell 阶段按工作项分片"""

from __future__ import annotations

import logging
import os
from collections.abc import Callable, Iterable
from concurrent.futures import ProcessPoolExecutor
from typing import TypeVar

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


def resolve_workers(parallelism: int | str) -> int:
    """'auto' 取 CPU 数，其余必须是正整数"""
    if parallelism == "auto":
        return os.cpu_count() or 1
    workers = int(parallelism)
    if workers < 1:
        raise ValueError(f"parallelism must be positive, got {parallelism}")
    return workers


class ParallelExecutor:
    """
    按输入顺序返回结果的 map

    workers == 1 时在当前进程顺序执行；否则首次使用时创建 ProcessPoolExecutor，
    函数与参数必须可 pickle。
    """

    def __init__(self, workers: int = 1) -> None:
        if workers < 1:
            raise ValueError(f"workers must be positive, got {workers}")
        self.workers = workers
        self._pool: ProcessPoolExecutor | None = None

    def map(self, fn: Callable[[T], R], items: Iterable[T]) -> list[R]:
        work = list(items)
        if self.workers == 1 or len(work) <= 1:
            return [fn(item) for item in work]
        if self._pool is None:
            logger.debug(f"Starting process pool with {self.workers} workers")
            self._pool = ProcessPoolExecutor(max_workers=self.workers)
        return list(self._pool.map(fn, work))

    def shutdown(self) -> None:
        if self._pool is not None:
            self._pool.shutdown(wait=True)
            self._pool = None
            logger.debug("Process pool shut down")
