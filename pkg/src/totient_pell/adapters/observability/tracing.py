"""阶段追踪 - 记录证明流水线各阶段的开始、结束与耗时"""

import logging
import time
from collections.abc import Iterator
from contextlib import contextmanager
from typing import Any

from totient_pell.adapters.observability.context import get_run_id

logger = logging.getLogger(__name__)


@contextmanager
def stage(name: str, **fields: Any) -> Iterator[dict[str, Any]]:
    """
    包裹一个流水线阶段

    结束时以 INFO 记录耗时；阶段内抛出的异常以 ERROR 记录后原样抛出。

    Args:
        name: 阶段名称
        **fields: 附加的结构化字段（如 c、branch）

    Yields:
        dict: 可在阶段内写入的结果字段，结束日志会带上它们
    """
    extra = {"run_id": get_run_id(), "stage": name, **fields}
    outcome: dict[str, Any] = {}
    logger.debug(f"Stage {name} started", extra=extra)
    started = time.perf_counter()
    try:
        yield outcome
    except Exception as e:
        logger.error(f"Stage {name} failed: {e}", extra=extra)
        raise
    elapsed = time.perf_counter() - started
    summary = " ".join(f"{key}={value}" for key, value in outcome.items())
    logger.info(f"Stage {name} finished in {elapsed:.3f}s {summary}".rstrip(), extra=extra)
