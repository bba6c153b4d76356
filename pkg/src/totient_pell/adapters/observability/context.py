"""上下文管理 - run_id 生成与传递"""

import uuid
from collections.abc import Iterator
from contextlib import contextmanager
from contextvars import ContextVar

# 使用 contextvars 存储 run_id（线程安全）
_run_id_var: ContextVar[str | None] = ContextVar("run_id", default=None)


def new_run_id() -> str:
    """
    生成新的 run_id 并设为当前上下文的值

    Returns:
        str: run_id（格式：run_<uuid>）
    """
    run_id = f"run_{uuid.uuid4().hex[:16]}"
    _run_id_var.set(run_id)
    return run_id


def get_run_id() -> str | None:
    """
    获取当前上下文的 run_id

    Returns:
        str | None: run_id 或 None
    """
    return _run_id_var.get()


def set_run_id(run_id: str) -> None:
    """设置当前上下文的 run_id"""
    _run_id_var.set(run_id)


def clear_run_id() -> None:
    """清除当前上下文的 run_id"""
    _run_id_var.set(None)


@contextmanager
def run_scope(run_id: str | None = None) -> Iterator[str]:
    """
    在一次验证运行期间绑定 run_id，退出时恢复原值

    Args:
        run_id: 指定的 run_id，为 None 时新生成

    Yields:
        str: 本次运行的 run_id
    """
    value = run_id or f"run_{uuid.uuid4().hex[:16]}"
    token = _run_id_var.set(value)
    try:
        yield value
    finally:
        _run_id_var.reset(token)
