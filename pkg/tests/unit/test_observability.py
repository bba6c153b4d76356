"""日志、阶段追踪、run_id 与并行执行器单元测试"""

import logging

import pytest

from totient_pell.adapters.executor import ParallelExecutor, resolve_workers
from totient_pell.adapters.observability.context import (
    clear_run_id,
    get_run_id,
    new_run_id,
    run_scope,
    set_run_id,
)
from totient_pell.adapters.observability.tracing import stage
from totient_pell.logging import StructuredFormatter, configure_logging


def _square(x: int) -> int:
    return x * x


def test_run_id_lifecycle():
    """测试 run_id 的生成、设置与清除"""
    run_id = new_run_id()
    assert run_id.startswith("run_")
    assert len(run_id) == len("run_") + 16
    assert get_run_id() == run_id
    set_run_id("run_fixed")
    assert get_run_id() == "run_fixed"
    clear_run_id()
    assert get_run_id() is None


def test_run_scope_restores_previous():
    """测试 run_scope 退出后恢复原来的 run_id"""
    set_run_id("run_outer")
    with run_scope() as run_id:
        assert run_id.startswith("run_")
        assert get_run_id() == run_id
        with run_scope("run_inner"):
            assert get_run_id() == "run_inner"
        assert get_run_id() == run_id
    assert get_run_id() == "run_outer"
    clear_run_id()


def test_structured_formatter_appends_fields():
    """测试结构化字段追加在行尾"""
    formatter = StructuredFormatter(fmt="%(message)s")
    record = logging.LogRecord("x", logging.INFO, __file__, 1, "decided", None, None)
    record.c = 497
    record.branch = "Y=21 mod 71"
    assert formatter.format(record) == "decided | c=497 branch=Y=21 mod 71"


def test_structured_formatter_without_fields():
    """测试没有结构化字段时格式不变"""
    formatter = StructuredFormatter(fmt="%(message)s")
    record = logging.LogRecord("x", logging.INFO, __file__, 1, "plain", None, None)
    assert formatter.format(record) == "plain"


def test_configure_logging_single_handler():
    """测试重复配置不会叠加 handler"""
    configure_logging("DEBUG")
    configure_logging("INFO")
    root = logging.getLogger()
    assert len(root.handlers) == 1
    assert root.level == logging.INFO
    configure_logging("WARNING")


def test_stage_logs_outcome(caplog):
    """测试阶段结束时记录耗时与结果字段"""
    set_run_id("run_stage")
    with caplog.at_level(logging.INFO, logger="totient_pell.adapters.observability.tracing"):
        with stage("scan") as out:
            out["solutions"] = [1, 2, 5, 8]
    record = caplog.records[-1]
    assert "Stage scan finished" in record.getMessage()
    assert "solutions=[1, 2, 5, 8]" in record.getMessage()
    assert record.stage == "scan"
    assert record.run_id == "run_stage"
    clear_run_id()


def test_stage_reraises(caplog):
    """测试阶段内异常被记录后原样抛出"""
    with caplog.at_level(logging.ERROR, logger="totient_pell.adapters.observability.tracing"):
        with pytest.raises(ArithmeticError):
            with stage("pell", c=17):
                raise ArithmeticError("boom")
    assert caplog.records[-1].c == 17


def test_resolve_workers():
    """测试并行度解析"""
    assert resolve_workers(3) == 3
    assert resolve_workers("auto") >= 1
    with pytest.raises(ValueError):
        resolve_workers(0)


def test_executor_sequential_and_pool():
    """测试顺序与进程池两种模式结果一致且保持顺序"""
    items = list(range(20))
    sequential = ParallelExecutor(1)
    pooled = ParallelExecutor(2)
    try:
        assert sequential.map(_square, items) == [x * x for x in items]
        assert pooled.map(_square, items) == [x * x for x in items]
    finally:
        pooled.shutdown()
        sequential.shutdown()
    with pytest.raises(ValueError):
        ParallelExecutor(0)
