"""依赖注入容器 - 唯一允许组装依赖的位置"""

import logging
from dataclasses import dataclass, field

from totient_pell.adapters.executor import ParallelExecutor, resolve_workers
from totient_pell.adapters.observability.context import new_run_id
from totient_pell.config import Config
from totient_pell.services.proof_service import ProofService

logger = logging.getLogger(__name__)


@dataclass
class Container:
    """依赖容器（持有所有依赖）"""

    config: Config
    logger: logging.Logger
    executor: ParallelExecutor
    proof_service: ProofService
    _resources: list[ParallelExecutor] = field(default_factory=list)  # 需要关闭的资源


def build_container(config: Config) -> Container:
    """
    构建依赖容器

    Args:
        config: 配置对象

    Returns:
        Container: 依赖容器
    """
    workers = resolve_workers(config.parallelism)
    logger.debug(
        f"Building dependency container with {workers} workers",
        extra={"run_id": new_run_id()},
    )

    executor = ParallelExecutor(workers)
    proof_service = ProofService(config=config, executor=executor)

    return Container(
        config=config,
        logger=logger,
        executor=executor,
        proof_service=proof_service,
        _resources=[executor],
    )


def shutdown_container(container: Container) -> None:
    """
    关闭容器并释放资源

    Args:
        container: 依赖容器
    """
    for resource in container._resources:
        try:
            resource.shutdown()
        except Exception as e:
            logger.error(f"Error closing resource: {e}", exc_info=True)
    logger.debug("Container shutdown complete")
