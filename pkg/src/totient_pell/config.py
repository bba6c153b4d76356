"""配置管理 - 全部取值来自命令行参数，不读环境变量与 .env"""

from pathlib import Path
from typing import Any, Literal

from pydantic import Field, ValidationError, field_validator
from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict

from totient_pell.domain.errors import ConfigurationError


class Config(BaseSettings):
    """运行配置（类型安全）"""

    model_config = SettingsConfigDict(extra="forbid", frozen=True)

    # 穷举扫描范围
    alpha_max: int = Field(default=30, ge=0, description="扫描 2 的指数上界")
    beta_max: int = Field(default=30, ge=0, description="扫描 5 的指数上界")

    # Pell 判定
    pell_step_cap: int = Field(default=10**7, gt=0, description="每个起点的轨道步数上限")

    # 输出
    output_format: Literal["text", "json"] = Field(default="text", description="输出格式")
    output_path: Path | None = Field(default=None, description="报告写入路径")

    # 执行
    parallelism: int | Literal["auto"] = Field(default=1, description="搜索与 Pell 阶段的进程数")
    scan_only: bool = Field(default=False, description="只做穷举扫描")

    log_level: str = Field(default="WARNING", description="日志级别")

    @field_validator("parallelism")
    @classmethod
    def _positive_parallelism(cls, value: int | str) -> int | str:
        if value != "auto" and int(value) < 1:
            raise ValueError("parallelism must be a positive integer or 'auto'")
        return value

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> tuple[PydanticBaseSettingsSource, ...]:
        return (init_settings,)

    def report_settings(self) -> dict[str, int | bool]:
        """写入报告的配置（不含输出位置与日志级别）"""
        return {
            "alpha_max": self.alpha_max,
            "beta_max": self.beta_max,
            "pell_step_cap": self.pell_step_cap,
            "scan_only": self.scan_only,
        }


def load_config(**overrides: Any) -> Config:
    """
    加载配置并进行启动时校验

    Args:
        **overrides: 命令行给出的取值，None 表示使用默认值

    Returns:
        Config: 配置对象

    Raises:
        ConfigurationError: 取值不合法
    """
    values = {key: value for key, value in overrides.items() if value is not None}
    try:
        return Config(**values)
    except ValidationError as e:
        raise ConfigurationError(f"Invalid configuration: {e}") from e
