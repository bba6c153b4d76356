"""配置单元测试"""

import pytest
from pydantic import ValidationError

from totient_pell.config import Config, load_config
from totient_pell.domain.errors import ConfigurationError


def test_defaults():
    """测试默认配置"""
    config = load_config()
    assert config.alpha_max == 30
    assert config.beta_max == 30
    assert config.pell_step_cap == 10**7
    assert config.output_format == "text"
    assert config.output_path is None
    assert config.parallelism == 1
    assert config.scan_only is False


def test_none_means_default():
    """测试 None 取默认值"""
    assert load_config(alpha_max=None).alpha_max == 30


def test_parallelism_values():
    """测试并行度可为正整数或 auto"""
    assert load_config(parallelism="auto").parallelism == "auto"
    assert load_config(parallelism=4).parallelism == 4
    with pytest.raises(ConfigurationError):
        load_config(parallelism=0)


@pytest.mark.parametrize(
    "overrides",
    [
        {"alpha_max": -1},
        {"pell_step_cap": 0},
        {"output_format": "xml"},
        {"unknown_option": 1},
    ],
)
def test_invalid_values(overrides):
    """测试非法取值转换为 ConfigurationError"""
    with pytest.raises(ConfigurationError):
        load_config(**overrides)


def test_environment_is_ignored(monkeypatch):
    """测试不读取环境变量"""
    monkeypatch.setenv("ALPHA_MAX", "5")
    assert load_config().alpha_max == 30


def test_config_is_frozen():
    """测试配置不可修改"""
    config = Config()
    with pytest.raises(ValidationError):
        config.alpha_max = 3  # type: ignore


def test_report_settings():
    """测试写入报告的配置项"""
    config = load_config(alpha_max=4, beta_max=2, scan_only=True, log_level="DEBUG")
    assert config.report_settings() == {
        "alpha_max": 4,
        "beta_max": 2,
        "pell_step_cap": 10**7,
        "scan_only": True,
    }
