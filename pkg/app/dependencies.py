"""
公共依赖项模块

包含配置与填装常数的 FastAPI 依赖注入函数
"""

from typing import Dict, Optional

from app.config import Settings, settings
from app.internal.packing_engine import PackingConfig


def get_settings() -> Settings:
    """
    全局配置依赖

    测试中可通过 app.dependency_overrides[get_settings] 替换穷举上限等配置
    """
    return settings


def build_packing_config(
    overrides: Optional[Dict[str, float]] = None,
    seed: Optional[int] = None,
    retries: Optional[int] = None,
) -> PackingConfig:
    """
    由请求参数构造填装配置

    Args:
        overrides: PackingConfig 字段名 -> 值
        seed: 主种子
        retries: 储备集最多抽样次数

    Raises:
        ParameterOutOfRangeError: 字段未知或越界
    """
    values = dict(overrides or {})
    values["seed"] = seed
    values["max_resamples"] = retries
    return PackingConfig.from_settings(**values)
