"""
Pytest 配置和共享 Fixtures

提供测试所需的共享 fixtures：应用、测试客户端、常用图与宽松常数配置
"""

import pytest
from contextlib import asynccontextmanager
from fastapi.testclient import TestClient

from app.config import settings
from app.exceptions import register_exception_handlers
from app.internal.graph_core import Graph
from app.internal.packing_engine import PackingConfig
from app.main import create_app


# ============ 全局设置 ============


@pytest.fixture(autouse=True)
def no_log_files(monkeypatch):
    """测试中不写日志文件"""
    monkeypatch.setattr(settings, "LOG_TO_FILE", False)
    yield


# ============ 应用 Fixtures ============


@pytest.fixture
def app():
    """
    创建 FastAPI 测试应用实例

    跳过 lifespan 事件但保留异常处理器
    """
    # 创建空 lifespan 来跳过初始化
    @asynccontextmanager
    async def empty_lifespan(app):
        yield

    app_instance = create_app()
    app_instance.router.lifespan_context = empty_lifespan
    register_exception_handlers(app_instance)

    yield app_instance


@pytest.fixture
def client(app) -> TestClient:
    """
    创建测试客户端

    提供用于 HTTP 请求测试的 TestClient 实例
    """
    with TestClient(app) as test_client:
        yield test_client


# ============ 填装配置 Fixtures ============


@pytest.fixture
def small_config() -> PackingConfig:
    """
    小规模实例可用的配置

    默认 maxdeg_divisor = 200 要求 n >= 160000 才允许 Δ(H) = 2；
    1.5 让 n = 12 的圈也满足前提 (√12 / 1.5 ≈ 2.31)
    """
    return PackingConfig.from_settings(maxdeg_divisor=1.5, seed=7)


@pytest.fixture
def medium_config() -> PackingConfig:
    """n 为数百时使用的配置"""
    return PackingConfig.from_settings(maxdeg_divisor=10, seed=11)


# ============ 图 Fixtures ============


@pytest.fixture
def c12() -> Graph:
    return Graph.cycle(12)


@pytest.fixture
def empty12() -> Graph:
    return Graph.empty(12)


@pytest.fixture
def path4() -> Graph:
    return Graph.path(4)


@pytest.fixture
def triangle() -> Graph:
    return Graph.complete(3)
