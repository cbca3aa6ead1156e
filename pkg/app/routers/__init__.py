"""
路由模块

包含所有 API 路由
"""

from app.routers.packing import router as packing_router
from app.routers.oracle import router as oracle_router
from app.routers.constructions import router as constructions_router
from app.routers.hypergraphs import router as hypergraphs_router
from app.routers.experiments import router as experiments_router

__all__ = [
    "packing_router",
    "oracle_router",
    "constructions_router",
    "hypergraphs_router",
    "experiments_router",
]
