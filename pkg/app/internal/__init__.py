"""
内部模块

包含图结构、填装引擎、穷举求解、构造、超图与实验
"""

from app.internal.graph_core import Graph, VertexSet
from app.internal.packing_engine import PackingConfig, pack, verify_packing

__all__ = [
    "Graph",
    "VertexSet",
    "PackingConfig",
    "pack",
    "verify_packing",
]
