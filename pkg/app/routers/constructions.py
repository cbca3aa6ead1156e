"""
极值构造路由
"""
from typing import Optional

from fastapi import APIRouter, Depends, Path, Query

from app.config import Settings
from app.dependencies import get_settings
from app.internal.constructions import CONSTRUCTION_NAMES, build_construction
from app.internal.formats import graph_to_payload
from app.internal.graph_core import Graph
from app.schemas import ApiResponse


router = APIRouter(prefix="/constructions", tags=["constructions"])


def _payload(obj) -> dict:
    if isinstance(obj, Graph):
        return graph_to_payload(obj)
    return {"n": obj.n, "edges": [list(e) for e in obj.edges]}


@router.get("", summary="可用构造列表", response_model=ApiResponse)
async def list_constructions() -> ApiResponse:
    return ApiResponse.success(data={"names": list(CONSTRUCTION_NAMES)})


@router.get("/{name}", summary="生成极值构造及其报告", response_model=ApiResponse)
def get_construction(
    name: str = Path(..., description="构造名称"),
    n: Optional[int] = Query(None, description="顶点数"),
    delta: Optional[int] = Query(None, description="最小度 δ"),
    k: Optional[int] = Query(None, description="tightness 的 k"),
    s: Optional[int] = Query(None, description="hyper-h 的块数 s"),
    config: Settings = Depends(get_settings),
) -> ApiResponse:
    """
    构造图或超图并检查其性质

    名称未知或参数缺失时返回 400，顶点数超过 CONSTRUCTION_LIMIT 时返回 1007；report.ok 为假时 message 标明检查失败
    """
    objects, report = build_construction(
        name, {"n": n, "delta": delta, "k": k, "s": s}, limit=config.CONSTRUCTION_LIMIT
    )
    data = {
        "name": name,
        "ok": report.ok,
        "report": report.model_dump(),
        "objects": {stem: _payload(obj) for stem, obj in objects.items()},
    }
    return ApiResponse.success(data=data, message="构造完成" if report.ok else "性质检查失败")
