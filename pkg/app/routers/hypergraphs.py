"""
3-一致超图路由
"""
from fastapi import APIRouter, Depends, Query
from pydantic import BaseModel, Field

from app.config import Settings
from app.dependencies import get_settings
from app.internal.formats import parse_hypergraph
from app.internal.hypergraph import (
    Hypergraph3,
    construction_t,
    construction_t_edge_count,
    counterexample_h,
    link_chromatic_profile,
    local_obstruction_check,
)
from app.schemas import ApiResponse, HypergraphPayload


router = APIRouter(prefix="/hypergraphs", tags=["hypergraphs"])


# ========== 请求模型 ==========


class ObstructionRequest(BaseModel):
    """局部障碍判定请求"""
    t: HypergraphPayload = Field(..., description="宿主超图 T")
    h: HypergraphPayload = Field(..., description="目标超图 H")
    colors: int = Field(3, ge=1, le=8, description="链接染色所用颜色数")


def _to_hypergraph(payload: HypergraphPayload) -> Hypergraph3:
    """复用文本解析器的校验"""
    lines = [f"{payload.n} {len(payload.edges)}"]
    lines.extend(" ".join(str(v) for v in edge) for edge in payload.edges)
    return parse_hypergraph("\n".join(lines))


def _to_payload(hg: Hypergraph3) -> dict:
    return {"n": hg.n, "edges": [list(e) for e in hg.edges]}


# ========== 超图接口 ==========


@router.get("/counterexample", summary="反例超图 H_s", response_model=ApiResponse)
def get_counterexample(
    s: int = Query(..., ge=2, le=40, description="块数"),
    block: int = Query(5, ge=4, le=5, description="每块顶点数"),
    config: Settings = Depends(get_settings),
) -> ApiResponse:
    hg = counterexample_h(s, block=block)
    # 链接规模超出染色上限时不给出 profile
    profile = link_chromatic_profile(hg) if hg.n - 1 <= config.COLORING_LIMIT else None
    return ApiResponse.success(data={
        "hypergraph": _to_payload(hg),
        "profile": profile,
    })


@router.get("/construction-t", summary="构造 T_n", response_model=ApiResponse)
def get_construction_t(
    n: int = Query(..., ge=8, le=200, description="顶点数"),
    parts: int = Query(3, ge=2, le=3, description="V' 的分块数"),
) -> ApiResponse:
    hg = construction_t(n, parts=parts)
    return ApiResponse.success(data={
        "hypergraph": _to_payload(hg),
        "edge_count": construction_t_edge_count(n, parts=parts),
    })


@router.post("/obstruction", summary="链接可染色性的鸽笼判定", response_model=ApiResponse)
def run_obstruction(request: ObstructionRequest) -> ApiResponse:
    t = _to_hypergraph(request.t)
    h = _to_hypergraph(request.h)
    verdict = local_obstruction_check(t, h, colors=request.colors)
    return ApiResponse.success(data=verdict.to_dict(), message=verdict.verdict)
