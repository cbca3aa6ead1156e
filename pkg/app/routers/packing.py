"""
填装路由
"""
from typing import Dict, List, Optional

from fastapi import APIRouter
from pydantic import BaseModel, Field

from app.dependencies import build_packing_config
from app.internal.formats import graph_from_payload
from app.internal.packing_engine import Success, outcome_document, pack, verify_packing
from app.schemas import ApiResponse, GraphPayload


router = APIRouter(prefix="/packing", tags=["packing"])


# ========== 请求模型 ==========


class PackRequest(BaseModel):
    """填装请求"""
    g: GraphPayload = Field(..., description="缺失边图 G")
    h: GraphPayload = Field(..., description="目标图 H")
    seed: Optional[int] = Field(None, ge=0, description="主种子")
    retries: Optional[int] = Field(None, gt=0, description="储备集最多抽样次数")
    overrides: Dict[str, float] = Field(default_factory=dict, description="PackingConfig 常数覆盖")
    include_trace: bool = Field(False, description="是否返回审计日志")


class VerifyRequest(BaseModel):
    """验证请求"""
    g: GraphPayload
    h: GraphPayload
    mapping: List[int] = Field(..., description="f(v) 列表")


# ========== 填装接口 ==========


@router.post("/pack", summary="运行四阶段填装", response_model=ApiResponse)
def run_pack(request: PackRequest) -> ApiResponse:
    """
    运行填装流程

    输入不满足前提时返回 400 与对应错误码；保证失效时 data.outcome 为 violation
    """
    g = graph_from_payload(request.g.n, request.g.edges)
    h = graph_from_payload(request.h.n, request.h.edges)
    cfg = build_packing_config(request.overrides, request.seed, request.retries)
    outcome = pack(g, h, cfg)

    data = outcome_document(outcome, cfg)
    if request.include_trace:
        data["trace"] = outcome.trace.to_dicts()
    message = "填装成功" if isinstance(outcome, Success) else f"保证失效: {outcome.stage}"
    return ApiResponse.success(data=data, message=message)


@router.post("/verify", summary="验证填装", response_model=ApiResponse)
def run_verify(request: VerifyRequest) -> ApiResponse:
    """
    检查映射是否为填装，映射不是双射时返回 400
    """
    g = graph_from_payload(request.g.n, request.g.edges)
    h = graph_from_payload(request.h.n, request.h.edges)
    valid = verify_packing(g, h, request.mapping)
    return ApiResponse.success(data={"valid": valid}, message="验证完成")
