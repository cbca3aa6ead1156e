"""
穷举求解路由
"""
from math import comb

from fastapi import APIRouter, Depends
from pydantic import BaseModel

from app.config import Settings
from app.dependencies import get_settings
from app.internal import exact_oracle
from app.internal.formats import graph_from_payload, graph_to_payload
from app.schemas import ApiResponse, GraphPayload


router = APIRouter(prefix="/oracle", tags=["oracle"])


# ========== 请求模型 ==========


class PairRequest(BaseModel):
    """G 与 H"""
    g: GraphPayload
    h: GraphPayload


class TargetRequest(BaseModel):
    """目标图 H"""
    h: GraphPayload


class HostRequest(BaseModel):
    """宿主图"""
    g: GraphPayload


# ========== 穷举接口 ==========


@router.post("/exact-pack", summary="精确填装判定", response_model=ApiResponse)
def run_exact_pack(request: PairRequest, config: Settings = Depends(get_settings)) -> ApiResponse:
    g = graph_from_payload(request.g.n, request.g.edges)
    h = graph_from_payload(request.h.n, request.h.edges)
    mapping = exact_oracle.exact_pack(g, h, limit=config.ORACLE_PACK_LIMIT)
    return ApiResponse.success(
        data={"packs": mapping is not None, "mapping": mapping.to_list() if mapping else None}
    )


@router.post("/brute-ex", summary="穷举计算 ex(n, H)", response_model=ApiResponse)
def run_brute_ex(request: TargetRequest, config: Settings = Depends(get_settings)) -> ApiResponse:
    """
    返回 ex、m* 与定理公式值 C(n-1,2) + δ(H) - 1
    """
    h = graph_from_payload(request.h.n, request.h.edges)
    result = exact_oracle.brute_ex(h.n, h, limit=config.ORACLE_EX_LIMIT, workers=config.EXPERIMENT_WORKERS)
    return ApiResponse.success(data={
        "n": result.n,
        "ex": result.ex_value,
        "min_missing": result.min_missing,
        "formula": comb(h.n - 1, 2) + h.min_degree - 1,
        "witness": graph_to_payload(result.witness),
    })


@router.post("/enumerate", summary="枚举极值图同构类", response_model=ApiResponse)
def run_enumerate(request: TargetRequest, config: Settings = Depends(get_settings)) -> ApiResponse:
    h = graph_from_payload(request.h.n, request.h.edges)
    classes = exact_oracle.enumerate_extremal(
        h.n, h, limit=config.ORACLE_ENUMERATE_LIMIT, workers=config.EXPERIMENT_WORKERS
    )
    return ApiResponse.success(data={
        "n": h.n,
        "count": len(classes),
        "classes": [
            {
                "edges": g.edge_count,
                "clique_number": exact_oracle.clique_number(g),
                "graph": graph_to_payload(g),
            }
            for g in classes
        ],
    })


@router.post("/hamiltonian", summary="哈密顿圈判定", response_model=ApiResponse)
def run_hamiltonian(request: HostRequest, config: Settings = Depends(get_settings)) -> ApiResponse:
    g = graph_from_payload(request.g.n, request.g.edges)
    hamiltonian = exact_oracle.is_hamiltonian(g, limit=config.ORACLE_HAMILTON_LIMIT)
    return ApiResponse.success(data={"hamiltonian": hamiltonian})
