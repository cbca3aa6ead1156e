"""
蒙特卡洛实验路由
"""
from typing import Dict, List, Optional

from fastapi import APIRouter, Depends
from pydantic import BaseModel, Field

from app.config import Settings
from app.dependencies import build_packing_config, get_settings
from app.internal.experiments import constant_sweep, failure_profile, lemma2_stats, run_trials
from app.schemas import ApiResponse


router = APIRouter(prefix="/experiments", tags=["experiments"])


# ========== 请求模型 ==========


class Lemma2Request(BaseModel):
    """储备集界统计请求"""
    n: int = Field(..., ge=4, le=100000, description="顶点数")
    model: str = Field("matching", description="G 的随机模型")
    trials: int = Field(20, ge=1, le=1000, description="试验次数")
    delta: int = Field(1, ge=1, description="构造 B_1 所用的 δ")
    seed: Optional[int] = Field(None, ge=0)
    overrides: Dict[str, float] = Field(default_factory=dict)


class TrialsRequest(BaseModel):
    """完整填装试验请求"""
    n: int = Field(..., ge=4, le=100000)
    g_model: str = Field("random")
    h_model: str = Field("matching")
    trials: int = Field(10, ge=1, le=1000)
    seed: Optional[int] = Field(None, ge=0)
    overrides: Dict[str, float] = Field(default_factory=dict)


class SweepRequest(BaseModel):
    """常数扫描请求"""
    n: List[int] = Field(..., min_length=1, description="顶点数列表")
    divisor: List[float] = Field(..., min_length=1, description="maxdeg_divisor 列表")
    trials: int = Field(5, ge=1, le=1000)
    model: str = Field("random", description="G 的随机模型")
    seed: Optional[int] = Field(None, ge=0)


# ========== 实验接口 ==========


@router.post("/lemma2", summary="储备集界的经验频率", response_model=ApiResponse)
def run_lemma2(request: Lemma2Request, config: Settings = Depends(get_settings)) -> ApiResponse:
    cfg = build_packing_config(request.overrides, request.seed)
    table = lemma2_stats(
        request.n, request.model, request.trials, cfg,
        master_seed=cfg.seed, delta=request.delta, workers=config.EXPERIMENT_WORKERS,
    )
    return ApiResponse.success(data=table.model_dump(), message="统计完成")


@router.post("/trials", summary="完整填装试验", response_model=ApiResponse)
def run_pack_trials(request: TrialsRequest, config: Settings = Depends(get_settings)) -> ApiResponse:
    cfg = build_packing_config(request.overrides, request.seed)
    records = run_trials(
        request.n, request.g_model, request.h_model, request.trials, cfg,
        master_seed=cfg.seed, workers=config.EXPERIMENT_WORKERS,
    )
    successes = sum(1 for r in records if r.outcome == "success")
    return ApiResponse.success(data={
        "trials": len(records),
        "successes": successes,
        "profile": failure_profile(records),
        "records": [r.model_dump() for r in records],
    })


@router.post("/sweep", summary="常数扫描", response_model=ApiResponse)
def run_sweep(request: SweepRequest, config: Settings = Depends(get_settings)) -> ApiResponse:
    """data.csv 为 CSV 文本，行尾 CRLF"""
    cfg = build_packing_config(seed=request.seed)
    text = constant_sweep(
        request.n, request.divisor, request.trials, cfg.seed,
        g_model=request.model, base_cfg=cfg, workers=config.EXPERIMENT_WORKERS,
    )
    return ApiResponse.success(data={"csv": text}, message="扫描完成")
