"""
최소 전력 계획 / 스윕 API 엔드포인트
"""

from typing import Any, Dict, Optional

from fastapi import APIRouter
from pydantic import BaseModel, Field

from app.api.errors import to_http_error
from app.core.config import get_settings
from app.core.errors import InfeasibleTargetError
from app.models.results import (
    FsoMode,
    PowerPlanResult,
    SweepAxis,
    SweepGrid,
    SweepMetric,
    TargetKind,
)
from app.services.network_model import load_config, resolve_config, to_interface_units
from app.services.planner import mc_check, min_power, sweep

router = APIRouter()


class PowerRequest(BaseModel):
    config: Dict[str, Any] = Field(default_factory=dict)
    full_scale: bool = False
    fso_mode: Optional[FsoMode] = None
    target_kind: TargetKind
    target: float = Field(gt=0)
    mc_check: bool = False
    mc_rounds: int = Field(default=1000, ge=100)
    seed: Optional[int] = Field(default=None, ge=0)


class SweepRequest(BaseModel):
    config: Dict[str, Any] = Field(default_factory=dict)
    full_scale: bool = False
    fso_mode: Optional[FsoMode] = None
    axis1: SweepAxis
    axis2: SweepAxis
    metric: SweepMetric
    target: Optional[float] = None


@router.post("/planning/min-power", response_model=PowerPlanResult)
def plan_power(request: PowerRequest):
    """
    목표를 만족하는 최소 HAP 송신 전력

    달성 불가능한 목표는 feasible=false 와 사유를 담아 200 으로 응답합니다.
    """
    try:
        cfg = resolve_config(overrides=request.config, full_scale=request.full_scale)
        fso_mode = request.fso_mode or get_settings().fso_deficit_mode
        plan = min_power(cfg, request.target_kind, request.target, fso_mode)
        if request.mc_check:
            plan = mc_check(plan, cfg, request.mc_rounds, request.seed, fso_mode=fso_mode)
        return plan
    except InfeasibleTargetError as e:
        return e.plan
    except Exception as e:
        raise to_http_error(e)


@router.post("/planning/sweep", response_model=SweepGrid)
def plan_sweep(request: SweepRequest):
    try:
        cfg = resolve_config(overrides=request.config, full_scale=request.full_scale)
        return sweep(
            cfg,
            request.axis1,
            request.axis2,
            request.metric,
            request.target,
            request.fso_mode or get_settings().fso_deficit_mode,
        )
    except Exception as e:
        raise to_http_error(e)


@router.get("/planning/defaults")
def defaults():
    """기준 기본값 (인터페이스 단위)"""
    return to_interface_units(load_config())
