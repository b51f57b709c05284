"""
해석 지표 / Monte Carlo / 검증 API 엔드포인트
"""

from typing import Any, Dict, Optional

from fastapi import APIRouter
from pydantic import BaseModel, Field

from app.api.errors import to_http_error
from app.core.config import get_settings
from app.models.results import AnalyticMetrics, FsoMode, MetricsEstimate, ValidationReport
from app.services.analytic_metrics import analytic_metrics
from app.services.monte_carlo import estimate_metrics
from app.services.network_model import resolve_config
from app.services.planner import validate

router = APIRouter()


class MetricsRequest(BaseModel):
    config: Dict[str, Any] = Field(default_factory=dict)  # 인터페이스 단위 키
    full_scale: bool = False
    fso_mode: Optional[FsoMode] = None


class SimulateRequest(MetricsRequest):
    rounds: int = Field(default=1000, ge=100)
    seed: Optional[int] = Field(default=None, ge=0)


class ValidateRequest(MetricsRequest):
    rounds: int = Field(default=1000, ge=1000)
    seed: Optional[int] = Field(default=None, ge=0)


@router.post("/metrics/analytic", response_model=AnalyticMetrics)
def analytic(request: MetricsRequest):
    """
    AADR / ABDR / BREP 해석값

    - **config**: 기준 기본값 위에 덮어쓸 키 (예: hap_tx_power_dbw)
    - **full_scale**: 기준 사용자 밀도 사용 여부
    """
    try:
        cfg = resolve_config(overrides=request.config, full_scale=request.full_scale)
        return analytic_metrics(
            cfg, request.fso_mode or get_settings().fso_deficit_mode
        )
    except Exception as e:
        raise to_http_error(e)


@router.post("/metrics/simulate", response_model=MetricsEstimate)
def simulate(request: SimulateRequest):
    try:
        cfg = resolve_config(overrides=request.config, full_scale=request.full_scale)
        return estimate_metrics(
            cfg, request.rounds, request.seed, fso_mode=request.fso_mode
        )
    except Exception as e:
        raise to_http_error(e)


@router.post("/metrics/validate", response_model=ValidationReport)
def validate_metrics(request: ValidateRequest):
    """해석값과 Monte Carlo 추정치 비교 보고서"""
    try:
        cfg = resolve_config(overrides=request.config, full_scale=request.full_scale)
        return validate(cfg, request.rounds, request.seed, request.fso_mode)
    except Exception as e:
        raise to_http_error(e)
