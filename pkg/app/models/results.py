"""
해석/시뮬레이션/계획 결과 모델
"""

from typing import List, Literal, Optional

from pydantic import BaseModel, Field

FsoMode = Literal["deficit_at_cap", "deficit_at_zero"]
SatelliteMethod = Literal["full_bpp", "contact_angle"]
TargetKind = Literal["abdr_ratio", "brep"]
AxisName = Literal["sat_altitude", "sat_count", "hap_tx_power", "user_density"]
SweepMetric = Literal["aadr", "abdr", "brep", "min_power_abdr_ratio", "min_power_brep"]


class AnalyticDiagnostics(BaseModel):
    aadr_quad_error: float = 0.0
    abdr_quad_error: float = 0.0
    series_terms: int = 0
    series_truncation_bound: float = 0.0
    series_converged: bool = True
    series_tail_estimate: float = 0.0
    brep_raw: float = 0.0
    brep_clamped: bool = False
    brep_ceiling: float = 1.0
    alzer_mean_ratio: float = 1.0


class AnalyticMetrics(BaseModel):
    """해석 결과 (bit/s, 확률)"""

    aadr: float = Field(ge=0)
    abdr: float = Field(ge=0)
    brep: float = Field(ge=0, le=1)
    blockage_prob: float = Field(ge=0, le=1)
    fso_mode: FsoMode = "deficit_at_cap"
    config_hash: str = ""
    diagnostics: AnalyticDiagnostics = Field(default_factory=AnalyticDiagnostics)


class Estimate(BaseModel):
    mean: float
    half_width: float = Field(ge=0)


class MetricsEstimate(BaseModel):
    """Monte Carlo 추정치 (95% 정규 근사 신뢰구간)"""

    aadr: Estimate
    aadr_linear: Estimate
    abdr: Estimate
    brep: Estimate
    # 접속률을 선형화 합 (B_RF/ln2)Σγ 로 둔 초과 빈도
    brep_linear: Optional[Estimate] = None
    blockage_frequency: float = Field(ge=0, le=1)
    mean_user_count: float = Field(ge=0)
    rounds: int
    seed: int
    config_hash: str = ""


class PowerPlanResult(BaseModel):
    target_kind: TargetKind
    target_value: float
    feasible: bool = True
    min_power_w: Optional[float] = None
    min_power_dbw: Optional[float] = None
    iterations: int = 0
    bracket_low_w: float
    bracket_high_w: float
    achieved_metric: Optional[float] = None
    reason: Optional[str] = None
    # --mc-check 사용 시 Monte Carlo 재검증 결과
    mc_metric: Optional[float] = None
    mc_gap: Optional[float] = None


class SweepAxis(BaseModel):
    name: AxisName
    values: List[float]


class SweepCell(BaseModel):
    feasible: bool = True
    value: Optional[float] = None
    plan: Optional[PowerPlanResult] = None


class SweepGrid(BaseModel):
    axis1: SweepAxis
    axis2: SweepAxis
    metric: SweepMetric
    target: Optional[float] = None
    cells: List[List[SweepCell]]


class MetricComparison(BaseModel):
    name: str
    analytic: float
    mc: float
    mc_half_width: float
    abs_gap: float
    rel_gap: Optional[float] = None
    # 편향 보정 전 상대 차이 (bias_factor != 1 일 때만 의미)
    raw_rel_gap: Optional[float] = None
    tolerance: float
    tolerance_kind: Literal["relative", "absolute"]
    bias_factor: float = 1.0
    passed: bool
    # False 면 참고용 행 (보고서 통과 판정에서 제외)
    gating: bool = True
    hap_tx_power_dbw: Optional[float] = None


class ValidationReport(BaseModel):
    config_hash: str
    seed: int
    rounds: int
    passed: bool
    comparisons: List[MetricComparison]
    assumptions: List[str] = Field(default_factory=list)
    analytic: AnalyticMetrics
    estimate: MetricsEstimate
