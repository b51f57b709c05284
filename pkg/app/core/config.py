"""
애플리케이션 설정 관리
"""

from functools import lru_cache
from typing import List, Literal

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    model_config = SettingsConfigDict(
        env_file=".env", case_sensitive=False, extra="ignore"
    )

    # FastAPI 설정
    api_v1_str: str = "/api/v1"
    project_name: str = Field(default="HAP Relay Planner")
    debug: bool = Field(default=False)
    log_level: str = Field(default="INFO")

    # 결과 파일 저장 경로 (trace CSV, summary JSON, grid CSV)
    output_dir: str = Field(default="output")

    # Monte Carlo 설정
    mc_rounds: int = Field(default=10_000, ge=1)
    mc_master_seed: int = Field(default=20250101, ge=0)
    mc_workers: int = Field(default=1, ge=1)
    mc_satellite_method: Literal["full_bpp", "contact_angle"] = "contact_angle"
    fso_deficit_mode: Literal["deficit_at_cap", "deficit_at_zero"] = (
        "deficit_at_cap"
    )
    # 데스크 스케일 사용자 밀도 (기준 밀도는 --full-scale 에서만 사용)
    desk_user_density_per_m2: float = Field(default=1e-8, gt=0)

    # 수치 적분 허용 오차
    # Laplace 지수 보간표의 10배 구간당 격자점 수
    laplace_table_per_decade: int = Field(default=40, ge=4)
    quad_rel_tol: float = Field(default=1e-8, gt=0)
    mgf_abs_tol: float = Field(default=1e-10, gt=0)

    # 급수 설정 (BREP 일반화 이항 급수)
    series_rel_tol: float = Field(default=1e-12, gt=0)
    series_max_terms: int = Field(default=200, ge=1)

    # 전력 계획 설정
    power_low_dbw: float = -20.0
    power_high_dbw: float = 60.0
    power_cap_dbw: float = 120.0
    power_expand_step_db: float = Field(default=10.0, gt=0)
    power_rel_tol: float = Field(default=1e-4, gt=0)
    sweep_workers: int = Field(default=1, ge=1)

    # 검증: BREP 목표값별 전력에서 추가 비교. 이 값 미만 목표는 참고용 (판정 제외)
    validation_brep_targets: List[float] = Field(default=[0.2, 0.5, 0.9])
    validation_brep_gate_min: float = Field(default=0.5, ge=0, le=1)


@lru_cache()
def get_settings() -> Settings:
    return Settings()
