"""
한 라운드의 확률 실현값 (hot path 용 dataclass)
"""

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SeriesResult:
    value: float
    terms_used: int
    truncation_bound: float
    converged: bool = True
    # 잘린 급수에 더한 꼬리 추정치 (value 에 포함)
    tail_estimate: float = 0.0


@dataclass(frozen=True)
class UserRealization:
    """PPP 사용자 집합 (배열 단위)"""

    polar_angle: np.ndarray
    azimuth: np.ndarray
    distance: np.ndarray
    rf_fade_power: np.ndarray

    def __len__(self) -> int:
        return int(self.distance.size)


@dataclass(frozen=True)
class SatelliteRealization:
    contact_angle: float
    distance: float
    visible: bool
    fso_fade: float
    deviation_angle: float


@dataclass(frozen=True)
class ZContext:
    """𝓩 CCDF 의 θ 고정 문맥: μ(d) = z * mu_coefficient"""

    polar_angle: float
    distance: float
    beta: float
    mu_coefficient: float


@dataclass(frozen=True, slots=True)
class RoundOutcome:
    round_index: int
    user_count: int
    aggregate_interference: float
    access_sum_rate: float
    access_sum_rate_linear: float
    backhaul_rate: float
    blocked: bool
    exceeded: bool
