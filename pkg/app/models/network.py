"""
네트워크 파라미터 및 유도 기하 모델
"""

import math

from pydantic import BaseModel, ConfigDict, Field, model_validator
from scipy.constants import speed_of_light


class NetworkConfig(BaseModel):
    """기준 물리/네트워크 파라미터 (SI 단위, 이득은 선형)"""

    model_config = ConfigDict(frozen=True, extra="forbid")

    # 기하
    earth_radius: float = Field(default=6371e3, gt=0)
    sat_shell_radius: float = Field(default=6871e3, gt=0)
    hap_altitude: float = Field(default=20e3, gt=0)
    hap_coverage_radius: float = Field(default=80e3, ge=0)

    # 점 과정
    user_density: float = Field(default=1e-5, ge=0)
    sat_count: int = Field(default=300, ge=1)

    # RF 접속 링크
    user_tx_power: float = Field(default=20.0, gt=0)
    user_gain: float = Field(default=10 ** 0.8, gt=0)
    hap_rx_gain: float = Field(default=10 ** 3.2, gt=0)
    rf_frequency: float = Field(default=2e9, gt=0)
    path_loss_exponent: float = Field(default=2.0, gt=0)
    rician_shape: int = Field(default=2, ge=1)
    rician_scale: float = Field(default=0.5, gt=0)
    hap_noise: float = Field(default=2e-14, gt=0)
    rf_bandwidth: float = Field(default=1e9, gt=0)

    # FSO 백홀 링크
    hap_tx_power: float = Field(default=100.0, ge=0)
    hap_tx_gain: float = Field(default=10 ** 5.2, gt=0)
    sat_gain: float = Field(default=10 ** 4.2, gt=0)
    fso_wavelength: float = Field(default=1550e-9, gt=0)
    pointing_shape: float = Field(default=1.00526, gt=0)
    pointing_cap: float = Field(default=0.01979, gt=0)
    deviation_std: float = Field(default=0.015, gt=0)
    oe_coeff: float = Field(default=0.5, gt=0)
    sat_noise: float = Field(default=1.5e-12, gt=0)
    fso_bandwidth: float = Field(default=100e9, gt=0)

    @model_validator(mode="after")
    def _check_shells(self) -> "NetworkConfig":
        # R_s > R_H > R_earth
        if self.sat_shell_radius <= self.earth_radius + self.hap_altitude:
            raise ValueError(
                "sat_shell_radius must exceed earth_radius + hap_altitude"
            )
        return self

    @property
    def hap_sphere_radius(self) -> float:
        return self.earth_radius + self.hap_altitude

    @property
    def rf_wavelength(self) -> float:
        return speed_of_light / self.rf_frequency

    @property
    def sat_altitude(self) -> float:
        return self.sat_shell_radius - self.earth_radius

    @property
    def rf_link_constant(self) -> float:
        """P_u G_u G_H^r (λ_RF/4π)^2: 거리/페이딩을 제외한 수신 전력 계수"""
        return (
            self.user_tx_power
            * self.user_gain
            * self.hap_rx_gain
            * (self.rf_wavelength / (4 * math.pi)) ** 2
        )

    @property
    def fso_link_constant(self) -> float:
        """υ^2 G_H^t G_s (λ_FSO/4π)^2 / σ_s^2: P_H^t h^2 / d^2 를 곱하면 γ_s"""
        return (
            self.oe_coeff**2
            * self.hap_tx_gain
            * self.sat_gain
            * (self.fso_wavelength / (4 * math.pi)) ** 2
            / self.sat_noise
        )


class DerivedGeometry(BaseModel):
    """설정에서 유도된 구면 기하량"""

    model_config = ConfigDict(frozen=True)

    hap_sphere_radius: float
    theta_max: float
    d_min: float
    one_minus_cos_theta_max: float
    d_max: float
    fso_d_min: float
    fso_d_max: float
    cap_area: float
    mean_user_count: float
