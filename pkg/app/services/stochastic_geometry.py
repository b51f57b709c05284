"""
구면 점 과정의 거리 분포와 표본 추출기

- 사용자: HAP 커버리지 캡 위의 PPP
- 위성: R_s 구면 위의 BPP, 최근접 위성 거리
- 페이딩: shadowed-Rician 제곱 포락선의 Gamma 근사, FSO 정렬 오차 페이딩

표본 추출 함수는 모두 명시적인 numpy Generator 를 받으며 공유 상태가 없습니다.
"""

import logging
import math
from typing import Tuple

import numpy as np

from app.models.network import DerivedGeometry, NetworkConfig
from app.models.realizations import SatelliteRealization, UserRealization
from app.models.results import FsoMode, SatelliteMethod
from app.services.network_model import visibility_distance

logger = logging.getLogger(__name__)

# full_bpp 한 번에 생성하는 (표본 × 위성) 원소 수 상한
_BPP_CHUNK_ELEMENTS = 2_000_000


# ---------------------------------------------------------------------------
# 사용자-HAP 거리
# ---------------------------------------------------------------------------


def user_distance_pdf(d, geom: DerivedGeometry):
    """f(d) = 2d / (d_max² - H²) on [H, d_max]"""
    d = np.asarray(d, dtype=float)
    span = geom.d_max**2 - geom.d_min**2
    if span <= 0:
        return np.zeros_like(d)
    inside = (d >= geom.d_min) & (d <= geom.d_max)
    return np.where(inside, 2.0 * d / span, 0.0)


def user_distance_cdf(d, geom: DerivedGeometry):
    d = np.asarray(d, dtype=float)
    span = geom.d_max**2 - geom.d_min**2
    if span <= 0:
        return np.where(d >= geom.d_min, 1.0, 0.0)
    return np.clip((d * d - geom.d_min**2) / span, 0.0, 1.0)


def polar_angle_cdf(theta, geom: DerivedGeometry):
    """P(θ_i ≤ θ) = (1 - cos θ)/(1 - cos θ_max)"""
    theta = np.asarray(theta, dtype=float)
    one_minus_cos = 2.0 * np.sin(0.5 * np.clip(theta, 0.0, geom.theta_max)) ** 2
    return one_minus_cos / geom.one_minus_cos_theta_max


# ---------------------------------------------------------------------------
# 최근접 위성 거리 / 접촉각
# ---------------------------------------------------------------------------


def _half_cos_base(d, cfg: NetworkConfig):
    """(1 + cos θ_c)/2 = ((R_H + R_s)² - d²) / (4 R_H R_s)"""
    hap_radius = cfg.hap_sphere_radius
    shell = cfg.sat_shell_radius
    return ((hap_radius + shell) ** 2 - d * d) / (4.0 * hap_radius * shell)


def _sat_support(cfg: NetworkConfig, full_support: bool) -> Tuple[float, float]:
    lower = cfg.sat_shell_radius - cfg.hap_sphere_radius
    if full_support:
        return lower, cfg.sat_shell_radius + cfg.hap_sphere_radius
    return lower, visibility_distance(cfg)


def nearest_sat_distance_pdf(d, cfg: NetworkConfig, full_support: bool = False):
    """
    f(d) = N d / (2 R_H R_s) · [((R_H+R_s)² - d²)/(4 R_H R_s)]^{N-1}

    기본 지지 구간은 가시 한계까지로 잘려 있어 전체 질량이 1 - P_block 입니다.
    """
    d = np.asarray(d, dtype=float)
    lower, upper = _sat_support(cfg, full_support)
    base = np.clip(_half_cos_base(d, cfg), 0.0, 1.0)
    n = cfg.sat_count
    density = n * d / (2.0 * cfg.hap_sphere_radius * cfg.sat_shell_radius) * base ** (n - 1)
    return np.where((d >= lower) & (d <= upper), density, 0.0)


def nearest_sat_distance_cdf(d, cfg: NetworkConfig, full_support: bool = False):
    """P(d_s ≤ d), 가시 한계 이후에는 1 - P_block 에서 멈춤"""
    d = np.asarray(d, dtype=float)
    lower, upper = _sat_support(cfg, full_support)
    clipped = np.clip(d, lower, upper)
    base = np.clip(_half_cos_base(clipped, cfg), 0.0, 1.0)
    return np.where(d < lower, 0.0, 1.0 - base**cfg.sat_count)


def contact_angle_cdf(theta, cfg: NetworkConfig):
    """F(θ) = 1 - [(1 + cos θ)/2]^N"""
    theta = np.asarray(theta, dtype=float)
    half = np.cos(0.5 * np.clip(theta, 0.0, math.pi)) ** 2
    return 1.0 - half**cfg.sat_count


def contact_angle_pdf(theta, cfg: NetworkConfig):
    theta = np.asarray(theta, dtype=float)
    n = cfg.sat_count
    half = np.cos(0.5 * theta) ** 2
    density = 0.5 * n * np.sin(theta) * half ** (n - 1)
    return np.where((theta >= 0) & (theta <= math.pi), density, 0.0)


def visible_contact_cdf_value(cfg: NetworkConfig) -> float:
    """가시 한계에서의 (1 + cos θ_c^{vis})/2"""
    return float(np.clip(_half_cos_base(visibility_distance(cfg), cfg), 0.0, 1.0))


def blockage_probability(cfg: NetworkConfig) -> float:
    """P_block = [(1 + cos θ_c^{vis})/2]^N"""
    return visible_contact_cdf_value(cfg) ** cfg.sat_count


def sat_distance_from_gap(one_minus_cos, cfg: NetworkConfig):
    """d_s² = (R_s - R_H)² + 2 R_H R_s (1 - cos θ_c)"""
    gap = cfg.sat_shell_radius - cfg.hap_sphere_radius
    return np.sqrt(
        gap * gap
        + 2.0 * cfg.hap_sphere_radius * cfg.sat_shell_radius * np.asarray(one_minus_cos)
    )


# ---------------------------------------------------------------------------
# 수신 전력
# ---------------------------------------------------------------------------


def rf_received_power(cfg: NetworkConfig, distance, fade_power):
    """ρ = P_u G_u G_H^r (λ/4π)² h² d^{-α}"""
    return cfg.rf_link_constant * fade_power * np.asarray(distance) ** (
        -cfg.path_loss_exponent
    )


def mean_interference(cfg: NetworkConfig, geom: DerivedGeometry) -> float:
    """
    Campbell 정리에 의한 E[𝓘] = Λ 2π R⊕² m₁m₂ K ∫ D(θ)^{-α/2} sin θ dθ

    sin θ dθ = d(1 - cos θ) 치환으로 닫힌 형태가 됩니다.
    """
    if cfg.user_density == 0 or geom.one_minus_cos_theta_max == 0:
        return 0.0
    scale = 2.0 * cfg.earth_radius * cfg.hap_sphere_radius
    half_alpha = 0.5 * cfg.path_loss_exponent
    lower = geom.d_min**2
    upper = geom.d_max**2
    if math.isclose(half_alpha, 1.0):
        integral = math.log(upper / lower) / scale
    else:
        exponent = 1.0 - half_alpha
        integral = (upper**exponent - lower**exponent) / (exponent * scale)
    return (
        cfg.user_density
        * 2.0
        * math.pi
        * cfg.earth_radius**2
        * cfg.rician_shape
        * cfg.rician_scale
        * cfg.rf_link_constant
        * integral
    )


# ---------------------------------------------------------------------------
# 표본 추출
# ---------------------------------------------------------------------------


def sample_rf_fade(rng: np.random.Generator, m1: float, m2: float, size=None):
    """h²_RF ~ Gamma(shape m₁, scale m₂)"""
    return rng.gamma(shape=m1, scale=m2, size=size)


def _sample_user_gaps(rng: np.random.Generator, geom: DerivedGeometry, size: int):
    # 역 CDF: 1 - cos θ_i = U (1 - cos θ_max)
    return rng.random(size) * geom.one_minus_cos_theta_max


def _user_distance_from_gap(one_minus_cos, cfg: NetworkConfig, geom: DerivedGeometry):
    return np.sqrt(
        geom.d_min**2 + 2.0 * cfg.earth_radius * geom.hap_sphere_radius * one_minus_cos
    )


def sample_users(
    rng: np.random.Generator, cfg: NetworkConfig, geom: DerivedGeometry
) -> UserRealization:
    """K ~ Poisson(Λ_u · cap_area) 명의 사용자와 각 사용자의 RF 페이딩"""
    count = int(rng.poisson(geom.mean_user_count)) if geom.mean_user_count > 0 else 0
    gaps = _sample_user_gaps(rng, geom, count)
    azimuth = rng.uniform(0.0, 2.0 * math.pi, count)
    fades = sample_rf_fade(rng, cfg.rician_shape, cfg.rician_scale, count)
    return UserRealization(
        polar_angle=2.0 * np.arcsin(np.sqrt(0.5 * gaps)),
        azimuth=azimuth,
        distance=_user_distance_from_gap(gaps, cfg, geom),
        rf_fade_power=fades,
    )


def sample_interference(
    rng: np.random.Generator, cfg: NetworkConfig, geom: DerivedGeometry, size: int
) -> np.ndarray:
    """size 개의 독립 실현에 대한 총 수신 전력 𝓘 (사용자 단위 배열 + bincount)"""
    mean = geom.mean_user_count
    counts = rng.poisson(mean, size) if mean > 0 else np.zeros(size, dtype=np.int64)
    total = int(counts.sum())
    gaps = _sample_user_gaps(rng, geom, total)
    fades = sample_rf_fade(rng, cfg.rician_shape, cfg.rician_scale, total)
    powers = rf_received_power(cfg, _user_distance_from_gap(gaps, cfg, geom), fades)
    owner = np.repeat(np.arange(size), counts)
    return np.bincount(owner, weights=powers, minlength=size)


def sample_fso_fades(
    rng: np.random.Generator,
    cfg: NetworkConfig,
    size: int,
    mode: FsoMode = "deficit_at_cap",
) -> Tuple[np.ndarray, np.ndarray]:
    """
    (θ_d, h_FSO) 배열

    θ_d ~ Rayleigh(σ₀). 확률 max(cos θ_d, 0) 로 h = A₀ U^{1/η²},
    나머지 질량은 모드에 따라 A₀ 또는 0 에 놓입니다.
    """
    deviation = rng.rayleigh(cfg.deviation_std, size)
    accept = rng.random(size) < np.maximum(np.cos(deviation), 0.0)
    continuous = cfg.pointing_cap * rng.random(size) ** (1.0 / cfg.pointing_shape**2)
    deficit = cfg.pointing_cap if mode == "deficit_at_cap" else 0.0
    return deviation, np.where(accept, continuous, deficit)


def sample_fso_fade(
    rng: np.random.Generator, cfg: NetworkConfig, mode: FsoMode = "deficit_at_cap"
) -> Tuple[float, float]:
    deviation, fade = sample_fso_fades(rng, cfg, 1, mode)
    return float(deviation[0]), float(fade[0])


def _sample_contact_gaps_bpp(
    rng: np.random.Generator, cfg: NetworkConfig, size: int
) -> np.ndarray:
    """N_s 개 균일 점을 실제로 만들고 (R_H, 0, 0) 에 가장 가까운 점의 1 - cos θ_c"""
    n = cfg.sat_count
    rows = max(1, _BPP_CHUNK_ELEMENTS // n)
    gaps = np.empty(size)
    for start in range(0, size, rows):
        stop = min(size, start + rows)
        # Archimedes: z 균일, 방위각 균일 → 구면 균일
        z = rng.uniform(-1.0, 1.0, (stop - start, n))
        phi = rng.uniform(0.0, 2.0 * math.pi, (stop - start, n))
        x = np.sqrt(1.0 - z * z) * np.cos(phi)
        gaps[start:stop] = 1.0 - x.max(axis=1)
    return gaps


def _sample_contact_gaps_direct(
    rng: np.random.Generator, cfg: NetworkConfig, size: int
) -> np.ndarray:
    # cos θ_c = 2 U^{1/N} - 1  →  1 - cos θ_c = -2 expm1(ln U / N)
    u = rng.random(size)
    return -2.0 * np.expm1(np.log(u) / cfg.sat_count)


def sample_contact_gaps(
    rng: np.random.Generator,
    cfg: NetworkConfig,
    size: int,
    method: SatelliteMethod = "contact_angle",
) -> np.ndarray:
    """최근접 위성 접촉각의 1 - cos θ_c 배열"""
    if method == "full_bpp":
        return _sample_contact_gaps_bpp(rng, cfg, size)
    return _sample_contact_gaps_direct(rng, cfg, size)


def sample_nearest_distances(
    rng: np.random.Generator,
    cfg: NetworkConfig,
    size: int,
    method: SatelliteMethod = "contact_angle",
) -> np.ndarray:
    """가림 여부와 무관한 최근접 위성 거리 d_s 배열"""
    return sat_distance_from_gap(sample_contact_gaps(rng, cfg, size, method), cfg)


def sample_nearest_satellite(
    rng: np.random.Generator,
    cfg: NetworkConfig,
    method: SatelliteMethod = "contact_angle",
    mode: FsoMode = "deficit_at_cap",
) -> SatelliteRealization:
    gap = float(sample_contact_gaps(rng, cfg, 1, method)[0])
    distance = float(sat_distance_from_gap(gap, cfg))
    deviation, fade = sample_fso_fade(rng, cfg, mode)
    return SatelliteRealization(
        contact_angle=2.0 * math.asin(math.sqrt(min(0.5 * gap, 1.0))),
        distance=distance,
        visible=distance <= visibility_distance(cfg),
        fso_fade=fade,
        deviation_angle=deviation,
    )
