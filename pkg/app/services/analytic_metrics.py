"""
해석 지표 서비스 (AADR / ABDR / BREP)

- 총 수신 전력 𝓘 의 Laplace 변환
- 𝓩 의 CCDF (Alzer 경계)
- FSO 페이딩 주변 분포
- 평균 접속 전송률 (AADR), 평균 백홀 전송률 (ABDR), 백홀 전송률 초과 확률 (BREP)

각도 적분은 t = 1 - cos θ 로 치환합니다 (sin θ dθ = dt). θ_max 가 작아서
cos θ 를 직접 쓰면 상쇄 오차가 생깁니다. 적분은 scipy.integrate 의 quad
(스칼라) 와 quad_vec (벡터 값) 로 계산합니다.
"""

import logging
import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import IntegrationWarning, quad, quad_vec
from scipy.interpolate import BSpline, make_interp_spline

from app.core.config import get_settings
from app.core.errors import DomainError, QuadratureError
from app.models.network import DerivedGeometry, NetworkConfig
from app.models.realizations import SeriesResult, ZContext
from app.models.results import AnalyticDiagnostics, AnalyticMetrics, FsoMode
from app.services.network_model import config_hash, derive_geometry
from app.services.special_functions import (
    alzer_beta,
    alzer_mean_ratio,
    binomial_series_tail,
    cos_weighted_rayleigh_mass,
    gen_binom_coeff,
    gen_binom_coeffs,
)
from app.services.stochastic_geometry import (
    blockage_probability,
    mean_interference,
    sat_distance_from_gap,
    visible_contact_cdf_value,
)

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)
# Laplace 지수 보간 구간의 하한 (가장 가까운 사용자 기준 x = s m₂ K d_min^{-α})
LAPLACE_TABLE_X_MIN = 1e-9


def _integrate(
    func: Callable[[float], float],
    a: float,
    b: float,
    epsrel: float,
    epsabs: float = 0.0,
    points: Optional[Sequence[float]] = None,
    where: str = "quad",
) -> Tuple[float, float]:
    """scipy quad, 수렴 경고는 QuadratureError 로"""
    with warnings.catch_warnings():
        warnings.simplefilter("error", IntegrationWarning)
        try:
            value, error = quad(
                func, a, b, epsabs=epsabs, epsrel=epsrel, points=points, limit=200
            )
        except IntegrationWarning as e:
            raise QuadratureError(f"{where}: {e}") from e
    if not math.isfinite(value):
        raise QuadratureError(f"{where}: 적분값이 유한하지 않습니다")
    return value, error


def _integrate_vec(
    func: Callable[[float], np.ndarray],
    a: float,
    b: float,
    epsrel: float,
    epsabs: float = 0.0,
    points: Optional[Sequence[float]] = None,
    where: str = "quad_vec",
) -> Tuple[np.ndarray, float]:
    """scipy quad_vec, 실패 상태는 QuadratureError 로"""
    value, error, info = quad_vec(
        func, a, b, epsabs=epsabs, epsrel=epsrel, points=points, full_output=True
    )
    if not info.success:
        raise QuadratureError(f"{where}: {info.message} (오차 {error:.3e})")
    value = np.asarray(value, dtype=float)
    if not np.all(np.isfinite(value)):
        raise QuadratureError(f"{where}: 적분값이 유한하지 않습니다")
    return value, float(error)


def _interior_points(scale: float, upper: float, factors=(0.1, 1.0, 10.0, 100.0)):
    """(0, upper) 안에 있는 scale 배수 분할점"""
    return [scale * f for f in factors if 0.0 < scale * f < upper] or None


def _user_distance(t, cfg: NetworkConfig, geom: DerivedGeometry):
    """t = 1 - cos θ 에서의 사용자-HAP 거리"""
    return np.sqrt(
        geom.d_min**2 + 2.0 * cfg.earth_radius * geom.hap_sphere_radius * np.asarray(t)
    )


def _area_prefactor(cfg: NetworkConfig) -> float:
    """2π Λ_u R⊕²"""
    return 2.0 * math.pi * cfg.user_density * cfg.earth_radius**2


# ---------------------------------------------------------------------------
# 총 수신 전력 Laplace 변환
# ---------------------------------------------------------------------------


def _laplace_integral(
    s: np.ndarray, cfg: NetworkConfig, geom: DerivedGeometry
) -> np.ndarray:
    """∫₀^{1-cosθmax} [1 - (1 + s m₂ K D^{-α/2})^{-m₁}] dt, s > 0"""
    settings = get_settings()
    scale = cfg.rician_scale * cfg.rf_link_constant
    m1 = cfg.rician_shape
    half_alpha = 0.5 * cfg.path_loss_exponent
    upper = geom.one_minus_cos_theta_max
    # 성분마다 크기를 맞춰야 quad_vec 노름이 작은 s 를 놓치지 않음
    weight = upper * np.minimum(
        1.0, m1 * scale * geom.d_min ** (-cfg.path_loss_exponent) * s
    )

    def integrand(t: float) -> np.ndarray:
        path_gain = (
            geom.d_min**2 + 2.0 * cfg.earth_radius * geom.hap_sphere_radius * t
        ) ** (-half_alpha)
        # 1 - (1 + x)^{-m₁}
        return -np.expm1(-m1 * np.log1p(scale * path_gain * s)) / weight

    value, _ = _integrate_vec(
        integrand, 0.0, upper, epsrel=settings.quad_rel_tol, where="laplace_exponent"
    )
    return value * weight


def laplace_exponent(s, cfg: NetworkConfig) -> np.ndarray:
    """-ln 𝓛_𝓘(s) = 2πΛR⊕² ∫₀^{1-cosθmax} [1 - (1 + s m₂ K D^{-α/2})^{-m₁}] dt"""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    if np.any(s < 0):
        raise DomainError("Laplace 변수 s 는 0 이상이어야 합니다")
    geom = derive_geometry(cfg)
    prefactor = _area_prefactor(cfg)
    result = np.zeros_like(s)
    positive = s > 0
    if prefactor == 0 or geom.one_minus_cos_theta_max == 0 or not positive.any():
        return result
    result[positive] = prefactor * _laplace_integral(s[positive], cfg, geom)
    return result


def laplace_interference(s, cfg: NetworkConfig):
    """𝓛_𝓘(s) = E[exp(-s𝓘)], s 는 스칼라 또는 배열"""
    value = np.exp(-laplace_exponent(s, cfg))
    return float(value[0]) if np.ndim(s) == 0 else value


@dataclass(frozen=True)
class LaplaceTable:
    """log(-ln 𝓛_𝓘(s) / s) 의 log s 에 대한 3차 스플라인"""

    spline: BSpline
    log_s_min: float
    log_s_max: float


def _laplace_s_range(cfg: NetworkConfig, geom: DerivedGeometry) -> Tuple[float, float]:
    """CCDF 가 쓰는 s = kβμz 의 범위 (k ≤ m₁, z ≤ 1, 가장 먼 사용자까지)"""
    scale = cfg.rician_scale * cfg.rf_link_constant
    s_unit = geom.d_min**cfg.path_loss_exponent / scale
    s_max = (
        cfg.rician_shape
        * alzer_beta(cfg.rician_shape)
        * geom.d_max**cfg.path_loss_exponent
        / scale
    )
    return LAPLACE_TABLE_X_MIN * s_unit, 2.0 * max(s_max, s_unit)


@lru_cache(maxsize=64)
def laplace_table(cfg: NetworkConfig) -> LaplaceTable:
    """
    CCDF 적분용 Laplace 지수 보간표

    한 번의 quad_vec 로 로그 격자 전체를 계산합니다. 하한 아래에서는
    -ln 𝓛_𝓘(s) ≈ s E[𝓘] 이므로 비율을 상수로 이어 붙입니다.
    """
    settings = get_settings()
    geom = derive_geometry(cfg)
    s_min, s_max = _laplace_s_range(cfg, geom)
    decades = math.log10(s_max / s_min)
    count = max(int(math.ceil(decades * settings.laplace_table_per_decade)) + 1, 8)
    s_grid = np.geomspace(s_min, s_max, count)
    ratio = laplace_exponent(s_grid, cfg) / s_grid
    log_s = np.log(s_grid)
    logger.debug("Laplace 보간표: %d점, s ∈ [%.3e, %.3e]", count, s_min, s_max)
    return LaplaceTable(
        spline=make_interp_spline(log_s, np.log(ratio), k=3),
        log_s_min=float(log_s[0]),
        log_s_max=float(log_s[-1]),
    )


def tabulated_laplace_exponent(s, cfg: NetworkConfig) -> np.ndarray:
    """laplace_exponent 의 보간 근사 (표 범위 밖의 큰 s 는 직접 적분)"""
    s = np.atleast_1d(np.asarray(s, dtype=float))
    result = np.zeros_like(s)
    if _area_prefactor(cfg) == 0 or derive_geometry(cfg).one_minus_cos_theta_max == 0:
        return result
    table = laplace_table(cfg)
    positive = s > 0
    log_s = np.log(s[positive])
    beyond = log_s > table.log_s_max
    ratio = np.exp(table.spline(np.clip(log_s, table.log_s_min, table.log_s_max)))
    values = s[positive] * ratio
    if beyond.any():
        values[beyond] = laplace_exponent(s[positive][beyond], cfg)
    result[positive] = values
    return result


# ---------------------------------------------------------------------------
# 𝓩 CCDF
# ---------------------------------------------------------------------------


def make_z_context(theta: float, cfg: NetworkConfig) -> ZContext:
    """극각 θ 의 사용자에 대한 μ(d)/z = (4π/λ)² d^α / (m₂ P_u G_u G_H^r)"""
    geom = derive_geometry(cfg)
    if not 0.0 <= theta <= geom.theta_max + 1e-15:
        raise DomainError(f"θ 는 [0, θ_max] 범위여야 합니다: {theta}")
    t = 2.0 * math.sin(0.5 * theta) ** 2
    distance = float(_user_distance(t, cfg, geom))
    return ZContext(
        polar_angle=theta,
        distance=distance,
        beta=alzer_beta(cfg.rician_shape),
        mu_coefficient=distance**cfg.path_loss_exponent
        / (cfg.rician_scale * cfg.rf_link_constant),
    )


def _ccdf_values(z: np.ndarray, ctx: ZContext, cfg: NetworkConfig) -> np.ndarray:
    """Σ_k C(m₁,k)(-1)^{k+1} exp(-kβμσ²) 𝓛_𝓘(kβμ), [0,1] 로 제한"""
    m1 = cfg.rician_shape
    k = np.arange(1, m1 + 1, dtype=float)
    weights = np.array([gen_binom_coeff(m1, int(j)) * (-1.0) ** (j + 1) for j in k])
    s = ctx.beta * ctx.mu_coefficient * np.outer(np.asarray(z, dtype=float), k)
    exponent = s * cfg.hap_noise + tabulated_laplace_exponent(s.ravel(), cfg).reshape(
        s.shape
    )
    raw = np.exp(-exponent) @ weights
    clipped = np.clip(raw, 0.0, 1.0)
    if np.any(clipped != raw):
        logger.debug(
            "CCDF 클램프: 범위 [%.3e, %.3e]", float(raw.min()), float(raw.max())
        )
    return clipped


def ccdf_Z(z, ctx: ZContext, cfg: NetworkConfig):
    """P(𝓩 > z), z ∈ [0, 1]"""
    z_arr = np.atleast_1d(np.asarray(z, dtype=float))
    if np.any((z_arr < 0) | (z_arr > 1)):
        raise DomainError("z 는 [0, 1] 범위여야 합니다")
    values = _ccdf_values(z_arr, ctx, cfg)
    return float(values[0]) if np.ndim(z) == 0 else values


def _z_scale(ctx: ZContext, cfg: NetworkConfig) -> float:
    """CCDF 가 떨어지는 척도 z* = 1/(βμ(σ² + E[𝓘]))"""
    geom = derive_geometry(cfg)
    load = cfg.hap_noise + mean_interference(cfg, geom)
    return 1.0 / (ctx.beta * ctx.mu_coefficient * load)


def _ccdf_integral(
    ctx: ZContext, cfg: NetworkConfig, c: np.ndarray
) -> Tuple[np.ndarray, float]:
    """∫₀¹ e^{c z} F̄(z) dz (c 는 벡터)"""
    settings = get_settings()

    def integrand(z: float) -> np.ndarray:
        return _ccdf_values(np.array([z]), ctx, cfg)[0] * np.exp(z * c)

    # 바깥 각도 적분보다 한 자리 엄격하게
    return _integrate_vec(
        integrand,
        0.0,
        1.0,
        epsrel=0.1 * settings.quad_rel_tol,
        epsabs=settings.mgf_abs_tol,
        points=_interior_points(_z_scale(ctx, cfg), 1.0),
        where="ccdf_integral",
    )


def mgf_Z(c, ctx: ZContext, cfg: NetworkConfig):
    """E[e^{c𝓩}] = 1 + c ∫₀¹ e^{cz} F̄(z) dz"""
    c_arr = np.atleast_1d(np.asarray(c, dtype=float))
    integral, _ = _ccdf_integral(ctx, cfg, c_arr)
    value = 1.0 + c_arr * integral
    return float(value[0]) if np.ndim(c) == 0 else value


# ---------------------------------------------------------------------------
# AADR
# ---------------------------------------------------------------------------


def _context_at_gap(t: float, cfg: NetworkConfig, geom: DerivedGeometry) -> ZContext:
    distance = float(_user_distance(t, cfg, geom))
    return ZContext(
        polar_angle=2.0 * math.asin(math.sqrt(0.5 * t)),
        distance=distance,
        beta=alzer_beta(cfg.rician_shape),
        mu_coefficient=distance**cfg.path_loss_exponent
        / (cfg.rician_scale * cfg.rf_link_constant),
    )


def _angular_integral(
    cfg: NetworkConfig, c: np.ndarray, transform
) -> Tuple[np.ndarray, float]:
    """∫₀^{1-cosθmax} transform(∫₀¹ e^{cz}F̄ dz) dt"""
    geom = derive_geometry(cfg)
    settings = get_settings()

    def integrand(t: float) -> np.ndarray:
        integral, _ = _ccdf_integral(_context_at_gap(t, cfg, geom), cfg, c)
        return transform(integral)

    return _integrate_vec(
        integrand,
        0.0,
        geom.one_minus_cos_theta_max,
        epsrel=settings.quad_rel_tol,
        where="angular_integral",
    )


def _aadr_with_error(cfg: NetworkConfig) -> Tuple[float, float]:
    geom = derive_geometry(cfg)
    if cfg.user_density == 0 or geom.one_minus_cos_theta_max == 0:
        return 0.0, 0.0
    prefactor = _area_prefactor(cfg) * cfg.rf_bandwidth / LN2
    integral, error = _angular_integral(cfg, np.zeros(1), lambda value: value)
    return prefactor * float(integral[0]), prefactor * error


def aadr(cfg: NetworkConfig) -> float:
    """(2πΛR⊕² B_RF/ln2) ∫ sinθ ∫₀¹ F̄_𝓩(z) dz dθ  [bit/s]"""
    return _aadr_with_error(cfg)[0]


# ---------------------------------------------------------------------------
# FSO 페이딩 분포 / ABDR
# ---------------------------------------------------------------------------

# d_s 모멘트는 닫힌 형태 검산에 쓰이므로 기본 허용 오차보다 엄격하게
MOMENT_REL_TOL = 1e-11


def fso_fade_pdf(h, cfg: NetworkConfig):
    """(η²/A₀^{η²}) h^{η²-1} M(σ₀) on [0, A₀]"""
    h = np.asarray(h, dtype=float)
    eta_sq = cfg.pointing_shape**2
    mass = cos_weighted_rayleigh_mass(cfg.deviation_std)
    inside = (h > 0) & (h <= cfg.pointing_cap)
    safe = np.where(inside, h, cfg.pointing_cap)
    density = eta_sq / cfg.pointing_cap**eta_sq * safe ** (eta_sq - 1.0) * mass
    return np.where(inside, density, 0.0)


def fso_fade_cdf(h, cfg: NetworkConfig):
    """(h/A₀)^{η²} M(σ₀), A₀ 이상에서는 전체 질량 M 으로 고정"""
    h = np.asarray(h, dtype=float)
    mass = cos_weighted_rayleigh_mass(cfg.deviation_std)
    ratio = np.clip(h / cfg.pointing_cap, 0.0, 1.0)
    return ratio ** (cfg.pointing_shape**2) * mass


def _contact_weight(u: float, cfg: NetworkConfig) -> float:
    """
    u = (1 - cos θ_c)/2 치환에서의 최근접 위성 밀도 N (1 - u)^{N-1}

    d_s² = (R_s - R_H)² + 4 R_H R_s u 이므로 f_{d_s} dd = N (1 - u)^{N-1} du
    """
    n = cfg.sat_count
    return n * math.exp((n - 1) * math.log1p(-u)) if u < 1.0 else 0.0


def _contact_upper(cfg: NetworkConfig, full_support: bool) -> float:
    return 1.0 if full_support else 1.0 - visible_contact_cdf_value(cfg)


def ds_moment(p: float, cfg: NetworkConfig, full_support: bool = False) -> float:
    """
    ∫ d^p f_{d_s}(d) dd (가시 구간으로 절단, 재정규화 없음)

    full_support=True 이면 구 전체 [R_s - R_H, R_s + R_H].
    """
    if p < 0:
        raise DomainError(f"p 는 0 이상이어야 합니다: {p}")
    if p == 0:
        return 1.0 if full_support else 1.0 - blockage_probability(cfg)
    upper = _contact_upper(cfg, full_support)
    value, _ = _integrate(
        lambda u: float(sat_distance_from_gap(2.0 * u, cfg)) ** p * _contact_weight(u, cfg),
        0.0,
        upper,
        epsrel=MOMENT_REL_TOL,
        points=_interior_points(1.0 / cfg.sat_count, upper),
        where="ds_moment",
    )
    return value


def _abdr_with_error(cfg: NetworkConfig) -> Tuple[float, float]:
    if cfg.hap_tx_power == 0:
        return 0.0, 0.0
    settings = get_settings()
    mass = cos_weighted_rayleigh_mass(cfg.deviation_std)
    exponent = 2.0 / cfg.pointing_shape**2
    peak_snr = cfg.hap_tx_power * cfg.fso_link_constant * cfg.pointing_cap**2

    def outer(half_gap: float) -> float:
        snr_scale = peak_snr / float(sat_distance_from_gap(2.0 * half_gap, cfg)) ** 2
        # u = (h/A₀)^{η²} 치환으로 f_{h_FSO} dh = M du
        inner, _ = _integrate(
            lambda u: math.log1p(u**exponent * snr_scale),
            0.0,
            1.0,
            epsrel=0.1 * settings.quad_rel_tol,
            where="abdr_inner",
        )
        return mass * inner * _contact_weight(half_gap, cfg)

    upper = _contact_upper(cfg, full_support=False)
    value, error = _integrate(
        outer,
        0.0,
        upper,
        epsrel=settings.quad_rel_tol,
        points=_interior_points(1.0 / cfg.sat_count, upper),
        where="abdr",
    )
    prefactor = cfg.fso_bandwidth / LN2
    return prefactor * value, prefactor * error


def abdr(cfg: NetworkConfig) -> float:
    """(B_FSO/ln2) ∬ f_h f_{d_s} ln(1 + γ_s) dh dt  [bit/s]"""
    return _abdr_with_error(cfg)[0]


# ---------------------------------------------------------------------------
# BREP
# ---------------------------------------------------------------------------


def brep_ceiling(cfg: NetworkConfig, fso_mode: FsoMode = "deficit_at_cap") -> float:
    """P_H^t → ∞ 극한의 BREP (생존 함수 1 - F 또는 M - F)"""
    if fso_mode == "deficit_at_zero":
        return cos_weighted_rayleigh_mass(cfg.deviation_std)
    return 1.0


def truncate_series(terms: np.ndarray, rel_tol: float) -> SeriesResult:
    """|다음 항| < rel_tol·|부분합| 에서 멈추는 부분합. 항을 다 쓰면 converged=False"""
    total = float(terms[0])
    for n in range(1, len(terms)):
        term = float(terms[n])
        if abs(term) < rel_tol * abs(total):
            return SeriesResult(value=total, terms_used=n, truncation_bound=abs(term))
        total += term
    return SeriesResult(
        value=total,
        terms_used=len(terms),
        truncation_bound=abs(float(terms[-1])),
        converged=False,
    )


def _with_tail(
    series: SeriesResult, terms: np.ndarray, exponents: np.ndarray, r: float
) -> SeriesResult:
    """
    상한에서 잘린 급수에 꼬리 추정치를 더함

    n 이 크면 e^{-E_n} 이 거의 기하적으로 줄어들어 항이 n^{-r-1} 보다 빨리
    감소합니다. 마지막 두 지수의 비율을 이어 씁니다.
    """
    n = len(terms) - 1
    decay = math.exp(exponents[-2] - exponents[-1]) if n >= 1 else 1.0
    tail = binomial_series_tail(r, n, float(terms[-1]), decay)
    logger.info(
        "BREP 급수 %d항에서 잘림: 꼬리 추정 %.3e 보정 (부분합 %.6e, 감쇠비 %.4f)",
        len(terms),
        tail,
        series.value,
        decay,
    )
    return SeriesResult(
        value=series.value + tail,
        terms_used=series.terms_used,
        truncation_bound=series.truncation_bound,
        converged=False,
        tail_estimate=tail,
    )


@dataclass(frozen=True)
class BrepCurve:
    """
    BREP(P) = ceiling - coefficient · P^{-η²/2}

    ε^{η²} 만 P_H^t 에 의존하므로 나머지 인자를 한 번 계산해 둡니다.
    """

    ceiling: float
    coefficient: float
    exponent: float
    series: SeriesResult
    quad_error: float

    def raw(self, power_w: float) -> float:
        if power_w <= 0:
            return -math.inf
        return self.ceiling - self.coefficient * power_w ** (-self.exponent)

    def at(self, power_w: float) -> float:
        raw = self.raw(power_w)
        value = min(max(raw, 0.0), 1.0)
        if value != raw and power_w > 0:
            logger.debug("BREP 클램프: raw=%.6e → %.6e", raw, value)
        return value

    def inverse(self, target: float) -> float:
        """BREP(P) = target 의 닫힌 형태 해 P [W]"""
        if target >= self.ceiling:
            return math.inf
        if self.coefficient == 0:
            return 0.0
        return (self.coefficient / (self.ceiling - target)) ** (1.0 / self.exponent)


def _reference_config(cfg: NetworkConfig) -> NetworkConfig:
    # 캐시 키에서 송신 전력 제외
    return cfg.model_copy(update={"hap_tx_power": 1.0})


def brep_curve(cfg: NetworkConfig, fso_mode: FsoMode = "deficit_at_cap") -> BrepCurve:
    return _brep_curve_cached(_reference_config(cfg), fso_mode)


@lru_cache(maxsize=128)
def _brep_curve_cached(cfg: NetworkConfig, fso_mode: FsoMode) -> BrepCurve:
    settings = get_settings()
    eta_sq = cfg.pointing_shape**2
    r = 0.5 * eta_sq
    count = settings.series_max_terms
    c = cfg.rf_bandwidth / cfg.fso_bandwidth * (r - np.arange(count))

    geom = derive_geometry(cfg)
    if cfg.user_density == 0 or geom.one_minus_cos_theta_max == 0:
        exponents = np.zeros(count)
        quad_error = 0.0
    else:
        # ∫ [1 - E e^{c𝓩}] sinθ dθ = -c ∫∫ e^{cz} F̄ dz dt
        integral, quad_error = _angular_integral(cfg, c, lambda value: -c * value)
        exponents = _area_prefactor(cfg) * np.asarray(integral)

    terms = gen_binom_coeffs(r, count) * (-1.0) ** np.arange(count) * np.exp(-exponents)
    series = truncate_series(terms, settings.series_rel_tol)
    if not series.converged:
        series = _with_tail(series, terms, exponents, r)

    # ε^{η²} = (16π²σ_s² / (λ²υ² P G_H^t G_s))^{η²/2}, P = 1 W 기준
    epsilon_sq = 1.0 / cfg.fso_link_constant
    mass = cos_weighted_rayleigh_mass(cfg.deviation_std)
    coefficient = (
        mass
        / cfg.pointing_cap**eta_sq
        * epsilon_sq**r
        * ds_moment(eta_sq, cfg)
        * series.value
    )
    logger.debug(
        "BREP 곡선: coefficient=%.6e, 급수 %d항, 오차 한계 %.3e",
        coefficient,
        series.terms_used,
        series.truncation_bound,
    )
    return BrepCurve(
        ceiling=brep_ceiling(cfg, fso_mode),
        coefficient=coefficient,
        exponent=r,
        series=series,
        quad_error=quad_error,
    )


def brep(cfg: NetworkConfig, fso_mode: FsoMode = "deficit_at_cap") -> float:
    """백홀 전송률 초과 확률, [0, 1] 로 제한"""
    return brep_curve(cfg, fso_mode).at(cfg.hap_tx_power)


# ---------------------------------------------------------------------------
# 묶음
# ---------------------------------------------------------------------------


def analytic_metrics(
    cfg: NetworkConfig, fso_mode: FsoMode = "deficit_at_cap"
) -> AnalyticMetrics:
    aadr_value, aadr_error = _aadr_with_error(cfg)
    abdr_value, abdr_error = _abdr_with_error(cfg)
    curve = brep_curve(cfg, fso_mode)
    brep_raw = curve.raw(cfg.hap_tx_power)
    brep_value = curve.at(cfg.hap_tx_power)
    diagnostics = AnalyticDiagnostics(
        aadr_quad_error=aadr_error,
        abdr_quad_error=abdr_error,
        series_terms=curve.series.terms_used,
        series_truncation_bound=curve.series.truncation_bound,
        series_converged=curve.series.converged,
        series_tail_estimate=curve.series.tail_estimate,
        brep_raw=brep_raw if math.isfinite(brep_raw) else -1.0,
        brep_clamped=brep_value != brep_raw,
        brep_ceiling=curve.ceiling,
        alzer_mean_ratio=alzer_mean_ratio(cfg.rician_shape),
    )
    logger.info(
        "해석 지표: AADR=%.4e bit/s, ABDR=%.4e bit/s, BREP=%.4f",
        aadr_value,
        abdr_value,
        brep_value,
    )
    return AnalyticMetrics(
        aadr=aadr_value,
        abdr=abdr_value,
        brep=brep_value,
        blockage_prob=blockage_probability(cfg),
        fso_mode=fso_mode,
        config_hash=config_hash(cfg),
        diagnostics=diagnostics,
    )
