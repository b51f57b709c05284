import logging
import math

import numpy as np
import pytest
from scipy import integrate

from app.core.errors import DomainError, QuadratureError
from app.services import analytic_metrics as am
from app.services.network_model import dbw_to_watts, derive_geometry, with_overrides
from app.services.special_functions import alzer_mean_ratio, cos_weighted_rayleigh_mass
from app.services.stochastic_geometry import (
    blockage_probability,
    mean_interference,
    nearest_sat_distance_pdf,
    sample_interference,
    sample_nearest_distances,
    sample_rf_fade,
)


def _empirical_z(cfg, theta, size, seed):
    """극각 θ 사용자의 SINR 표본 (간섭은 나머지 PPP 사용자)"""
    geom = derive_geometry(cfg)
    rng = np.random.default_rng(seed)
    interference = sample_interference(rng, cfg, geom, size)
    fade = sample_rf_fade(rng, cfg.rician_shape, cfg.rician_scale, size)
    distance = am.make_z_context(theta, cfg).distance
    signal = cfg.rf_link_constant * fade * distance ** (-cfg.path_loss_exponent)
    return signal / (cfg.hap_noise + interference)


# ---------------------------------------------------------------------------
# 총 수신 전력 Laplace 변환
# ---------------------------------------------------------------------------


def test_laplace_at_zero_and_shape(cfg, geom):
    assert am.laplace_interference(0.0, cfg) == pytest.approx(1.0, abs=1e-15)
    mean = mean_interference(cfg, geom)
    s = np.linspace(0.2, 5.0, 25) / mean
    values = am.laplace_interference(s, cfg)
    assert np.all(np.diff(values) < 0)
    # 완전 단조 함수 → 로그 볼록 (등간격 격자의 2차 차분)
    assert np.all(np.diff(np.log(values), 2) >= -1e-10)


def test_laplace_first_order_is_campbell_mean(cfg, geom):
    mean = mean_interference(cfg, geom)
    s = 1e-5 / mean
    assert float(am.laplace_exponent(s, cfg)[0]) == pytest.approx(1e-5, rel=1e-3)


def test_laplace_matches_monte_carlo(cfg, geom):
    samples = sample_interference(np.random.default_rng(17), cfg, geom, 40_000)
    mean = mean_interference(cfg, geom)
    s = np.geomspace(0.01, 3.0, 5) / mean
    analytic = am.laplace_interference(s, cfg)
    empirical = np.exp(-np.outer(s, samples)).mean(axis=1)
    np.testing.assert_allclose(analytic, empirical, rtol=0.01)


def test_laplace_matches_scalar_quadrature(cfg, geom):
    mean = mean_interference(cfg, geom)
    prefactor = 2 * math.pi * cfg.user_density * cfg.earth_radius**2
    scale = cfg.rician_scale * cfg.rf_link_constant
    radial = 2 * cfg.earth_radius * geom.hap_sphere_radius

    def oracle(s):
        def integrand(t):
            gain = (geom.d_min**2 + radial * t) ** (-0.5 * cfg.path_loss_exponent)
            return -math.expm1(-cfg.rician_shape * math.log1p(s * scale * gain))

        value, _ = integrate.quad(
            integrand,
            0.0,
            geom.one_minus_cos_theta_max,
            epsabs=0.0,
            epsrel=1e-12,
            limit=200,
        )
        return prefactor * value

    s = np.array([1e-3, 0.3, 4.0]) / mean
    expected = [oracle(v) for v in s]
    np.testing.assert_allclose(am.laplace_exponent(s, cfg), expected, rtol=1e-7)


def test_tabulated_laplace_matches_direct(cfg, geom):
    s_min, s_max = am._laplace_s_range(cfg, geom)
    s = np.geomspace(s_min * 3, s_max / 3, 17)
    np.testing.assert_allclose(
        am.tabulated_laplace_exponent(s, cfg), am.laplace_exponent(s, cfg), rtol=1e-5
    )
    # 표 하한 아래는 s E[𝓘]
    tiny = s_min / 100
    mean = mean_interference(cfg, geom)
    assert am.tabulated_laplace_exponent(tiny, cfg)[0] == pytest.approx(tiny * mean, rel=1e-6)
    # 표 상한 위는 직접 적분
    assert am.tabulated_laplace_exponent(s_max * 4, cfg)[0] == pytest.approx(
        am.laplace_exponent(s_max * 4, cfg)[0], rel=1e-12
    )


def test_divergent_integral_raises_quadrature_error():
    with pytest.raises(QuadratureError):
        am._integrate(lambda x: 1.0 / x, 0.0, 1.0, epsrel=1e-10, where="divergent")


def test_laplace_rejects_negative_argument(cfg):
    with pytest.raises(DomainError):
        am.laplace_exponent(-1.0, cfg)


# ---------------------------------------------------------------------------
# 𝓩 CCDF
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("fraction", [0.0, 0.5, 1.0])
def test_ccdf_matches_empirical_exact_alzer(cfg, geom, fraction):
    exact = with_overrides(cfg, rician_shape=1)
    theta = fraction * geom.theta_max
    z_samples = _empirical_z(exact, theta, 20_000, seed=7)
    grid = np.linspace(0.0, np.quantile(z_samples, 0.99), 20)
    ctx = am.make_z_context(theta, exact)
    analytic = am.ccdf_Z(grid, ctx, exact)
    empirical = (z_samples[None, :] > grid[:, None]).mean(axis=1)
    assert np.max(np.abs(analytic - empirical)) < 0.02


@pytest.mark.parametrize("fraction", [0.0, 1.0])
def test_ccdf_alzer_gap_for_default_shape(cfg, geom, fraction):
    theta = fraction * geom.theta_max
    z_samples = _empirical_z(cfg, theta, 20_000, seed=8)
    grid = np.linspace(0.0, np.quantile(z_samples, 0.99), 20)
    analytic = am.ccdf_Z(grid, am.make_z_context(theta, cfg), cfg)
    empirical = (z_samples[None, :] > grid[:, None]).mean(axis=1)
    # m₁ > 1 에서 Alzer CCDF 는 위쪽 경계 (Gamma CDF 차이 최대 ≈ 0.026)
    assert np.min(analytic - empirical) > -0.012
    assert np.max(analytic - empirical) < 0.04


def test_ccdf_bounds(cfg, geom):
    ctx = am.make_z_context(0.3 * geom.theta_max, cfg)
    values = am.ccdf_Z(np.linspace(0.0, 1.0, 50), ctx, cfg)
    assert values[0] == pytest.approx(1.0)
    assert np.all((values >= 0) & (values <= 1))
    assert np.all(np.diff(values) <= 1e-9)
    with pytest.raises(DomainError):
        am.ccdf_Z(1.5, ctx, cfg)
    with pytest.raises(DomainError):
        am.make_z_context(2 * geom.theta_max, cfg)


def test_mgf_matches_monte_carlo(cfg, geom):
    exact = with_overrides(cfg, rician_shape=1)
    theta = 0.2 * geom.theta_max
    z_samples = _empirical_z(exact, theta, 20_000, seed=9)
    ctx = am.make_z_context(theta, exact)
    assert am.mgf_Z(0.0, ctx, exact) == pytest.approx(1.0)
    for c in (-5.0, -0.5, 0.005):
        assert am.mgf_Z(c, ctx, exact) == pytest.approx(np.exp(c * z_samples).mean(), abs=5e-3)


# ---------------------------------------------------------------------------
# AADR
# ---------------------------------------------------------------------------


def test_aadr_is_linear_in_density_when_noise_limited(cfg):
    sparse = with_overrides(cfg, user_density=1e-19)
    doubled = with_overrides(cfg, user_density=2e-19)
    geom = derive_geometry(sparse)
    # 잡음 한정에서는 사용자마다 ∫₀¹ F̄ dz ≈ 1
    per_user = sparse.rf_bandwidth / math.log(2.0)
    assert am.aadr(sparse) == pytest.approx(geom.mean_user_count * per_user, rel=1e-3)
    assert am.aadr(doubled) / am.aadr(sparse) == pytest.approx(2.0, rel=2e-3)


def test_aadr_interference_limited_scale(cfg):
    """간섭 한정이면 Σ SINR ≈ 1 이라 AADR ≈ B_RF/ln2 × Alzer 평균 비율"""
    value = am.aadr(cfg)
    expected = cfg.rf_bandwidth / math.log(2.0) * alzer_mean_ratio(cfg.rician_shape)
    assert value == pytest.approx(expected, rel=0.05)


def test_aadr_zero_density(cfg):
    assert am.aadr(with_overrides(cfg, user_density=0.0)) == 0.0


# ---------------------------------------------------------------------------
# FSO 페이딩 분포 / ABDR
# ---------------------------------------------------------------------------


def test_fso_fade_density_mass(cfg):
    total, _ = integrate.quad(
        lambda h: float(am.fso_fade_pdf(h, cfg)), 0.0, cfg.pointing_cap,
        epsabs=1e-14, epsrel=1e-12, limit=200,
    )
    mass = cos_weighted_rayleigh_mass(cfg.deviation_std)
    assert total == pytest.approx(mass, rel=1e-8)
    assert float(am.fso_fade_cdf(cfg.pointing_cap * 2, cfg)) == pytest.approx(mass)


def test_ds_moments(cfg):
    assert am.ds_moment(0, cfg) == pytest.approx(1.0 - blockage_probability(cfg))
    gap = cfg.sat_shell_radius - cfg.hap_sphere_radius
    expected_sq = gap**2 + 4 * cfg.hap_sphere_radius * cfg.sat_shell_radius / (cfg.sat_count + 1)
    assert am.ds_moment(2, cfg, full_support=True) == pytest.approx(expected_sq, rel=1e-9)

    lower = gap
    upper = cfg.sat_shell_radius + cfg.hap_sphere_radius
    first, _ = integrate.quad(
        lambda d: d * float(nearest_sat_distance_pdf(d, cfg, full_support=True)),
        lower, upper, points=[lower + 1e5, lower + 1e6], epsabs=0.0, epsrel=1e-11, limit=500,
    )
    assert am.ds_moment(1, cfg, full_support=True) == pytest.approx(first, rel=1e-8)
    with pytest.raises(DomainError):
        am.ds_moment(-1, cfg)


def test_abdr_low_snr_is_linear_in_power(cfg):
    base = am.abdr(cfg)
    assert 1e4 < base < 1e6
    ratio = am.abdr(with_overrides(cfg, hap_tx_power=10 * cfg.hap_tx_power)) / base
    assert 9.9 <= ratio <= 10.0


def test_abdr_zero_power(cfg):
    assert am.abdr(with_overrides(cfg, hap_tx_power=0.0)) == 0.0


@pytest.mark.parametrize(
    "field, values",
    [("sat_count", [100, 300, 500]), ("sat_altitude", [500e3, 1000e3, 1500e3])],
)
def test_abdr_monotone_in_constellation(cfg, field, values):
    rates = [am.abdr(with_overrides(cfg, **{field: v})) for v in values]
    if field == "sat_count":
        assert rates[0] < rates[1] < rates[2]
    else:
        assert rates[0] > rates[1] > rates[2]


# ---------------------------------------------------------------------------
# BREP
# ---------------------------------------------------------------------------


def test_truncate_series():
    result = am.truncate_series(0.5 ** np.arange(80), 1e-12)
    assert result.converged
    assert result.value == pytest.approx(2.0, rel=1e-11)
    stubborn = am.truncate_series(np.ones(10), 1e-12)
    assert not stubborn.converged
    assert stubborn.terms_used == 10
    assert stubborn.value == pytest.approx(10.0)


def test_brep_curve_shape(cfg):
    curve = am.brep_curve(cfg)
    assert curve.ceiling == 1.0
    assert curve.exponent == pytest.approx(cfg.pointing_shape**2 / 2)
    assert curve.coefficient > 0
    power = curve.inverse(0.5)
    assert curve.at(power) == pytest.approx(0.5, abs=1e-9)
    assert curve.at(power * 10) > curve.at(power) > curve.at(power / 10)
    assert curve.at(1e-3) == 0.0
    assert curve.inverse(1.0) == math.inf
    # 송신 전력은 캐시 키가 아님
    assert am.brep_curve(with_overrides(cfg, hap_tx_power=5.0)) is curve


def test_brep_ceiling_modes(cfg):
    mass = cos_weighted_rayleigh_mass(cfg.deviation_std)
    assert am.brep_ceiling(cfg, "deficit_at_cap") == 1.0
    assert am.brep_ceiling(cfg, "deficit_at_zero") == pytest.approx(mass)
    at_zero = am.brep_curve(cfg, "deficit_at_zero")
    assert at_zero.ceiling == pytest.approx(mass)
    assert at_zero.coefficient == pytest.approx(am.brep_curve(cfg).coefficient)


def test_brep_power_gap_between_targets(cfg):
    """BREP 0.5 → 0.9 에 필요한 전력 차이 = 10 log10(5) / (η²/2) dB"""
    curve = am.brep_curve(cfg)
    gap_db = 10 * math.log10(curve.inverse(0.9) / curve.inverse(0.5))
    assert gap_db == pytest.approx(10 * math.log10(5.0) / curve.exponent, rel=1e-9)
    assert gap_db == pytest.approx(13.83, abs=0.01)


@pytest.mark.parametrize(
    "field, values",
    [("sat_count", [100, 300, 500]), ("sat_altitude", [500e3, 1000e3, 1500e3])],
)
def test_brep_monotone_in_constellation(cfg, field, values):
    power = 1e7
    raw = [am.brep_curve(with_overrides(cfg, **{field: v})).raw(power) for v in values]
    if field == "sat_count":
        assert raw[0] < raw[1] < raw[2]
    else:
        assert raw[0] > raw[1] > raw[2]


def test_analytic_bundle(cfg):
    result = am.analytic_metrics(cfg)
    assert result.brep == 0.0
    assert result.diagnostics.brep_clamped
    assert result.diagnostics.brep_raw < 0
    assert result.blockage_prob == pytest.approx(blockage_probability(cfg))
    assert result.diagnostics.alzer_mean_ratio == pytest.approx(alzer_mean_ratio(2))
    assert result.diagnostics.series_terms > 1
    assert result.aadr == pytest.approx(am.aadr(cfg))
    assert result.abdr == pytest.approx(am.abdr(cfg))


def test_mean_satellite_distance_shrinks_with_constellation(cfg):
    means = []
    for count, expected_km in [(100, 1292.6), (300, 857.2), (500, 735.6)]:
        sized = with_overrides(cfg, sat_count=count)
        mean = am.ds_moment(1, sized, full_support=True)
        assert mean / 1e3 == pytest.approx(expected_km, rel=0.015)
        samples = sample_nearest_distances(np.random.default_rng(count), sized, 50_000)
        assert samples.mean() == pytest.approx(mean, rel=0.01)
        means.append(mean)
    assert means[0] > means[1] > means[2]


def test_brep_series_tail_replaces_truncation_warning(cfg, caplog):
    am._brep_curve_cached.cache_clear()
    with caplog.at_level(logging.INFO, logger=am.logger.name):
        curve = am.brep_curve(cfg)
    series = curve.series
    assert not series.converged
    # 0 < r < 1 이면 n ≥ 1 의 항은 모두 음수
    assert series.tail_estimate < 0
    assert abs(series.tail_estimate) < 0.05 * abs(series.value)
    assert not [r for r in caplog.records if r.levelno >= logging.WARNING]
    assert any("꼬리 추정" in r.getMessage() for r in caplog.records)
    diagnostics = am.analytic_metrics(cfg).diagnostics
    assert diagnostics.series_tail_estimate == series.tail_estimate


def test_brep_nondecreasing_in_power(cfg):
    powers_dbw = np.linspace(0.0, 30.0, 10)
    values = [am.brep(with_overrides(cfg, hap_tx_power=dbw_to_watts(p))) for p in powers_dbw]
    assert np.all(np.diff(values) >= 0)
    curve = am.brep_curve(cfg)
    raw = [curve.raw(dbw_to_watts(p)) for p in powers_dbw]
    assert np.all(np.diff(raw) > 0)
