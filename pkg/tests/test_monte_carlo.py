import math

import numpy as np
import pytest

from app.core.errors import ConfigError
from app.models.realizations import RoundOutcome, SatelliteRealization, UserRealization
from app.services import monte_carlo as mc
from app.services.network_model import config_hash, with_overrides
from app.services.stochastic_geometry import blockage_probability


def _users(distances, fades) -> UserRealization:
    n = len(distances)
    return UserRealization(
        polar_angle=np.zeros(n),
        azimuth=np.zeros(n),
        distance=np.asarray(distances, dtype=float),
        rf_fade_power=np.asarray(fades, dtype=float),
    )


def _satellite(visible=True, distance=500e3, fade=0.01) -> SatelliteRealization:
    return SatelliteRealization(
        contact_angle=0.0,
        distance=distance,
        visible=visible,
        fso_fade=fade,
        deviation_angle=0.0,
    )


def test_evaluate_round_link_budget(cfg):
    outcome = mc.evaluate_round(_users([20e3, 40e3], [1.0, 2.0]), _satellite(), cfg, 7)
    p1 = cfg.rf_link_constant * 1.0 / 20e3**2
    p2 = cfg.rf_link_constant * 2.0 / 40e3**2
    sinr1 = p1 / (cfg.hap_noise + p2)
    sinr2 = p2 / (cfg.hap_noise + p1)
    access = cfg.rf_bandwidth * (math.log1p(sinr1) + math.log1p(sinr2)) / math.log(2)
    snr = cfg.hap_tx_power * cfg.fso_link_constant * 0.01**2 / 500e3**2
    backhaul = cfg.fso_bandwidth * math.log1p(snr) / math.log(2)

    assert outcome.round_index == 7
    assert outcome.user_count == 2
    assert outcome.aggregate_interference == pytest.approx(p1 + p2, rel=1e-12)
    assert outcome.access_sum_rate == pytest.approx(access, rel=1e-12)
    assert outcome.access_sum_rate_linear == pytest.approx(
        cfg.rf_bandwidth * (sinr1 + sinr2) / math.log(2), rel=1e-12
    )
    assert outcome.backhaul_rate == pytest.approx(backhaul, rel=1e-12)
    assert not outcome.blocked
    assert outcome.exceeded == (backhaul > access)


def test_blocked_round_has_no_backhaul(cfg):
    outcome = mc.evaluate_round(_users([30e3], [1.0]), _satellite(visible=False), cfg)
    assert outcome.blocked
    assert outcome.backhaul_rate == 0.0
    assert not outcome.exceeded


def test_empty_blocked_round_is_a_tie(cfg):
    outcome = mc.evaluate_round(_users([], []), _satellite(visible=False), cfg)
    assert outcome.user_count == 0
    assert outcome.access_sum_rate == 0.0
    # 0 > 0 은 거짓
    assert not outcome.exceeded


def test_round_streams_are_independent_of_order():
    forward = [mc.round_stream(42, i).random() for i in range(5)]
    backward = [mc.round_stream(42, i).random() for i in reversed(range(5))]
    assert forward == backward[::-1]
    assert len(set(forward)) == 5


def test_serial_and_parallel_runs_are_identical(cfg):
    serial, serial_outcomes = mc.run_simulation(cfg, rounds=200, master_seed=11, workers=1)
    parallel, parallel_outcomes = mc.run_simulation(cfg, rounds=200, master_seed=11, workers=4)
    assert serial == parallel
    assert serial_outcomes == parallel_outcomes
    assert [o.round_index for o in parallel_outcomes] == list(range(200))


def test_seed_changes_estimate(cfg):
    first = mc.estimate_metrics(cfg, rounds=100, master_seed=1)
    second = mc.estimate_metrics(cfg, rounds=100, master_seed=2)
    assert first.aadr.mean != second.aadr.mean
    assert first.seed == 1
    assert first.config_hash == config_hash(cfg)


def test_minimum_rounds(cfg):
    with pytest.raises(ConfigError) as info:
        mc.run_simulation(cfg, rounds=99, master_seed=1)
    assert info.value.key == "rounds"


def test_summarize_confidence_interval():
    outcomes = [
        RoundOutcome(
            round_index=i,
            user_count=10,
            aggregate_interference=1.0,
            access_sum_rate=float(i),
            access_sum_rate_linear=float(i),
            backhaul_rate=0.0,
            blocked=i % 2 == 0,
            exceeded=False,
        )
        for i in reversed(range(10))
    ]
    estimate = mc.summarize(outcomes, seed=3, cfg_hash="abc")
    values = np.arange(10.0)
    assert estimate.aadr.mean == pytest.approx(4.5)
    assert estimate.aadr.half_width == pytest.approx(
        1.959963984540054 * values.std(ddof=1) / math.sqrt(10)
    )
    assert estimate.blockage_frequency == pytest.approx(0.5)
    assert estimate.brep.mean == 0.0
    assert estimate.mean_user_count == pytest.approx(10.0)
    assert estimate.rounds == 10


def test_blockage_frequency_matches_analytic(cfg):
    sparse = with_overrides(cfg, sat_count=4)
    estimate = mc.estimate_metrics(sparse, rounds=2000, master_seed=5)
    assert estimate.blockage_frequency == pytest.approx(blockage_probability(sparse), abs=0.04)


def test_full_bpp_method_runs(cfg):
    estimate = mc.estimate_metrics(cfg, rounds=100, master_seed=9, method="full_bpp")
    assert estimate.abdr.mean > 0
    assert estimate.blockage_frequency == 0.0


def test_trace_and_summary_files(cfg, tmp_path):
    estimate, outcomes = mc.run_simulation(cfg, rounds=100, master_seed=4)
    trace = mc.export_trace(outcomes, tmp_path / "trace.csv")
    lines = trace.read_text(encoding="utf-8").splitlines()
    assert lines[0] == (
        "round_index,user_count,interference_W,access_rate_bps_exact,"
        "access_rate_bps_linear,backhaul_rate_bps,blocked,exceeded"
    )
    assert len(lines) == 101
    assert mc.load_trace(trace) == outcomes

    summary = mc.write_summary(estimate, tmp_path / "summary.json")
    from app.models.results import MetricsEstimate
    from app.services.storage import result_storage

    assert result_storage.load_model(MetricsEstimate, summary) == estimate


@pytest.mark.slow
def test_monte_carlo_agrees_with_abdr_at_constellation_variants(cfg):
    from app.services.analytic_metrics import abdr

    for variant in (cfg, with_overrides(cfg, sat_count=100, sat_altitude=1500e3)):
        estimate = mc.estimate_metrics(variant, rounds=10_000, master_seed=21, workers=4)
        analytic = abdr(variant)
        assert abs(analytic - estimate.abdr.mean) <= 0.01 * estimate.abdr.mean + estimate.abdr.half_width


def test_linearised_access_rate_bounds_exact_rate(cfg):
    _, outcomes = mc.run_simulation(cfg, rounds=300, master_seed=12)
    gaps = np.array([o.access_sum_rate_linear - o.access_sum_rate for o in outcomes])
    # ln(1 + γ) ≤ γ
    assert np.all(gaps >= 0)
    assert gaps.max() > 0


def test_summarize_linearised_exceedance():
    outcomes = [
        RoundOutcome(
            round_index=i,
            user_count=1,
            aggregate_interference=1.0,
            access_sum_rate=1.0,
            access_sum_rate_linear=1.0 + i,
            backhaul_rate=1.5,
            blocked=False,
            exceeded=True,
        )
        for i in range(4)
    ]
    estimate = mc.summarize(outcomes, seed=1, cfg_hash="abc")
    assert estimate.brep.mean == 1.0
    # 선형 접속률 1, 2, 3, 4 중 백홀 1.5 보다 작은 것은 첫 라운드뿐
    assert estimate.brep_linear.mean == pytest.approx(0.25)


def test_confidence_interval_shrinks_with_rounds(cfg):
    short = mc.estimate_metrics(cfg, rounds=500, master_seed=31)
    long = mc.estimate_metrics(cfg, rounds=2000, master_seed=31)
    assert short.abdr.half_width / long.abdr.half_width == pytest.approx(2.0, rel=0.2)
    assert short.aadr.half_width / long.aadr.half_width == pytest.approx(2.0, rel=0.2)
