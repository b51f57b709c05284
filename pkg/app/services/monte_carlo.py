"""
Monte Carlo 시뮬레이션 서비스

라운드마다 PPP 사용자와 BPP 최근접 위성을 새로 뽑고 링크 예산으로
접속 합 전송률과 백홀 전송률을 계산합니다. 라운드 i 의 난수열은
SeedSequence(master_seed, spawn_key=(i,)) 이므로 실행 순서/병렬도와 무관합니다.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.core.config import get_settings
from app.core.errors import ConfigError
from app.models.network import DerivedGeometry, NetworkConfig
from app.models.realizations import RoundOutcome, SatelliteRealization, UserRealization
from app.models.results import Estimate, FsoMode, MetricsEstimate, SatelliteMethod
from app.services.network_model import config_hash, derive_geometry
from app.services.stochastic_geometry import (
    rf_received_power,
    sample_nearest_satellite,
    sample_users,
)
from app.services.storage import result_storage

logger = logging.getLogger(__name__)

LN2 = math.log(2.0)
Z_95 = 1.959963984540054
MIN_ESTIMATE_ROUNDS = 100


def round_stream(master_seed: int, round_index: int) -> np.random.Generator:
    """라운드 전용 독립 난수열 (SeedSequence.spawn 의 i 번째 자식과 동일)"""
    return np.random.default_rng(
        np.random.SeedSequence(master_seed, spawn_key=(round_index,))
    )


def evaluate_round(
    users: UserRealization,
    satellite: SatelliteRealization,
    cfg: NetworkConfig,
    round_index: int = 0,
) -> RoundOutcome:
    """주어진 실현값의 링크 예산 (순수 함수)"""
    powers = rf_received_power(cfg, users.distance, users.rf_fade_power)
    interference = float(powers.sum())
    others = np.maximum(interference - powers, 0.0)
    sinr = powers / (cfg.hap_noise + others)
    access_exact = cfg.rf_bandwidth * float(np.log1p(sinr).sum()) / LN2
    access_linear = cfg.rf_bandwidth * float(sinr.sum()) / LN2

    blocked = not satellite.visible
    if blocked:
        backhaul = 0.0
    else:
        snr = (
            cfg.hap_tx_power
            * cfg.fso_link_constant
            * satellite.fso_fade**2
            / satellite.distance**2
        )
        backhaul = cfg.fso_bandwidth * math.log1p(snr) / LN2

    return RoundOutcome(
        round_index=round_index,
        user_count=len(users),
        aggregate_interference=interference,
        access_sum_rate=access_exact,
        access_sum_rate_linear=access_linear,
        backhaul_rate=backhaul,
        blocked=blocked,
        # 엄격한 부등호: 둘 다 0 이면 초과 아님
        exceeded=backhaul > access_exact,
    )


def run_round(
    rng: np.random.Generator,
    cfg: NetworkConfig,
    geom: DerivedGeometry,
    method: SatelliteMethod = "contact_angle",
    fso_mode: FsoMode = "deficit_at_cap",
    round_index: int = 0,
) -> RoundOutcome:
    users = sample_users(rng, cfg, geom)
    satellite = sample_nearest_satellite(rng, cfg, method, fso_mode)
    return evaluate_round(users, satellite, cfg, round_index)


def _run_block(
    cfg: NetworkConfig,
    master_seed: int,
    indices: Sequence[int],
    method: SatelliteMethod,
    fso_mode: FsoMode,
) -> List[RoundOutcome]:
    geom = derive_geometry(cfg)
    return [
        run_round(round_stream(master_seed, i), cfg, geom, method, fso_mode, i)
        for i in indices
    ]


def simulate_rounds(
    cfg: NetworkConfig,
    rounds: int,
    master_seed: int,
    workers: int = 1,
    method: Optional[SatelliteMethod] = None,
    fso_mode: Optional[FsoMode] = None,
) -> List[RoundOutcome]:
    """라운드 결과 목록 (round_index 오름차순)"""
    settings = get_settings()
    method = method or settings.mc_satellite_method
    fso_mode = fso_mode or settings.fso_deficit_mode
    indices = list(range(rounds))

    if workers <= 1 or rounds < 2 * workers:
        outcomes = _run_block(cfg, master_seed, indices, method, fso_mode)
    else:
        block = math.ceil(rounds / (workers * 4))
        blocks = [indices[i : i + block] for i in range(0, rounds, block)]
        logger.info("병렬 시뮬레이션: %d workers, %d blocks", workers, len(blocks))
        outcomes = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_run_block, cfg, master_seed, b, method, fso_mode)
                for b in blocks
            ]
            for future in futures:
                outcomes.extend(future.result())
        outcomes.sort(key=lambda outcome: outcome.round_index)
    return outcomes


def _estimate(values: np.ndarray) -> Estimate:
    if values.size < 2:
        return Estimate(mean=float(values.mean()) if values.size else 0.0, half_width=0.0)
    half_width = Z_95 * float(values.std(ddof=1)) / math.sqrt(values.size)
    return Estimate(mean=float(values.mean()), half_width=half_width)


def summarize(
    outcomes: Sequence[RoundOutcome], seed: int, cfg_hash: str = ""
) -> MetricsEstimate:
    """라운드 평균과 95% 정규 근사 신뢰구간"""
    ordered = sorted(outcomes, key=lambda outcome: outcome.round_index)
    access = np.array([o.access_sum_rate for o in ordered])
    access_linear = np.array([o.access_sum_rate_linear for o in ordered])
    backhaul = np.array([o.backhaul_rate for o in ordered])
    exceeded = np.array([o.exceeded for o in ordered], dtype=float)
    exceeded_linear = (backhaul > access_linear).astype(float)
    blocked = np.array([o.blocked for o in ordered], dtype=float)
    users = np.array([o.user_count for o in ordered], dtype=float)
    return MetricsEstimate(
        aadr=_estimate(access),
        aadr_linear=_estimate(access_linear),
        abdr=_estimate(backhaul),
        brep=_estimate(exceeded),
        brep_linear=_estimate(exceeded_linear),
        blockage_frequency=float(blocked.mean()) if blocked.size else 0.0,
        mean_user_count=float(users.mean()) if users.size else 0.0,
        rounds=len(ordered),
        seed=seed,
        config_hash=cfg_hash,
    )


def run_simulation(
    cfg: NetworkConfig,
    rounds: Optional[int] = None,
    master_seed: Optional[int] = None,
    workers: Optional[int] = None,
    method: Optional[SatelliteMethod] = None,
    fso_mode: Optional[FsoMode] = None,
) -> Tuple[MetricsEstimate, List[RoundOutcome]]:
    """
    Monte Carlo 추정치와 라운드 결과

    같은 (cfg, rounds, master_seed) 이면 workers 와 무관하게 같은 결과입니다.
    """
    settings = get_settings()
    rounds = settings.mc_rounds if rounds is None else rounds
    master_seed = settings.mc_master_seed if master_seed is None else master_seed
    workers = settings.mc_workers if workers is None else workers
    if rounds < MIN_ESTIMATE_ROUNDS:
        raise ConfigError("rounds", f"{MIN_ESTIMATE_ROUNDS} 이상이어야 합니다: {rounds}")

    logger.info("Monte Carlo 시작: %d rounds, seed=%d", rounds, master_seed)
    outcomes = simulate_rounds(cfg, rounds, master_seed, workers, method, fso_mode)
    estimate = summarize(outcomes, master_seed, config_hash(cfg))
    logger.info(
        "Monte Carlo 완료: AADR=%.4e, ABDR=%.4e, BREP=%.4f, 가림 빈도=%.2e",
        estimate.aadr.mean,
        estimate.abdr.mean,
        estimate.brep.mean,
        estimate.blockage_frequency,
    )
    return estimate, outcomes


def export_trace(outcomes: Iterable[RoundOutcome], path: Union[str, Path]) -> Path:
    return result_storage.save_trace(outcomes, path)


def load_trace(path: Union[str, Path]) -> List[RoundOutcome]:
    return result_storage.load_trace(path)


def write_summary(estimate: MetricsEstimate, path: Union[str, Path]) -> Path:
    return result_storage.save_model(estimate, path)


def estimate_metrics(
    cfg: NetworkConfig,
    rounds: Optional[int] = None,
    master_seed: Optional[int] = None,
    workers: Optional[int] = None,
    method: Optional[SatelliteMethod] = None,
    fso_mode: Optional[FsoMode] = None,
) -> MetricsEstimate:
    return run_simulation(cfg, rounds, master_seed, workers, method, fso_mode)[0]
