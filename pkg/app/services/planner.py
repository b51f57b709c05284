"""
HAP 최소 송신 전력 계획, 파라미터 스윕, 해석/시뮬레이션 검증 서비스

전력 탐색은 해석 지표만 사용합니다 (결정적이고 빠름). 단조 증가하는 지표에 대해
dBW 축에서 구간을 넓힌 뒤 이분법으로 최소 전력을 찾습니다.
"""

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple

from app.core.config import get_settings
from app.core.errors import (
    ConfigError,
    ConfigMismatchError,
    DomainError,
    InfeasibleTargetError,
    SweepAxisError,
)
from app.models.network import NetworkConfig
from app.models.results import (
    AnalyticMetrics,
    AxisName,
    FsoMode,
    MetricComparison,
    MetricsEstimate,
    PowerPlanResult,
    SweepAxis,
    SweepCell,
    SweepGrid,
    SweepMetric,
    TargetKind,
    ValidationReport,
)
from app.services import analytic_metrics as am
from app.services.monte_carlo import estimate_metrics
from app.services.network_model import (
    config_hash,
    dbw_to_watts,
    watts_to_dbw,
    with_overrides,
)

logger = logging.getLogger(__name__)

AXIS_NAMES = ("sat_altitude", "sat_count", "hap_tx_power", "user_density")
POWER_METRICS = {"min_power_abdr_ratio": "abdr_ratio", "min_power_brep": "brep"}
MIN_VALIDATION_ROUNDS = 1000

# 검증 허용 오차 (이름, 종류, 값)
AADR_LINEAR_TOLERANCE = 0.015
AADR_EXACT_TOLERANCE = 0.05
ABDR_TOLERANCE = 0.01
BREP_TOLERANCE = 0.03


# ---------------------------------------------------------------------------
# 최소 전력 탐색
# ---------------------------------------------------------------------------


def _plan(
    kind: TargetKind, target: float, low_dbw: float, high_dbw: float, **fields
) -> PowerPlanResult:
    return PowerPlanResult(
        target_kind=kind,
        target_value=target,
        bracket_low_w=dbw_to_watts(low_dbw),
        bracket_high_w=dbw_to_watts(high_dbw),
        **fields,
    )


def solve_min_power(
    metric: Callable[[float], float],
    threshold: float,
    kind: TargetKind,
    target: float,
) -> PowerPlanResult:
    """
    metric(P) ≥ threshold 인 최소 P [W]

    metric 은 P 에 대해 단조 증가해야 합니다. 초기 구간 [power_low_dbw, power_high_dbw]
    에서 목표를 못 넘으면 power_expand_step_db 씩 power_cap_dbw 까지 넓힙니다.
    """
    settings = get_settings()
    low = settings.power_low_dbw
    high = settings.power_high_dbw

    if metric(dbw_to_watts(low)) >= threshold:
        value = metric(dbw_to_watts(low))
        logger.info("목표가 구간 하한 %.2f dBW 에서 이미 달성됨", low)
        return _plan(
            kind, target, low, low,
            min_power_w=dbw_to_watts(low),
            min_power_dbw=low,
            achieved_metric=value,
        )

    while metric(dbw_to_watts(high)) < threshold:
        if high >= settings.power_cap_dbw:
            plan = _plan(
                kind, target, low, high,
                feasible=False,
                achieved_metric=metric(dbw_to_watts(high)),
                reason=f"전력 상한 {settings.power_cap_dbw:.1f} dBW 에서도 목표 미달",
            )
            logger.warning("목표 달성 불가: %s", plan.reason)
            raise InfeasibleTargetError(plan.reason, plan=plan)
        low = high
        high = min(high + settings.power_expand_step_db, settings.power_cap_dbw)
        logger.info("탐색 구간 확장: [%.2f, %.2f] dBW", low, high)

    # 선형 전력 상대 폭 ≤ power_rel_tol 까지 dB 축 이분법
    width_db = 10.0 * math.log10(1.0 + settings.power_rel_tol)
    iterations = 0
    while high - low > width_db:
        middle = 0.5 * (low + high)
        if metric(dbw_to_watts(middle)) >= threshold:
            high = middle
        else:
            low = middle
        iterations += 1

    power = dbw_to_watts(high)
    return _plan(
        kind, target, low, high,
        min_power_w=power,
        min_power_dbw=high,
        iterations=iterations,
        achieved_metric=metric(power),
    )


def min_power_for_abdr_ratio(cfg: NetworkConfig, ratio: float) -> PowerPlanResult:
    """abdr(P) ≥ ratio · aadr 인 최소 HAP 송신 전력"""
    if not ratio > 0:
        raise DomainError(f"ratio 는 양수여야 합니다: {ratio}")
    access = am.aadr(cfg)
    if not math.isfinite(access):
        raise DomainError("AADR 가 유한하지 않습니다")

    def ratio_at(power_w: float) -> float:
        if access == 0:
            return math.inf
        return am.abdr(with_overrides(cfg, hap_tx_power=power_w)) / access

    plan = solve_min_power(ratio_at, ratio, "abdr_ratio", ratio)
    logger.info(
        "ABDR/AADR=%.3g 최소 전력: %.2f dBW (%d회 반복)",
        ratio,
        plan.min_power_dbw,
        plan.iterations,
    )
    return plan


def min_power_for_brep(
    cfg: NetworkConfig, target: float, fso_mode: FsoMode = "deficit_at_cap"
) -> PowerPlanResult:
    """brep(P) ≥ target 인 최소 HAP 송신 전력"""
    if not 0 < target < 1:
        raise DomainError(f"target 은 (0, 1) 범위여야 합니다: {target}")
    settings = get_settings()
    curve = am.brep_curve(cfg, fso_mode)
    if target >= curve.ceiling:
        plan = _plan(
            "brep", target, settings.power_low_dbw, settings.power_cap_dbw,
            feasible=False,
            achieved_metric=curve.ceiling,
            reason=f"BREP 상한 {curve.ceiling:.6f} 이상의 목표",
        )
        logger.warning("목표 달성 불가: %s", plan.reason)
        raise InfeasibleTargetError(plan.reason, plan=plan)

    plan = solve_min_power(curve.at, target, "brep", target)
    closed_form = curve.inverse(target)
    logger.debug(
        "BREP 닫힌 형태 역함수: %.4f dBW (이분법 %.4f dBW)",
        watts_to_dbw(closed_form),
        plan.min_power_dbw,
    )
    return plan


def min_power(
    cfg: NetworkConfig,
    kind: TargetKind,
    target: float,
    fso_mode: FsoMode = "deficit_at_cap",
) -> PowerPlanResult:
    if kind == "abdr_ratio":
        return min_power_for_abdr_ratio(cfg, target)
    return min_power_for_brep(cfg, target, fso_mode)


def mc_check(
    plan: PowerPlanResult,
    cfg: NetworkConfig,
    rounds: Optional[int] = None,
    seed: Optional[int] = None,
    fso_mode: Optional[FsoMode] = None,
) -> PowerPlanResult:
    """계획된 전력에서 Monte Carlo 로 지표를 다시 재고 목표와의 차이를 기록"""
    if not plan.feasible or plan.min_power_w is None:
        return plan
    planned = with_overrides(cfg, hap_tx_power=plan.min_power_w)
    estimate = estimate_metrics(planned, rounds, seed, fso_mode=fso_mode)
    if plan.target_kind == "brep":
        measured = estimate.brep.mean
    else:
        measured = (
            estimate.abdr.mean / estimate.aadr.mean if estimate.aadr.mean > 0 else math.inf
        )
    logger.info("Monte Carlo 재검증: 목표 %.4g, 측정 %.4g", plan.target_value, measured)
    return plan.model_copy(
        update={"mc_metric": measured, "mc_gap": measured - plan.target_value}
    )


# ---------------------------------------------------------------------------
# 스윕
# ---------------------------------------------------------------------------


def axis_override(name: AxisName, value: float) -> dict:
    """
    축 값 (인터페이스 단위) → with_overrides 인자

    sat_altitude [km], sat_count [개], hap_tx_power [dBW], user_density [/m²]
    """
    if name == "sat_altitude":
        return {"sat_altitude": value * 1e3}
    if name == "sat_count":
        if float(value) != int(value):
            raise SweepAxisError(f"sat_count 값은 정수여야 합니다: {value}")
        return {"sat_count": int(value)}
    if name == "hap_tx_power":
        return {"hap_tx_power": dbw_to_watts(value)}
    if name == "user_density":
        return {"user_density": value}
    raise SweepAxisError(f"지원하지 않는 스윕 축입니다: {name}")


def _check_axes(
    axis1: SweepAxis, axis2: SweepAxis, metric: SweepMetric, target: Optional[float]
) -> None:
    for axis in (axis1, axis2):
        if axis.name not in AXIS_NAMES:
            raise SweepAxisError(f"지원하지 않는 스윕 축입니다: {axis.name}")
        if not axis.values:
            raise SweepAxisError(f"축 '{axis.name}' 의 값이 비어 있습니다")
    if axis1.name == axis2.name:
        raise SweepAxisError("두 축의 이름이 같습니다")
    if metric in POWER_METRICS:
        if target is None:
            raise SweepAxisError(f"{metric} 스윕에는 target 이 필요합니다")
        if "hap_tx_power" in (axis1.name, axis2.name):
            raise SweepAxisError("최소 전력 스윕에 hap_tx_power 축을 쓸 수 없습니다")


def evaluate_cell(
    cfg: NetworkConfig,
    metric: SweepMetric,
    target: Optional[float],
    fso_mode: FsoMode = "deficit_at_cap",
) -> SweepCell:
    if metric in POWER_METRICS:
        try:
            plan = min_power(cfg, POWER_METRICS[metric], target, fso_mode)
        except InfeasibleTargetError as e:
            return SweepCell(feasible=False, value=None, plan=e.plan)
        return SweepCell(value=plan.min_power_dbw, plan=plan)
    if metric == "aadr":
        return SweepCell(value=am.aadr(cfg))
    if metric == "abdr":
        return SweepCell(value=am.abdr(cfg))
    return SweepCell(value=am.brep(cfg, fso_mode))


def _evaluate_cell_args(args: Tuple[NetworkConfig, str, Optional[float], str]) -> SweepCell:
    return evaluate_cell(*args)


def sweep(
    cfg: NetworkConfig,
    axis1: SweepAxis,
    axis2: SweepAxis,
    metric: SweepMetric,
    target: Optional[float] = None,
    fso_mode: FsoMode = "deficit_at_cap",
    workers: Optional[int] = None,
) -> SweepGrid:
    """
    axis1 × axis2 격자의 지표 또는 최소 전력 [dBW]

    모든 셀 설정을 먼저 만들어 축 오류는 평가 전에 드러납니다.
    달성 불가능한 셀은 feasible=False 로 표시하고 계속 진행합니다.
    """
    _check_axes(axis1, axis2, metric, target)
    workers = get_settings().sweep_workers if workers is None else workers

    configs: List[NetworkConfig] = []
    for v1 in axis1.values:
        for v2 in axis2.values:
            overrides = {**axis_override(axis1.name, v1), **axis_override(axis2.name, v2)}
            try:
                configs.append(with_overrides(cfg, **overrides))
            except ConfigError as e:
                raise SweepAxisError(f"축 값 ({v1}, {v2}) 이 잘못되었습니다: {e}") from e

    tasks = [(c, metric, target, fso_mode) for c in configs]
    logger.info(
        "스윕 시작: %s × %s (%d 셀), metric=%s",
        axis1.name,
        axis2.name,
        len(tasks),
        metric,
    )
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            flat = list(pool.map(_evaluate_cell_args, tasks))
    else:
        flat = [_evaluate_cell_args(task) for task in tasks]

    width = len(axis2.values)
    cells = [flat[i : i + width] for i in range(0, len(flat), width)]
    infeasible = sum(not cell.feasible for cell in flat)
    if infeasible:
        logger.warning("달성 불가능한 셀 %d개", infeasible)
    return SweepGrid(axis1=axis1, axis2=axis2, metric=metric, target=target, cells=cells)


# ---------------------------------------------------------------------------
# 검증
# ---------------------------------------------------------------------------


def _compare(
    name: str,
    analytic: float,
    mc: float,
    half_width: float,
    tolerance: float,
    kind: str,
    bias_factor: float = 1.0,
) -> MetricComparison:
    """|보정된 해석값 - MC| ≤ 허용 오차 + MC 95% 반폭 이면 통과"""
    adjusted = analytic / bias_factor
    gap = adjusted - mc
    rel_gap = gap / mc if mc != 0 else None
    raw_rel_gap = (analytic - mc) / mc if mc != 0 else None
    allowed = tolerance * abs(mc) if kind == "relative" else tolerance
    return MetricComparison(
        name=name,
        analytic=analytic,
        mc=mc,
        mc_half_width=half_width,
        abs_gap=abs(gap),
        rel_gap=rel_gap,
        raw_rel_gap=raw_rel_gap,
        tolerance=tolerance,
        tolerance_kind=kind,
        bias_factor=bias_factor,
        passed=abs(gap) <= allowed + half_width,
    )


def compare_metrics(
    cfg: NetworkConfig,
    analytic: AnalyticMetrics,
    estimate: MetricsEstimate,
) -> List[MetricComparison]:
    expected = config_hash(cfg)
    if analytic.config_hash != estimate.config_hash:
        raise ConfigMismatchError(
            f"설정 해시 불일치: analytic={analytic.config_hash[:12]}, "
            f"mc={estimate.config_hash[:12]}"
        )
    if analytic.config_hash != expected:
        raise ConfigMismatchError("결과가 주어진 설정에서 계산되지 않았습니다")

    bias = analytic.diagnostics.alzer_mean_ratio
    return [
        _compare(
            "aadr_linear",
            analytic.aadr,
            estimate.aadr_linear.mean,
            estimate.aadr_linear.half_width,
            AADR_LINEAR_TOLERANCE,
            "relative",
            bias,
        ),
        _compare(
            "aadr_exact",
            analytic.aadr,
            estimate.aadr.mean,
            estimate.aadr.half_width,
            AADR_EXACT_TOLERANCE,
            "relative",
            bias,
        ),
        _compare(
            "abdr",
            analytic.abdr,
            estimate.abdr.mean,
            estimate.abdr.half_width,
            ABDR_TOLERANCE,
            "relative",
        ),
        _compare(
            "brep",
            analytic.brep,
            estimate.brep.mean,
            estimate.brep.half_width,
            BREP_TOLERANCE,
            "absolute",
        ),
    ]


def brep_anchor_comparisons(
    cfg: NetworkConfig,
    targets: Sequence[float],
    rounds: int,
    seed: int,
    fso_mode: FsoMode = "deficit_at_cap",
    workers: Optional[int] = None,
) -> List[MetricComparison]:
    """
    BREP 가 targets 가 되는 전력 (닫힌 형태 역함수) 에서 해석값과 MC 비교

    기본 전력에서는 BREP 가 양쪽 모두 0 이라 비교할 것이 없습니다.
    목표마다 정확한 접속률 기준 행과 선형화 접속률 기준 (참고용) 행을 만듭니다.
    """
    settings = get_settings()
    curve = am.brep_curve(cfg, fso_mode)
    comparisons: List[MetricComparison] = []
    for target in targets:
        power = curve.inverse(target)
        if not 0 < power < math.inf:
            logger.warning("BREP 목표 %.3g 에 해당하는 전력이 없어 비교를 건너뜀", target)
            continue
        power_dbw = watts_to_dbw(power)
        powered = with_overrides(cfg, hap_tx_power=power)
        estimate = estimate_metrics(powered, rounds, seed, workers, fso_mode=fso_mode)
        analytic = curve.at(power)
        exact = _compare(
            f"brep@{target:g}",
            analytic,
            estimate.brep.mean,
            estimate.brep.half_width,
            BREP_TOLERANCE,
            "absolute",
        )
        comparisons.append(
            exact.model_copy(
                update={
                    "gating": target >= settings.validation_brep_gate_min,
                    "hap_tx_power_dbw": power_dbw,
                }
            )
        )
        if estimate.brep_linear is not None:
            linear = _compare(
                f"brep_linear@{target:g}",
                analytic,
                estimate.brep_linear.mean,
                estimate.brep_linear.half_width,
                BREP_TOLERANCE,
                "absolute",
            )
            comparisons.append(
                linear.model_copy(update={"gating": False, "hap_tx_power_dbw": power_dbw})
            )
    return comparisons


def _assumptions(
    cfg: NetworkConfig, analytic: AnalyticMetrics, anchors: Sequence[MetricComparison]
) -> List[str]:
    notes = [
        f"N_s = {cfg.sat_count} (고도 500 km 기준 수치는 기본값 N_s = 300 가정)",
        f"FSO 결손 질량 모드: {analytic.fso_mode}",
        f"Alzer 경계 평균 비율 {analytic.diagnostics.alzer_mean_ratio:.4f} 로 AADR 보정 후 비교",
        "AADR 해석식은 ln(1+γ) ≈ γ 선형화, exact 비교는 참고용",
    ]
    if not analytic.diagnostics.series_converged:
        notes.append(
            f"BREP 급수가 {analytic.diagnostics.series_terms}항에서 잘림 "
            f"(마지막 항 {analytic.diagnostics.series_truncation_bound:.2e}, "
            f"꼬리 추정 {analytic.diagnostics.series_tail_estimate:.2e} 보정)"
        )
    if anchors:
        notes.append(
            "BREP 해석식은 접속률을 ln(1+γ) ≈ γ 로 선형화하고 FSO 이득 상한 A₀ 를 "
            "넘는 임계값도 CDF 에 그대로 넣으므로 낮은 BREP 에서 MC 보다 작게 나옵니다. "
            f"목표 {get_settings().validation_brep_gate_min:g} 미만 행과 brep_linear 행은 참고용"
        )
    return notes


def validate(
    cfg: NetworkConfig,
    rounds: Optional[int] = None,
    seed: Optional[int] = None,
    fso_mode: Optional[FsoMode] = None,
    analytic: Optional[AnalyticMetrics] = None,
    estimate: Optional[MetricsEstimate] = None,
    workers: Optional[int] = None,
    brep_targets: Optional[Sequence[float]] = None,
) -> ValidationReport:
    """
    해석 지표와 Monte Carlo 추정치를 나란히 비교한 검증 보고서

    기본 전력 비교에 더해 brep_targets (기본 Settings.validation_brep_targets)
    의 BREP 가 되는 전력마다 MC 를 한 번씩 더 돌려 비교합니다.
    """
    settings = get_settings()
    rounds = settings.mc_rounds if rounds is None else rounds
    seed = settings.mc_master_seed if seed is None else seed
    fso_mode = fso_mode or settings.fso_deficit_mode
    brep_targets = settings.validation_brep_targets if brep_targets is None else brep_targets
    if rounds < MIN_VALIDATION_ROUNDS:
        raise ConfigError("rounds", f"{MIN_VALIDATION_ROUNDS} 이상이어야 합니다: {rounds}")

    if analytic is None:
        analytic = am.analytic_metrics(cfg, fso_mode)
    if estimate is None:
        estimate = estimate_metrics(cfg, rounds, seed, workers, fso_mode=fso_mode)

    anchors = brep_anchor_comparisons(cfg, brep_targets, rounds, seed, fso_mode, workers)
    comparisons = compare_metrics(cfg, analytic, estimate) + anchors
    passed = all(c.passed for c in comparisons if c.gating)
    for c in comparisons:
        logger.info(
            "검증 %-16s analytic=%.4e mc=%.4e gap=%.3e %s%s",
            c.name,
            c.analytic,
            c.mc,
            c.abs_gap,
            "PASS" if c.passed else "FAIL",
            "" if c.gating else " (참고)",
        )
    return ValidationReport(
        config_hash=analytic.config_hash,
        seed=estimate.seed,
        rounds=estimate.rounds,
        passed=passed,
        comparisons=comparisons,
        assumptions=_assumptions(cfg, analytic, anchors),
        analytic=analytic,
        estimate=estimate,
    )


def parse_axis(spec: str) -> SweepAxis:
    """'name=v1,v2,...' 또는 'name=start:stop:count' 형식의 축 문자열"""
    if "=" not in spec:
        raise SweepAxisError(f"축 형식은 name=values 입니다: {spec!r}")
    name, raw = (part.strip() for part in spec.split("=", 1))
    if name not in AXIS_NAMES:
        raise SweepAxisError(f"지원하지 않는 스윕 축입니다: {name}")
    values: Sequence[float]
    if not raw:
        values = []
    elif ":" in raw:
        try:
            start, stop, count = raw.split(":")
            n = int(count)
            start_f, stop_f = float(start), float(stop)
        except ValueError as e:
            raise SweepAxisError(f"범위 형식은 start:stop:count 입니다: {raw!r}") from e
        if n < 1:
            values = []
        elif n == 1:
            values = [start_f]
        else:
            values = [start_f + (stop_f - start_f) * i / (n - 1) for i in range(n)]
    else:
        try:
            values = [float(v) for v in raw.split(",") if v.strip()]
        except ValueError as e:
            raise SweepAxisError(f"축 값을 숫자로 읽을 수 없습니다: {raw!r}") from e
    if not values:
        raise SweepAxisError(f"축 '{name}' 의 값이 비어 있습니다")
    return SweepAxis(name=name, values=list(values))
