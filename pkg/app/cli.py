"""
hap-planner 명령행 인터페이스

    hap-planner analytic --set hap_tx_power_dbw=30
    hap-planner simulate --rounds 10000 --seed 7 --trace trace.csv
    hap-planner validate --rounds 10000
    hap-planner plan-power --target-kind brep --target 0.5
    hap-planner sweep --axis1 sat_count=100,300,500 \\
        --axis2 hap_tx_power=0:60:7 --metric abdr --output grid.csv

종료 코드: 0 성공, 1 계산 오류, 2 설정 오류, 3 달성 불가능한 목표, 4 검증 실패
"""

import argparse
import csv
import logging
import sys
from typing import Dict, List, Optional, Sequence

from pydantic import BaseModel, ValidationError

from app.core.config import get_settings
from app.core.errors import (
    ConfigError,
    DomainError,
    InfeasibleTargetError,
    PlannerError,
    SweepAxisError,
)
from app.core.logging import setup_logging
from app.models.network import NetworkConfig
from app.models.results import (
    AnalyticMetrics,
    MetricsEstimate,
    PowerPlanResult,
    SweepGrid,
    ValidationReport,
)
from app.services import monte_carlo, planner
from app.services.analytic_metrics import analytic_metrics
from app.services.network_model import resolve_config
from app.services.storage import format_cell, grid_rows, result_storage

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_CONFIG = 2
EXIT_INFEASIBLE = 3
EXIT_VALIDATION = 4

GBPS = 1e9
RATE_FIELDS = {"aadr", "aadr_linear", "abdr"}


def _parse_overrides(items: Optional[Sequence[str]]) -> Dict[str, str]:
    overrides: Dict[str, str] = {}
    for item in items or []:
        if "=" not in item:
            raise ConfigError(item, "--set 형식은 key=value 입니다")
        key, value = item.split("=", 1)
        overrides[key.strip()] = value.strip()
    return overrides


def _parse_targets(raw: Optional[str]) -> Optional[List[float]]:
    """'0.2,0.5,0.9' 형식, 빈 문자열은 추가 비교 없음"""
    if raw is None:
        return None
    try:
        return [float(v) for v in raw.split(",") if v.strip()]
    except ValueError as e:
        raise ConfigError("brep_targets", f"숫자 목록이어야 합니다: {raw!r}") from e


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config", help="설정 파일 경로 (key=value 또는 JSON)"
    )
    common.add_argument(
        "--set",
        action="append",
        metavar="KEY=VALUE",
        help="설정 덮어쓰기, 반복 가능 (예: hap_tx_power_dbw=30)",
    )
    common.add_argument(
        "--format", choices=("json", "csv", "text"), default="text"
    )
    common.add_argument(
        "--full-scale",
        action="store_true",
        help="기준 사용자 밀도 사용 (기본은 데스크 스케일 밀도)",
    )
    common.add_argument(
        "--fso-mode", choices=("deficit_at_cap", "deficit_at_zero")
    )
    common.add_argument("--log-level", default=None)

    parser = argparse.ArgumentParser(
        prog="hap-planner",
        description="위성-HAP-지상 중계 상향링크 성능 분석 및 HAP 전력 계획",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("analytic", parents=[common], help="해석 지표 계산")

    simulate = sub.add_parser(
        "simulate", parents=[common], help="Monte Carlo 추정"
    )
    simulate.add_argument("--rounds", type=int)
    simulate.add_argument("--seed", type=int)
    simulate.add_argument("--workers", type=int)
    simulate.add_argument(
        "--method", choices=("full_bpp", "contact_angle")
    )
    simulate.add_argument("--trace", help="라운드별 trace CSV 경로")
    simulate.add_argument("--summary", help="요약 JSON 경로")

    validate = sub.add_parser(
        "validate", parents=[common], help="해석값과 Monte Carlo 비교"
    )
    validate.add_argument("--rounds", type=int)
    validate.add_argument("--seed", type=int)
    validate.add_argument("--workers", type=int)
    validate.add_argument(
        "--brep-targets",
        help="BREP 목표별 전력에서 추가 비교할 목표 목록 (예: 0.2,0.5,0.9, 빈 값이면 생략)",
    )

    plan = sub.add_parser(
        "plan-power", parents=[common], help="최소 HAP 송신 전력"
    )
    plan.add_argument(
        "--target-kind", choices=("abdr-ratio", "brep"), required=True
    )
    plan.add_argument("--target", type=float, required=True)
    plan.add_argument(
        "--mc-check",
        action="store_true",
        help="계획된 전력에서 Monte Carlo 로 재검증",
    )
    plan.add_argument("--rounds", type=int, default=1000)
    plan.add_argument("--seed", type=int)

    sweep = sub.add_parser("sweep", parents=[common], help="2축 파라미터 스윕")
    sweep.add_argument(
        "--axis1", required=True, help="name=v1,v2,... 또는 name=start:stop:count"
    )
    sweep.add_argument("--axis2", required=True)
    sweep.add_argument(
        "--metric",
        choices=("aadr", "abdr", "brep", "min_power_abdr_ratio", "min_power_brep"),
        required=True,
    )
    sweep.add_argument("--target", type=float)
    sweep.add_argument("--workers", type=int)
    sweep.add_argument("--output", help="그리드 CSV 경로")
    return parser


# ---------------------------------------------------------------------------
# 출력
# ---------------------------------------------------------------------------


def _emit_rows(rows: List[List[object]]) -> None:
    writer = csv.writer(sys.stdout)
    writer.writerows(rows)


def _rate(value: float) -> str:
    return f"{value / GBPS:.6g} Gbit/s"


def _print_analytic(result: AnalyticMetrics, fmt: str) -> None:
    if fmt == "csv":
        _emit_rows(
            [
                ["metric", "value"],
                ["aadr_bps", result.aadr],
                ["abdr_bps", result.abdr],
                ["brep", result.brep],
                ["blockage_prob", result.blockage_prob],
            ]
        )
        return
    print(f"AADR          {_rate(result.aadr)}")
    print(f"ABDR          {_rate(result.abdr)}")
    print(f"BREP          {result.brep:.6f}  ({result.fso_mode})")
    print(f"P_block       {result.blockage_prob:.3e}")
    d = result.diagnostics
    print(
        f"series        {d.series_terms} terms, "
        f"converged={d.series_converged}, bound={d.series_truncation_bound:.2e}"
    )
    print(f"config_hash   {result.config_hash[:12]}")


def _print_estimate(result: MetricsEstimate, fmt: str) -> None:
    rows = [
        ("aadr", result.aadr),
        ("aadr_linear", result.aadr_linear),
        ("abdr", result.abdr),
        ("brep", result.brep),
    ]
    if fmt == "csv":
        _emit_rows(
            [["metric", "mean", "half_width_95"]]
            + [[name, e.mean, e.half_width] for name, e in rows]
        )
        return
    for name, e in rows:
        if name in RATE_FIELDS:
            print(f"{name:<13} {_rate(e.mean)} ± {e.half_width / GBPS:.3g}")
        else:
            print(f"{name:<13} {e.mean:.6f} ± {e.half_width:.4f}")
    print(f"blockage      {result.blockage_frequency:.3e}")
    print(f"mean users    {result.mean_user_count:.2f}")
    print(f"rounds/seed   {result.rounds} / {result.seed}")


def _print_report(report: ValidationReport, fmt: str) -> None:
    if fmt == "csv":
        _emit_rows(
            [
                [
                    "metric",
                    "analytic",
                    "mc",
                    "mc_half_width",
                    "abs_gap",
                    "rel_gap",
                    "tolerance",
                    "tolerance_kind",
                    "passed",
                    "gating",
                    "hap_tx_power_dbw",
                ]
            ]
            + [
                [
                    c.name,
                    c.analytic,
                    c.mc,
                    c.mc_half_width,
                    c.abs_gap,
                    "" if c.rel_gap is None else c.rel_gap,
                    c.tolerance,
                    c.tolerance_kind,
                    int(c.passed),
                    int(c.gating),
                    "" if c.hap_tx_power_dbw is None else f"{c.hap_tx_power_dbw:.2f}",
                ]
                for c in report.comparisons
            ]
        )
        return
    print(
        f"{'metric':<18} {'analytic':>12} {'mc':>12} "
        f"{'abs_gap':>10} {'rel_gap':>9}  result"
    )
    for c in report.comparisons:
        rel = "-" if c.rel_gap is None else f"{c.rel_gap:+.3%}"
        print(
            f"{c.name:<18} {c.analytic:>12.5e} {c.mc:>12.5e} "
            f"{c.abs_gap:>10.3e} {rel:>9}  "
            f"{'PASS' if c.passed else 'FAIL'}{'' if c.gating else ' (참고)'}"
        )
    for note in report.assumptions:
        print(f"- {note}")
    print("PASSED" if report.passed else "FAILED")


def _print_plan(plan: PowerPlanResult, fmt: str) -> None:
    if fmt == "csv":
        _emit_rows(
            [
                ["target_kind", "target", "feasible", "min_power_dbw", "min_power_w",
                 "iterations", "achieved_metric", "mc_metric"],
                [
                    plan.target_kind,
                    plan.target_value,
                    int(plan.feasible),
                    "" if plan.min_power_dbw is None else f"{plan.min_power_dbw:.2f}",
                    "" if plan.min_power_w is None else plan.min_power_w,
                    plan.iterations,
                    "" if plan.achieved_metric is None else plan.achieved_metric,
                    "" if plan.mc_metric is None else plan.mc_metric,
                ],
            ]
        )
        return
    if not plan.feasible:
        print(f"infeasible: {plan.reason}")
        return
    print(
        f"{plan.target_kind} ≥ {plan.target_value:g}: "
        f"{plan.min_power_dbw:.2f} dBW ({plan.min_power_w:.4g} W), "
        f"{plan.iterations} iterations"
    )
    if plan.mc_metric is not None:
        print(f"Monte Carlo: {plan.mc_metric:.4g} (gap {plan.mc_gap:+.3g})")


def _print_grid(grid: SweepGrid, fmt: str) -> None:
    if fmt == "csv":
        _emit_rows(grid_rows(grid))
        return
    print(f"{grid.metric}: {grid.axis1.name} (행) × {grid.axis2.name} (열)")
    print(" " * 10 + "".join(f"{v:>14g}" for v in grid.axis2.values))
    for v, row in zip(grid.axis1.values, grid.cells):
        print(f"{v:<10g}" + "".join(f"{format_cell(grid.metric, c):>14}" for c in row))


def _emit(result: BaseModel, fmt: str) -> None:
    if fmt == "json":
        print(result.model_dump_json(indent=2))
        return
    printers = {
        AnalyticMetrics: _print_analytic,
        MetricsEstimate: _print_estimate,
        ValidationReport: _print_report,
        PowerPlanResult: _print_plan,
        SweepGrid: _print_grid,
    }
    printers[type(result)](result, fmt)


# ---------------------------------------------------------------------------
# 하위 명령
# ---------------------------------------------------------------------------


def _run(args: argparse.Namespace, cfg: NetworkConfig) -> int:
    settings = get_settings()
    fso_mode = args.fso_mode or settings.fso_deficit_mode

    if args.command == "analytic":
        _emit(analytic_metrics(cfg, fso_mode), args.format)
        return EXIT_OK

    if args.command == "simulate":
        estimate, outcomes = monte_carlo.run_simulation(
            cfg, args.rounds, args.seed, args.workers, args.method, fso_mode
        )
        if args.trace:
            monte_carlo.export_trace(outcomes, args.trace)
        if args.summary:
            monte_carlo.write_summary(estimate, args.summary)
        _emit(estimate, args.format)
        return EXIT_OK

    if args.command == "validate":
        report = planner.validate(
            cfg,
            args.rounds,
            args.seed,
            fso_mode,
            workers=args.workers,
            brep_targets=_parse_targets(args.brep_targets),
        )
        _emit(report, args.format)
        return EXIT_OK if report.passed else EXIT_VALIDATION

    if args.command == "plan-power":
        kind = args.target_kind.replace("-", "_")
        try:
            plan = planner.min_power(cfg, kind, args.target, fso_mode)
        except InfeasibleTargetError as e:
            _emit(e.plan, args.format)
            return EXIT_INFEASIBLE
        if args.mc_check:
            plan = planner.mc_check(plan, cfg, args.rounds, args.seed, fso_mode)
        _emit(plan, args.format)
        return EXIT_OK

    grid = planner.sweep(
        cfg,
        planner.parse_axis(args.axis1),
        planner.parse_axis(args.axis2),
        args.metric,
        args.target,
        fso_mode,
        args.workers,
    )
    if args.output:
        result_storage.save_grid(grid, args.output)
    _emit(grid, args.format)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level or get_settings().log_level)
    try:
        cfg = resolve_config(
            args.config, _parse_overrides(args.set), full_scale=args.full_scale
        )
        return _run(args, cfg)
    except (ConfigError, SweepAxisError, DomainError, ValidationError) as e:
        logger.error("설정 오류: %s", e)
        return EXIT_CONFIG
    except PlannerError as e:
        logger.error("계산 오류: %s", e)
        return EXIT_ERROR
    except OSError as e:
        logger.error("파일 입출력 오류: %s", e)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
