"""
로컬 결과 파일 저장 서비스 (trace CSV, 요약 JSON, 스윕 그리드 CSV)
"""

import csv
import logging
import math
from pathlib import Path
from typing import Iterable, List, Optional, Type, TypeVar, Union

from pydantic import BaseModel

from app.core.config import get_settings
from app.models.realizations import RoundOutcome
from app.models.results import SweepGrid

logger = logging.getLogger(__name__)

ModelT = TypeVar("ModelT", bound=BaseModel)
PathLike = Union[str, Path]

TRACE_COLUMNS = [
    "round_index",
    "user_count",
    "interference_W",
    "access_rate_bps_exact",
    "access_rate_bps_linear",
    "backhaul_rate_bps",
    "blocked",
    "exceeded",
]

POWER_METRICS = {"min_power_abdr_ratio", "min_power_brep"}
INFEASIBLE_MARKER = "infeasible"


class ResultStorage:
    def __init__(self, base_dir: Optional[PathLike] = None):
        # 상대 경로는 output_dir 기준
        self.base_dir = Path(base_dir or get_settings().output_dir)

    def resolve(self, path: PathLike) -> Path:
        target = Path(path)
        if not target.is_absolute() and target.parent == Path("."):
            target = self.base_dir / target
        target.parent.mkdir(parents=True, exist_ok=True)
        return target

    def save_trace(self, outcomes: Iterable[RoundOutcome], path: PathLike) -> Path:
        """라운드당 한 행의 trace CSV"""
        target = self.resolve(path)
        rows = 0
        with target.open("w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f)
            writer.writerow(TRACE_COLUMNS)
            for outcome in outcomes:
                writer.writerow(
                    [
                        outcome.round_index,
                        outcome.user_count,
                        repr(outcome.aggregate_interference),
                        repr(outcome.access_sum_rate),
                        repr(outcome.access_sum_rate_linear),
                        repr(outcome.backhaul_rate),
                        int(outcome.blocked),
                        int(outcome.exceeded),
                    ]
                )
                rows += 1
        logger.info("trace 저장 완료: %s (%d행)", target, rows)
        return target

    def load_trace(self, path: PathLike) -> List[RoundOutcome]:
        with Path(path).open(newline="", encoding="utf-8") as f:
            reader = csv.DictReader(f)
            if reader.fieldnames != TRACE_COLUMNS:
                raise ValueError(f"trace 헤더가 올바르지 않습니다: {reader.fieldnames}")
            return [
                RoundOutcome(
                    round_index=int(row["round_index"]),
                    user_count=int(row["user_count"]),
                    aggregate_interference=float(row["interference_W"]),
                    access_sum_rate=float(row["access_rate_bps_exact"]),
                    access_sum_rate_linear=float(row["access_rate_bps_linear"]),
                    backhaul_rate=float(row["backhaul_rate_bps"]),
                    blocked=row["blocked"] == "1",
                    exceeded=row["exceeded"] == "1",
                )
                for row in reader
            ]

    def save_model(self, model: BaseModel, path: PathLike) -> Path:
        target = self.resolve(path)
        target.write_text(model.model_dump_json(indent=2), encoding="utf-8")
        logger.info("JSON 저장 완료: %s", target)
        return target

    def load_model(self, model_cls: Type[ModelT], path: PathLike) -> ModelT:
        return model_cls.model_validate_json(Path(path).read_text(encoding="utf-8"))

    def save_grid(self, grid: SweepGrid, path: PathLike) -> Path:
        target = self.resolve(path)
        with target.open("w", newline="", encoding="utf-8") as f:
            csv.writer(f).writerows(grid_rows(grid))
        logger.info("그리드 저장 완료: %s", target)
        return target


def _format_axis(value: float) -> str:
    return f"{value:g}"


def grid_rows(grid: SweepGrid) -> List[List[str]]:
    """헤더 행은 axis2 값, axis1 값마다 한 행. 전력 셀은 dBW 소수 둘째 자리"""
    header = [f"{grid.axis1.name}\\{grid.axis2.name}"] + [
        _format_axis(v) for v in grid.axis2.values
    ]
    return [header] + [
        [_format_axis(value)] + [format_cell(grid.metric, c) for c in row]
        for value, row in zip(grid.axis1.values, grid.cells)
    ]


def format_cell(metric: str, cell) -> str:
    if not cell.feasible or cell.value is None:
        return INFEASIBLE_MARKER
    if metric in POWER_METRICS:
        return f"{cell.value:.2f}"
    if not math.isfinite(cell.value):
        return INFEASIBLE_MARKER
    return f"{cell.value:.6g}"


# 전역 결과 저장 서비스 인스턴스
result_storage = ResultStorage()
