#!/usr/bin/env python3
"""
ABDR/BREP 곡선과 최소 전력 히트맵용 그리드 CSV 일괄 생성 스크립트
"""

import argparse
import os
import sys
from pathlib import Path

# 프로젝트 루트 디렉토리를 Python 경로에 추가
sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from app.core.errors import PlannerError
from app.core.logging import setup_logging
from app.services import planner
from app.services.network_model import resolve_config
from app.services.storage import ResultStorage

POWER_AXIS = "hap_tx_power=0:60:13"
COUNT_AXIS = "sat_count=100,200,300,400,500,700,1000"
ALTITUDE_AXIS = "sat_altitude=500,750,1000,1250,1500"

# (파일 이름, axis1, axis2, metric, target)
GRIDS = [
    ("abdr_vs_power_by_count.csv", COUNT_AXIS, POWER_AXIS, "abdr", None),
    ("abdr_vs_power_by_altitude.csv", ALTITUDE_AXIS, POWER_AXIS, "abdr", None),
    ("min_power_abdr_ratio_1.csv", ALTITUDE_AXIS, COUNT_AXIS, "min_power_abdr_ratio", 1.0),
    ("min_power_abdr_ratio_2.csv", ALTITUDE_AXIS, COUNT_AXIS, "min_power_abdr_ratio", 2.0),
    ("brep_vs_power_by_altitude.csv", ALTITUDE_AXIS, POWER_AXIS, "brep", None),
    ("brep_vs_power_by_count.csv", COUNT_AXIS, POWER_AXIS, "brep", None),
    ("min_power_brep_0.9.csv", ALTITUDE_AXIS, COUNT_AXIS, "min_power_brep", 0.9),
    ("min_power_brep_0.5.csv", ALTITUDE_AXIS, COUNT_AXIS, "min_power_brep", 0.5),
]


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--output-dir", default="figure_data")
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--full-scale", action="store_true")
    args = parser.parse_args()

    setup_logging("WARNING")
    storage = ResultStorage(args.output_dir)
    cfg = resolve_config(full_scale=args.full_scale)

    print(f"그리드 {len(GRIDS)}개 생성 → {Path(args.output_dir).resolve()}")
    failed = 0
    for i, (name, axis1, axis2, metric, target) in enumerate(GRIDS, start=1):
        print(f"\n{i}. {name} ({metric})")
        try:
            grid = planner.sweep(
                cfg,
                planner.parse_axis(axis1),
                planner.parse_axis(axis2),
                metric,
                target,
                workers=args.workers,
            )
        except PlannerError as e:
            print(f"   ❌ 실패: {e}")
            failed += 1
            continue
        path = storage.save_grid(grid, name)
        infeasible = sum(not c.feasible for row in grid.cells for c in row)
        print(f"   ✅ 저장: {path} (달성 불가 셀 {infeasible}개)")

    print(f"\n완료: 성공 {len(GRIDS) - failed}개, 실패 {failed}개")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
