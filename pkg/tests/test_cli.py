import json

import pytest

from app import cli
from app.core.errors import QuadratureError
from app.models.results import (
    AnalyticMetrics,
    Estimate,
    MetricsEstimate,
    PowerPlanResult,
    ValidationReport,
)
from app.services import planner


def test_plan_power_infeasible_exit_code(capsys):
    code = cli.main(
        [
            "plan-power",
            "--target-kind", "brep",
            "--target", "0.9999",
            "--fso-mode", "deficit_at_zero",
            "--format", "json",
        ]
    )
    assert code == cli.EXIT_INFEASIBLE
    plan = json.loads(capsys.readouterr().out)
    assert plan["feasible"] is False


def test_plan_power_abdr_ratio(capsys):
    code = cli.main(["plan-power", "--target-kind", "abdr-ratio", "--target", "1", "--format", "csv"])
    assert code == cli.EXIT_OK
    header, row = capsys.readouterr().out.strip().splitlines()
    assert header.startswith("target_kind,target,feasible,min_power_dbw")
    assert row.startswith("abdr_ratio,1.0,1,")


@pytest.mark.parametrize("override", ["foo=1", "sat_count", "sat_altitude_km=10"])
def test_bad_overrides_exit_with_config_error(override):
    assert cli.main(["analytic", "--set", override]) == cli.EXIT_CONFIG


def test_missing_config_file_is_config_error(tmp_path):
    assert cli.main(["analytic", "--config", str(tmp_path / "missing.env")]) == cli.EXIT_CONFIG


def test_analytic_text_output(capsys):
    assert cli.main(["analytic", "--set", "hap_tx_power_dbw=30"]) == cli.EXIT_OK
    out = capsys.readouterr().out
    assert "AADR" in out and "ABDR" in out and "BREP" in out


def test_simulate_writes_trace_and_summary(tmp_path, capsys):
    trace = tmp_path / "trace.csv"
    summary = tmp_path / "summary.json"
    code = cli.main(
        [
            "simulate",
            "--rounds", "100",
            "--seed", "3",
            "--trace", str(trace),
            "--summary", str(summary),
            "--format", "json",
        ]
    )
    assert code == cli.EXIT_OK
    printed = MetricsEstimate.model_validate_json(capsys.readouterr().out)
    assert printed.rounds == 100
    assert len(trace.read_text(encoding="utf-8").splitlines()) == 101
    assert MetricsEstimate.model_validate_json(summary.read_text(encoding="utf-8")) == printed


def test_simulate_rejects_few_rounds():
    assert cli.main(["simulate", "--rounds", "10"]) == cli.EXIT_CONFIG


def test_sweep_writes_grid_csv(tmp_path, capsys):
    output = tmp_path / "grid.csv"
    code = cli.main(
        [
            "sweep",
            "--axis1", "sat_count=100,300",
            "--axis2", "hap_tx_power=10,20",
            "--metric", "abdr",
            "--output", str(output),
            "--format", "csv",
        ]
    )
    assert code == cli.EXIT_OK
    lines = output.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "sat_count\\hap_tx_power,10,20"
    assert [line.split(",")[0] for line in lines[1:]] == ["100", "300"]
    assert capsys.readouterr().out.splitlines()[0] == lines[0]


def test_sweep_axis_error_exit_code():
    code = cli.main(["sweep", "--axis1", "warp=1", "--axis2", "sat_count=1", "--metric", "abdr"])
    assert code == cli.EXIT_CONFIG


def _failed_report() -> ValidationReport:
    zero = Estimate(mean=0.0, half_width=0.0)
    return ValidationReport(
        config_hash="x",
        seed=1,
        rounds=1000,
        passed=False,
        comparisons=[],
        analytic=AnalyticMetrics(aadr=0.0, abdr=0.0, brep=0.0, blockage_prob=0.0),
        estimate=MetricsEstimate(
            aadr=zero, aadr_linear=zero, abdr=zero, brep=zero,
            blockage_frequency=0.0, mean_user_count=0.0, rounds=1000, seed=1,
        ),
    )


def test_validation_failure_exit_code(monkeypatch, capsys):
    monkeypatch.setattr(planner, "validate", lambda *args, **kwargs: _failed_report())
    assert cli.main(["validate", "--rounds", "1000"]) == cli.EXIT_VALIDATION
    assert "FAILED" in capsys.readouterr().out


def test_numeric_failure_exit_code(monkeypatch):
    def broken(*args, **kwargs):
        raise QuadratureError("적분 실패")

    monkeypatch.setattr(cli, "analytic_metrics", broken)
    assert cli.main(["analytic"]) == cli.EXIT_ERROR


def test_invalid_result_model_exit_code(monkeypatch):
    def malformed(*args, **kwargs):
        return PowerPlanResult.model_validate({})

    monkeypatch.setattr(planner, "min_power", malformed)
    code = cli.main(["plan-power", "--target-kind", "brep", "--target", "0.5"])
    assert code == cli.EXIT_CONFIG


def test_unwritable_output_exit_code(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("", encoding="utf-8")
    code = cli.main(
        [
            "sweep",
            "--axis1", "sat_count=100",
            "--axis2", "hap_tx_power=10",
            "--metric", "abdr",
            "--output", str(blocker / "grid.csv"),
        ]
    )
    assert code == cli.EXIT_ERROR


def test_bad_brep_targets_exit_code():
    code = cli.main(["validate", "--rounds", "1000", "--brep-targets", "a,b"])
    assert code == cli.EXIT_CONFIG
