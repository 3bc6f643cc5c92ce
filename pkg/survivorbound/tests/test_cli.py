"""Tests for the command-line interface."""

from __future__ import annotations

import json

import pytest

from survivorbound.cli import build_parser, main, to_run_config
from survivorbound.models.enums import OutputFormat, Regime
from survivorbound.services.oracle import cdist_to_csv, point_mass


def test_validate_reports_the_short_row(capsys):
    assert main(["validate"]) == 0
    out = capsys.readouterr().out
    assert "Warnings: 1" in out


def test_missing_file_is_a_usage_error(tmp_path, capsys):
    assert main(["analyze", "--data", str(tmp_path / "absent.csv")]) == 2
    assert capsys.readouterr().err.startswith("Error:")


def test_malformed_file_is_a_usage_error(tmp_path, capsys):
    path = tmp_path / "bad.csv"
    path.write_text("arm,time,y,s,count\n0,a,1,1,x\n", encoding="utf-8")
    assert main(["analyze", "--data", str(path)]) == 2
    assert "line 2" in capsys.readouterr().err


def test_analyze(capsys):
    assert main(["analyze"]) == 0
    out = capsys.readouterr().out
    assert "(0.08, 0.23)" in out
    assert "<0.0001" in out


def test_analyze_under_death_monotonicity(capsys):
    assert main(["analyze", "--regime", "mono-death"]) == 0
    assert "fail to falsify" in capsys.readouterr().out


def test_all_regimes_as_json(capsys):
    assert main(["analyze", "--all-regimes", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert [t["regime"] for t in payload] == [r.value for r in Regime]


def test_format_from_environment(monkeypatch, capsys):
    monkeypatch.setenv("SURVIVORBOUND_OUTPUT_FORMAT", "tsv")
    assert main(["analyze"]) == 0
    assert capsys.readouterr().out.startswith("regime\t")


def test_sensitivity_single_sweep(capsys):
    assert main(["sensitivity", "--kind", "km", "--t", "3", "--grid", "0,0.3"]) == 0
    out = capsys.readouterr().out
    assert out.count("Monotonicity sensitivity") == 1
    assert "not established" in out


def test_time_outside_grid(capsys):
    assert main(["sensitivity", "--t", "9"]) == 2


def test_generalized_defaults_to_quality_of_life(capsys):
    assert main(["generalized"]) == 0
    out = capsys.readouterr().out
    assert "0.0489" in out
    assert "Headcount: 34" in out


def test_generalized_with_missing_data_parameters(capsys):
    argv = [
        "generalized", "--p-ya-s1-r0-x1", "0.25", "--p-s1-r0-x1", "0.30", "--p-not-yb-s1-r0-x0", "0.10",
        "--p-s1-r0-x0", "0.35", "--r-value", "-0.01", "--p-s1u-s0l-neq1", "0.02", "--tl", "1", "--tu", "1",
    ]
    assert main(argv) == 0
    out = capsys.readouterr().out
    assert "mono_sensitivity_two_times[1,1]" in out
    assert "0.1089" in out


def test_generalized_rejects_categorical_data(capsys):
    assert main(["generalized", "--data", "swog:main_text"]) == 2


def test_outcome_sets_need_a_generalized_command(capsys):
    assert main(["bayes", "--ya", "(-inf,70]"]) == 2
    assert "outcome sets" in capsys.readouterr().err


def test_simulate_passes(capsys):
    assert main(["simulate", "--checks", "10"]) == 0
    assert "Status: PASSED" in capsys.readouterr().out


def test_simulate_with_injected_violation(capsys):
    assert main(["simulate", "--checks", "5", "--inject-violation"]) == 1
    assert "FAIL: injected violation" in capsys.readouterr().out


def test_simulate_with_supplied_distribution(tmp_path, capsys):
    path = tmp_path / "cdist.csv"
    path.write_text(cdist_to_csv(point_mass(5)), encoding="utf-8")
    # type 5 is a death-monotonicity violation
    assert main(["simulate", "--checks", "2", "--regime", "mono-death", "--cdist", str(path)]) == 1


def test_bayes_dumps_draws(tmp_path, capsys):
    path = tmp_path / "draws.csv"
    assert main(["bayes", "--t", "3", "--draws", "200", "--dump-draws", str(path)]) == 0
    assert "Dirichlet posterior" in capsys.readouterr().out
    lines = path.read_text(encoding="utf-8").strip().split("\n")
    assert len(lines) == 201
    assert lines[0].endswith("contrast")


def test_bayes_generalized(capsys):
    assert main(["bayes", "--generalized", "--kind", "plain", "--draws", "100", "--format", "json"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["quantity"].startswith("lb_plain")


def test_reproduce_paper(capsys):
    assert main(["reproduce-paper"]) == 0
    out = capsys.readouterr().out
    assert "Failures   : 0" in out
    assert "Documented exceptions" in out


def test_bad_alpha_is_rejected(capsys):
    assert main(["analyze", "--alpha", "1.5"]) == 2


def test_unknown_command_exits_with_usage():
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2


def test_run_config_defaults():
    config = to_run_config(build_parser().parse_args(["generalized"]))
    assert config.data == "qol"
    assert config.output_format == OutputFormat.MARKDOWN
    assert config.missing_params is None
