"""Tests for panel validation, probabilities and counts-CSV ingestion."""

from __future__ import annotations

import pytest

from survivorbound.core.errors import PanelParseError, StructuralZeroError
from survivorbound.models.enums import Arm
from survivorbound.services import panel_data
from survivorbound.services.datasets import SWOG_LABELS, load_panel

SMALL_CSV = """\
arm,time,y,s,count
0,week 4,0,1,6
0,week 4,1,1,3
0,week 4,2,0,1
0,week 4,3,2,0
1,week 4,0,1,8
1,week 4,1,1,1
1,week 4,2,0,0
1,week 4,3,2,1
"""


# ── Embedded data ───────────────────────────────────────────────────────


def test_appendix_rows_sum_to_arm_sizes(swog_appendix):
    report = panel_data.validate_panel(swog_appendix)
    assert report.ok
    assert report.warnings == ()


def test_main_text_has_single_row_sum_warning(swog_main):
    report = panel_data.validate_panel(swog_main)
    assert report.ok
    assert len(report.warnings) == 1
    w = report.warnings[0]
    assert (w.arm, w.t, w.expected, w.actual) == (Arm.TREATED, 7, 338, 311)


def test_variants_differ_only_in_treated_deaths_at_last_time(swog_main, swog_appendix):
    assert swog_main.count(Arm.TREATED, 7, 2, 0) == 139
    assert swog_appendix.count(Arm.TREATED, 7, 2, 0) == 166
    for cell in swog_main.cells:
        if (cell.arm, cell.t, cell.y, cell.s) != (Arm.TREATED, 7, 2, 0):
            assert swog_appendix.count(cell.arm, cell.t, cell.y, cell.s) == cell.count


def test_grid_labels(swog_main):
    assert swog_main.grid.labels == SWOG_LABELS
    assert swog_main.grid.label(3) == "3 months"
    with pytest.raises(ValueError):
        swog_main.grid.check(8)


def test_empirical_prob(swog_main):
    assert panel_data.empirical_prob(swog_main, 1, 1, 0, 3) == pytest.approx(146 / 336)
    assert panel_data.empirical_prob(swog_main, 2, 0, 1, 1) == pytest.approx(3 / 338)


def test_empirical_prob_rejects_unknown_codes(swog_main):
    with pytest.raises(ValueError):
        panel_data.empirical_prob(swog_main, 4, 1, 0, 1)


# ── Structural zeros ────────────────────────────────────────────────────


@pytest.mark.parametrize(
    ("y", "s", "broken"),
    [(0, 1, False), (1, 1, False), (2, 0, False), (3, 2, False), (0, 2, True), (3, 1, True), (1, 0, True), (2, 1, True)],
)
def test_violated_condition(y, s, broken):
    assert (panel_data.violated_condition(y, s) is not None) is broken


def test_structural_violation_is_an_error():
    text = SMALL_CSV + "1,week 4,2,1,2\n"
    with pytest.raises(StructuralZeroError) as excinfo:
        panel_data.load_counts_csv(text)
    assert excinfo.value.report.errors[0].y == 2

    panel = panel_data.load_counts_csv(text, strict=False)
    report = panel_data.validate_panel(panel)
    assert not report.ok
    assert [(e.y, e.s, e.count) for e in report.errors] == [(2, 1, 2)]


# ── CSV ingestion ───────────────────────────────────────────────────────


def test_load_counts_csv_infers_arm_sizes():
    panel = panel_data.load_counts_csv(SMALL_CSV)
    assert (panel.n0, panel.n1) == (10, 10)
    assert panel.grid.labels == ("week 4",)
    assert panel.count(Arm.CONTROL, 1, 1, 1) == 3


def test_declared_arm_sizes_take_precedence():
    panel = panel_data.load_counts_csv("#n0=12\n#n1=10\n" + SMALL_CSV)
    assert panel.n0 == 12
    report = panel_data.validate_panel(panel)
    assert [(w.arm, w.expected, w.actual) for w in report.warnings] == [(Arm.CONTROL, 12, 10)]


def test_serialized_panel_reloads_identically(swog_main):
    text = panel_data.serialize_counts_csv(swog_main)
    assert text.startswith("#n0=336\n#n1=338\narm,time,y,s,count\n")
    assert panel_data.load_counts_csv(text) == swog_main


@pytest.mark.parametrize(
    ("text", "fragment"),
    [
        ("", "no data rows"),
        ("arm,time,y,count\n0,a,0,1\n", "expected header"),
        ("arm,time,y,s,count\n0,a,0,1,x\n", "count"),
        ("arm,time,y,s,count\n0,a,0,1,-1\n", "negative"),
        ("arm,time,y,s,count\n2,a,0,1,1\n", "arm"),
        ("arm,time,y,s,count\n0,a,0,1,1\n0,a,0,1,2\n1,a,0,1,3\n", "duplicate"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(PanelParseError, match=fragment):
        panel_data.load_counts_csv(text)


def test_parse_error_carries_line_number():
    with pytest.raises(PanelParseError) as excinfo:
        panel_data.load_counts_csv("#n0=1\narm,time,y,s,count\n0,a,0,1,1\n0,a,9,1,1\n")
    assert excinfo.value.line == 4


def test_arm_size_cannot_be_inferred_from_unequal_sums():
    text = "arm,time,y,s,count\n0,a,0,1,3\n0,b,0,1,4\n1,a,0,1,1\n1,b,0,1,1\n"
    with pytest.raises(PanelParseError, match="cannot infer size of arm 0"):
        panel_data.load_counts_csv(text)


# ── Selector resolution ─────────────────────────────────────────────────


def test_load_panel_from_path(tmp_path):
    path = tmp_path / "counts.csv"
    path.write_text(SMALL_CSV, encoding="utf-8")
    panel = load_panel(str(path))
    assert panel.n1 == 10


def test_load_panel_unknown_selector():
    with pytest.raises(PanelParseError, match="unknown dataset"):
        load_panel("swog:preprint")


def test_load_panel_missing_file(tmp_path):
    with pytest.raises(OSError):
        load_panel(str(tmp_path / "absent.csv"))
