"""Tests for generalized outcome bounds on the quality-of-life data and CSV input."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from survivorbound.core.errors import OutcomeSetError, PanelParseError, SensitivityParamsError
from survivorbound.models.enums import Arm
from survivorbound.models.outcome_sets import OutcomeSet
from survivorbound.models.schemas import MissingSensitivityParams
from survivorbound.services import generalized
from survivorbound.services.reproduction import QOL_SCENARIO


def test_margins(qol_panel, at_most_70):
    assert qol_panel.prob_observed(Arm.TREATED, 1) == pytest.approx(209 / 338)
    assert qol_panel.prob_dead(Arm.CONTROL, 1) == pytest.approx(11 / 336)
    assert qol_panel.prob_missing(Arm.CONTROL, 1) == pytest.approx(147 / 336)
    assert qol_panel.prob_observed(Arm.CONTROL, 1, at_most_70, inside=False) == pytest.approx(89 / 336)


def test_monotone_bound_at_threshold_70(qol_panel, at_most_70):
    bound = generalized.lb_monotone(qol_panel, 1, at_most_70, at_most_70)
    assert bound.raw == pytest.approx(89 / 336 - 73 / 338, abs=1e-12)
    assert bound.raw == pytest.approx(0.0489, abs=0.001)
    assert bound.denominator == pytest.approx(178 / 336)
    assert bound.normalized == pytest.approx(bound.raw / bound.denominator)


def test_monotone_bound_with_stricter_control_threshold(qol_panel, at_most_70, at_most_75):
    bound = generalized.lb_monotone(qol_panel, 1, at_most_70, at_most_75)
    assert bound.raw == pytest.approx(71 / 336 - 73 / 338, abs=1e-12)
    assert abs(bound.raw) < 0.01


def test_monotone_test_intervals(qol_panel, at_most_70, at_most_75):
    main = generalized.monotone_test(qol_panel, 1, at_most_70, at_most_70)
    assert main.ci95.lower == pytest.approx(-0.02, abs=0.01)
    assert main.ci95.upper == pytest.approx(0.12, abs=0.01)
    variant = generalized.monotone_test(qol_panel, 1, at_most_70, at_most_75)
    assert variant.ci95.lower == pytest.approx(-0.07, abs=0.01)
    assert variant.ci95.upper == pytest.approx(0.06, abs=0.01)


def test_plain_bound(qol_panel):
    above_70 = OutcomeSet.parse("(70,inf)")
    value = generalized.lb_plain(qol_panel, 1, above_70, above_70)
    assert value == pytest.approx(73 / 338 + 89 / 336 - 1)


def test_conditional_bound_needs_positive_plain_bound(qol_panel, at_most_70):
    analysis = generalized.qol_analysis(qol_panel, 1, at_most_70, at_most_70)
    assert analysis.lb_plain < 0
    assert analysis.lb_conditional is None
    assert analysis.lb_conditional_note.startswith("not applicable")


def test_qol_analysis(qol_panel, at_most_70):
    analysis = generalized.qol_analysis(qol_panel, 1, at_most_70, at_most_70)
    assert analysis.n_total == 674
    assert analysis.headcount_nearest == 34
    assert analysis.headcount_floor == 32
    assert analysis.lb_normalized == pytest.approx(
        analysis.lb_plain / (209 / 338 - 147 / 336 - 11 / 336)
    )
    assert analysis.test_continuity.p_one_sided >= analysis.test_plain.p_one_sided
    assert analysis.y_a == "(-inf,70]"


def test_straddling_set_is_rejected(qol_panel):
    with pytest.raises(OutcomeSetError):
        generalized.lb_monotone(qol_panel, 1, OutcomeSet.parse("(-inf,72]"), OutcomeSet.parse("(-inf,70]"))


# ── Missing-data sensitivity ────────────────────────────────────────────


def test_zero_parameters_reduce_to_plain_bound(qol_panel, at_most_70):
    bound = generalized.lb_missing_sensitivity(qol_panel, 1, at_most_70, at_most_70, MissingSensitivityParams())
    assert bound.raw == pytest.approx(generalized.lb_plain(qol_panel, 1, at_most_70, at_most_70))
    assert bound.normalized is None


def test_missing_content_can_make_the_bound_positive(qol_panel, at_most_70):
    params = MissingSensitivityParams(
        p_ya_s1_r0_x1=0.30, p_s1_r0_x1=0.30, p_not_yb_s1_r0_x0=0.10, p_s1_r0_x0=0.10,
    )
    bound = generalized.lb_missing_sensitivity(qol_panel, 1, at_most_70, at_most_70, params)
    plain = 136 / 338 + 89 / 336 - 1
    assert bound.raw == pytest.approx(plain + 0.40)
    den = 209 / 338 + 0.30 - 11 / 336 - (147 / 336 - 0.10)
    assert bound.denominator == pytest.approx(den)
    assert bound.normalized == pytest.approx(bound.raw / den)


def test_scenario_bound_exceeds_ten_percent(qol_panel, at_most_70):
    bound = generalized.mono_sensitivity_two_times(qol_panel, 1, 1, at_most_70, at_most_70, QOL_SCENARIO)
    assert bound.raw == pytest.approx(89 / 336 + 0.10 - 73 / 338 - 0.05 + 0.01, abs=1e-12)
    assert bound.raw > 0.10
    assert bound.denominator == pytest.approx(178 / 336 + 0.35 - 0.02)


def test_parameters_must_fit_missing_mass(qol_panel, at_most_70):
    params = MissingSensitivityParams(p_s1_r0_x1=0.5)
    with pytest.raises(SensitivityParamsError, match="p_s1_r0_x1"):
        generalized.mono_sensitivity_two_times(qol_panel, 1, 1, at_most_70, at_most_70, params)


# ── CSV input ───────────────────────────────────────────────────────────

INDIVIDUAL_CSV = """\
arm,time,status,y
0,wk12,alive,60
0,wk12,alive,80
0,wk12,dead,
0,wk12,missing,
1,wk12,alive,65
1,wk12,alive,62
1,wk12,missing_outcome,
1,wk12,alive,90
"""

BINNED_CSV = """\
#n0=336
#n1=338
arm,time,status,bin,count
1,12 weeks,alive,"(-inf,70]",136
1,12 weeks,alive,"(70,75]",10
1,12 weeks,alive,"(75,inf)",63
1,12 weeks,dead,,13
1,12 weeks,missing_outcome,,23
1,12 weeks,missing,,93
0,12 weeks,alive,"(-inf,70]",89
0,12 weeks,alive,"(70,75]",18
0,12 weeks,alive,"(75,inf)",71
0,12 weeks,dead,,11
0,12 weeks,missing_outcome,,30
0,12 weeks,missing,,117
"""


def test_individual_records(at_most_70):
    panel = generalized.load_generalized_csv(INDIVIDUAL_CSV)
    assert (panel.n0, panel.n1) == (4, 4)
    assert panel.count_observed(Arm.TREATED, 1, at_most_70) == 2
    assert panel.prob_missing(Arm.TREATED, 1) == pytest.approx(0.25)
    assert generalized.lb_monotone(panel, 1, at_most_70, at_most_70).raw == pytest.approx(0.0)


def test_binned_counts_match_embedded_data(qol_panel, at_most_70):
    panel = generalized.load_generalized_csv(BINNED_CSV)
    assert (panel.n0, panel.n1) == (336, 338)
    for src in (panel, qol_panel):
        assert generalized.lb_monotone(src, 1, at_most_70, at_most_70).raw == pytest.approx(89 / 336 - 73 / 338)
    assert generalized.validate_generalized_panel(panel).warnings == ()


@pytest.mark.parametrize(
    ("text", "fragment"),
    [
        ("arm,time,status\n0,a,alive\n", "unrecognised header"),
        ("arm,time,status,y\n0,a,alive,\n", "required"),
        ("arm,time,status,y\n0,a,dead,3\n", "forbidden"),
        ("arm,time,status,y\n0,a,asleep,3\n", "asleep"),
        ("arm,time,status,y\n0,a,alive,abc\n", "bad outcome"),
        ("arm,time,status,y\n", "no data rows"),
    ],
)
def test_generalized_parse_errors(text, fragment):
    with pytest.raises(PanelParseError, match=fragment):
        generalized.load_generalized_csv(text)


# ── Properties ──────────────────────────────────────────────────────────

thresholds = st.sampled_from([60.0, 65.0, 70.0, 75.0, 85.0])


@settings(max_examples=50, deadline=None)
@given(a=thresholds, b=thresholds, c=thresholds)
def test_plain_bound_grows_with_treated_set(a, b, c):
    panel = generalized.load_generalized_csv(INDIVIDUAL_CSV)
    small, large = sorted((a, b))
    y_b = OutcomeSet.at_most(c)
    low = generalized.lb_plain(panel, 1, OutcomeSet.at_most(small), y_b)
    high = generalized.lb_plain(panel, 1, OutcomeSet.at_most(large), y_b)
    assert low <= high + 1e-12
