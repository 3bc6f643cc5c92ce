"""Tests for observable contrasts, headcounts and falsification checks."""

from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from survivorbound.core.errors import DegenerateInputError
from survivorbound.models.enums import CheckStatus, HeadcountRounding, Regime
from survivorbound.models.schemas import ALLOWED_CELLS
from survivorbound.services import contrasts
from survivorbound.services.panel_data import build_panel


def _panel(control: tuple[int, ...], treated: tuple[int, ...]):
    """Single-time panel from per-arm counts in ALLOWED_CELLS order."""
    counts = {}
    for arm, row in ((0, control), (1, treated)):
        for (y, s), k in zip(ALLOWED_CELLS, row):
            counts[(arm, 1, y, s)] = k
    return build_panel(("t",), sum(control), sum(treated), counts)


@pytest.mark.parametrize(
    ("regime", "expected"),
    [
        (Regime.NO_ASSUMPTIONS, 146 / 336 - 95 / 338),
        (Regime.MONO_DEATH, 146 / 336 - 81 / 338),
        (Regime.MONO_CENSOR, 146 / 336 - 86 / 338),
        (Regime.MONO_BOTH, 146 / 336 - 72 / 338),
    ],
)
def test_three_month_contrasts(swog_main, regime, expected):
    result = contrasts.contrast(swog_main, 3, 0, regime)
    assert result.delta == pytest.approx(expected, abs=1e-12)
    assert result.lower_bound == pytest.approx(max(expected, 0.0))
    assert (result.n0, result.n1) == (336, 338)


def test_rounded_estimates(swog_main):
    assert round(contrasts.contrast(swog_main, 3, 0, Regime.NO_ASSUMPTIONS).delta, 2) == 0.15
    assert round(contrasts.contrast(swog_main, 3, 0, Regime.MONO_BOTH).delta, 2) == 0.22


def test_union_cells():
    assert contrasts.union_cells(Regime.NO_ASSUMPTIONS, 0) == ((1, 1), (2, 0), (3, 2))
    assert contrasts.union_cells(Regime.MONO_DEATH, 1) == ((0, 1), (3, 2))
    assert contrasts.union_cells(Regime.MONO_BOTH, 0) == ((1, 1),)


def test_negative_contrast_bounds_at_zero(swog_main):
    result = contrasts.contrast(swog_main, 7, 0, Regime.NO_ASSUMPTIONS)
    assert result.delta < 0
    assert result.lower_bound == 0.0


def test_direction_must_be_binary(swog_main):
    with pytest.raises(ValueError):
        contrasts.contrast(swog_main, 1, 2, Regime.NO_ASSUMPTIONS)


def test_empty_arm_is_degenerate():
    panel = _panel((0, 0, 0, 0), (3, 1, 0, 0))
    with pytest.raises(DegenerateInputError):
        contrasts.contrast(panel, 1, 0, Regime.NO_ASSUMPTIONS)


def test_sum_form_matches_contrast_when_arm_is_complete(swog_main):
    for t in range(1, 7):
        delta = contrasts.contrast(swog_main, t, 0, Regime.NO_ASSUMPTIONS).delta
        assert contrasts.survivor_sum_form(swog_main, t, 0) == pytest.approx(delta, abs=1e-12)


def test_sum_form_differs_when_treated_rows_are_short(swog_main):
    delta = contrasts.contrast(swog_main, 7, 0, Regime.NO_ASSUMPTIONS).delta
    assert contrasts.survivor_sum_form(swog_main, 7, 0) != pytest.approx(delta, abs=1e-6)


def test_naive_survivor_difference(swog_main):
    value = contrasts.naive_survivor_difference(swog_main, 3, 0)
    assert value == pytest.approx(146 / 306 - 72 / 315)


def test_naive_survivor_difference_without_survivors():
    panel = _panel((0, 0, 4, 0), (1, 1, 2, 0))
    assert contrasts.naive_survivor_difference(panel, 1, 0) is None


# ── Headcounts ──────────────────────────────────────────────────────────


class TestHeadcount:
    def test_one_month(self, swog_main):
        result = contrasts.contrast(swog_main, 1, 0, Regime.NO_ASSUMPTIONS)
        assert contrasts.headcount(result, 674, HeadcountRounding.NEAREST) == 47
        assert contrasts.headcount(result, 674) == 44

    def test_three_months(self, swog_main):
        result = contrasts.contrast(swog_main, 3, 0, Regime.NO_ASSUMPTIONS)
        assert contrasts.headcount(result, 674, HeadcountRounding.NEAREST) == 101
        assert contrasts.headcount(result, 674) == 103

    def test_plain_floats(self):
        assert contrasts.headcount(0.05, 674, HeadcountRounding.NEAREST) == 34
        assert contrasts.headcount(0.10, 647, HeadcountRounding.NEAREST) == 65
        assert contrasts.headcount(0.10, 674, HeadcountRounding.NEAREST) == 67

    def test_exact_products_are_not_lost_to_float_noise(self):
        assert contrasts.headcount(0.29, 100) == 29

    def test_negative_bound_is_zero(self):
        assert contrasts.headcount(-0.3, 674) == 0

    def test_population_must_be_positive(self):
        with pytest.raises(ValueError):
            contrasts.headcount(0.1, 0)


# ── Falsification ───────────────────────────────────────────────────────


@pytest.mark.parametrize("regime", [Regime.MONO_DEATH, Regime.MONO_CENSOR, Regime.MONO_BOTH])
def test_trial_data_fail_to_falsify(swog_main, regime):
    checks = contrasts.falsification_checks(swog_main, regime)
    expected = 14 if regime == Regime.MONO_BOTH else 7
    assert len(checks) == expected
    assert all(c.status == CheckStatus.CONSISTENT and c.slack >= 0 for c in checks)


def test_no_assumptions_has_nothing_to_falsify(swog_main):
    assert contrasts.falsification_checks(swog_main, Regime.NO_ASSUMPTIONS) == ()


def test_falsified_death_monotonicity():
    # every control lives while half the treated die
    panel = _panel((10, 0, 0, 0), (5, 0, 5, 0))
    check = contrasts.falsify_mono_death(panel, 1)
    assert check.lhs == pytest.approx(1.5)
    assert check.status == CheckStatus.FALSIFIED
    assert check.slack == pytest.approx(-0.5)


# ── Properties ──────────────────────────────────────────────────────────

arm_counts = st.tuples(*(st.integers(0, 40) for _ in range(4))).filter(lambda c: sum(c) > 0)


@settings(max_examples=200, deadline=None)
@given(control=arm_counts, treated=arm_counts, y=st.sampled_from((0, 1)))
def test_assumptions_only_raise_the_contrast(control, treated, y):
    panel = _panel(control, treated)
    value = {r: contrasts.contrast(panel, 1, y, r).delta for r in Regime}
    assert value[Regime.NO_ASSUMPTIONS] <= value[Regime.MONO_DEATH] + 1e-12
    assert value[Regime.NO_ASSUMPTIONS] <= value[Regime.MONO_CENSOR] + 1e-12
    assert value[Regime.MONO_DEATH] <= value[Regime.MONO_BOTH] + 1e-12
    assert value[Regime.MONO_CENSOR] <= value[Regime.MONO_BOTH] + 1e-12


@settings(max_examples=200, deadline=None)
@given(control=arm_counts, treated=arm_counts, y=st.sampled_from((0, 1)), regime=st.sampled_from(list(Regime)))
def test_panel_and_probability_forms_agree(control, treated, y, regime):
    panel = _panel(control, treated)
    delta = contrasts.contrast(panel, 1, y, regime).delta
    assert contrasts.contrast_value(panel, 1, y, regime) == pytest.approx(delta, abs=1e-12)
