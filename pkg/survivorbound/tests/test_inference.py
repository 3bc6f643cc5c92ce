"""Tests for the Wald test, Bonferroni adjustment and time-grid analysis."""

from __future__ import annotations

import math

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from survivorbound.core.errors import DegenerateVarianceError
from survivorbound.models.enums import Correction, ReferenceDistribution, Regime
from survivorbound.services import contrasts, inference
from survivorbound.services.inference import analyze_timegrid, bonferroni, std_normal_cdf, wald_diff_test


class TestNormalCdf:
    def test_known_values(self):
        assert std_normal_cdf(0.0) == 0.5
        assert std_normal_cdf(1.959963984540054) == pytest.approx(0.975, abs=1e-12)

    def test_far_tail_is_representable(self):
        assert 0 < std_normal_cdf(-8.0) < 1e-15

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            std_normal_cdf(math.inf)

    @given(st.floats(-8, 8))
    def test_symmetry(self, z):
        assert std_normal_cdf(z) + std_normal_cdf(-z) == pytest.approx(1.0, abs=1e-14)


def test_bonferroni():
    assert bonferroni(0.05, 7) == pytest.approx(0.05 / 7)
    with pytest.raises(ValueError):
        bonferroni(0.0, 3)
    with pytest.raises(ValueError):
        bonferroni(0.05, 0)


# ── Wald test ───────────────────────────────────────────────────────────


def test_one_month_p_value_without_assumptions():
    result = wald_diff_test(40, 336, 18, 338, continuity=True)
    assert result.p_one_sided == pytest.approx(0.0018, abs=0.0003)


def test_one_month_p_value_under_death_monotonicity():
    result = wald_diff_test(40, 336, 15, 338, continuity=True)
    assert result.p_one_sided == pytest.approx(0.0003, abs=0.0002)


def test_continuity_correction_widens_intervals():
    plain = wald_diff_test(40, 336, 18, 338, continuity=False)
    corrected = wald_diff_test(40, 336, 18, 338, continuity=True)
    half = (1 / 336 + 1 / 338) / 2
    assert corrected.ci95.lower == pytest.approx(plain.ci95.lower - half)
    assert corrected.ci95.upper == pytest.approx(plain.ci95.upper + half)
    assert corrected.estimate == plain.estimate


def test_zero_standard_error_is_degenerate():
    with pytest.raises(DegenerateVarianceError):
        wald_diff_test(0, 20, 0, 30)


def test_counts_must_fit_arms():
    with pytest.raises(ValueError):
        wald_diff_test(11, 10, 0, 10)


def test_intervals_are_clipped():
    result = wald_diff_test(9, 10, 0, 10)
    assert result.ci99.upper == 1.0
    assert result.ci95.upper <= 1.0


def test_student_t_reference_is_more_conservative():
    normal = wald_diff_test(40, 336, 18, 338)
    student = wald_diff_test(40, 336, 18, 338, reference=ReferenceDistribution.STUDENT_T)
    assert student.p_one_sided > normal.p_one_sided
    assert student.ci95.upper > normal.ci95.upper


counts = st.integers(1, 200).flatmap(lambda n: st.tuples(st.integers(0, n), st.just(n)))


@settings(max_examples=200, deadline=None)
@given(arm0=counts, arm1=counts, continuity=st.booleans())
def test_interval_nesting(arm0, arm1, continuity):
    (k0, n0), (k1, n1) = arm0, arm1
    assume(0 < k0 < n0 or 0 < k1 < n1)
    result = wald_diff_test(k0, n0, k1, n1, continuity=continuity)
    assert result.ci99.lower <= result.ci95.lower <= result.estimate <= result.ci95.upper <= result.ci99.upper
    assert -1.0 <= result.ci99.lower and result.ci99.upper <= 1.0


@settings(max_examples=200, deadline=None)
@given(arm0=counts, arm1=counts)
def test_correction_never_strengthens_a_positive_finding(arm0, arm1):
    (k0, n0), (k1, n1) = arm0, arm1
    assume(0 < k0 < n0 or 0 < k1 < n1)
    assume(k0 / n0 > k1 / n1)
    plain = wald_diff_test(k0, n0, k1, n1, continuity=False)
    corrected = wald_diff_test(k0, n0, k1, n1, continuity=True)
    assert corrected.p_one_sided >= plain.p_one_sided


def test_p_value_goes_through_the_normal_cdf(monkeypatch):
    monkeypatch.setattr(inference, "std_normal_cdf", lambda z: 0.25)
    assert wald_diff_test(40, 336, 18, 338).p_one_sided == 0.25


def test_significance_is_strict_at_the_threshold():
    p = wald_diff_test(40, 336, 18, 338).p_one_sided
    at = wald_diff_test(40, 336, 18, 338, alpha=p)
    assert at.alpha_adjusted == at.p_one_sided
    assert not at.significant
    assert wald_diff_test(40, 336, 18, 338, alpha=math.nextafter(p, 1.0)).significant


@settings(max_examples=200, deadline=None)
@given(
    n=st.integers(2, 100), data=st.data(), a=st.integers(1, 5), b=st.integers(1, 5),
    reference=st.sampled_from(list(ReferenceDistribution)),
)
def test_zero_estimate_gives_half(n, data, a, b, reference):
    k = data.draw(st.integers(1, n - 1))
    result = wald_diff_test(k * a, n * a, k * b, n * b, continuity=False, reference=reference)
    assert result.estimate == 0.0
    assert result.p_one_sided == pytest.approx(0.5, abs=1e-12)


def _continuity_gap_bound(k0: int, n0: int, k1: int, n1: int) -> float:
    plain = wald_diff_test(k0, n0, k1, n1, continuity=False)
    return std_normal_cdf((1 / n0 + 1 / n1) / (2 * plain.se)) - 0.5


@settings(max_examples=300, deadline=None)
@given(arm0=counts, arm1=counts)
def test_continuity_moves_p_by_at_most_the_shift(arm0, arm1):
    (k0, n0), (k1, n1) = arm0, arm1
    assume(0 < k0 < n0 or 0 < k1 < n1)
    plain = wald_diff_test(k0, n0, k1, n1, continuity=False)
    corrected = wald_diff_test(k0, n0, k1, n1, continuity=True)
    assert abs(corrected.p_one_sided - plain.p_one_sided) <= _continuity_gap_bound(k0, n0, k1, n1) + 1e-12


@pytest.mark.parametrize("regime", list(Regime))
@pytest.mark.parametrize("y", [0, 1])
def test_continuity_gap_on_trial_cells(swog_main, swog_appendix, regime, y):
    for panel in (swog_main, swog_appendix):
        for t in range(1, panel.grid.count + 1):
            c = contrasts.contrast(panel, t, y, regime)
            plain = wald_diff_test(c.k0, c.n0, c.k1, c.n1, continuity=False)
            corrected = wald_diff_test(c.k0, c.n0, c.k1, c.n1, continuity=True)
            gap = abs(corrected.p_one_sided - plain.p_one_sided)
            assert gap <= _continuity_gap_bound(c.k0, c.n0, c.k1, c.n1) + 1e-12


@settings(max_examples=150, deadline=None)
@given(n0=st.integers(2, 120), arm1=counts, continuity=st.booleans())
def test_p_value_falls_as_control_events_rise(n0, arm1, continuity):
    k1, n1 = arm1
    assume(0 < k1 < n1)
    p = [wald_diff_test(k0, n0, k1, n1, continuity=continuity).p_one_sided for k0 in range(n0 + 1)]
    assert all(later <= earlier + 1e-12 for earlier, later in zip(p, p[1:]))


# ── Time grid ───────────────────────────────────────────────────────────


def test_timegrid_without_assumptions(swog_main):
    table = analyze_timegrid(swog_main, Regime.NO_ASSUMPTIONS)
    assert table.m == 7
    assert table.alpha_adjusted == pytest.approx(0.05 / 7)
    assert table.n_total == 674
    assert [r.test.significant for r in table.rows] == [True, True, True, True, False, False, False]
    assert all(r.breakeven is None for r in table.rows)
    assert table.falsification == ()


def test_three_month_interval_under_both_monotonicities(swog_main):
    row = analyze_timegrid(swog_main, Regime.MONO_BOTH).rows[2]
    assert row.contrast.delta == pytest.approx(0.22, abs=0.005)
    assert row.test.ci95.lower == pytest.approx(0.15, abs=0.01)
    assert row.test.ci95.upper == pytest.approx(0.29, abs=0.01)


def test_breakeven_column_is_the_contrast(swog_main):
    table = analyze_timegrid(swog_main, Regime.MONO_DEATH)
    for row in table.rows:
        assert row.breakeven == pytest.approx(row.contrast.delta)
    assert len(table.falsification) == 7


def test_no_correction_uses_raw_alpha(swog_main):
    table = analyze_timegrid(swog_main, Regime.NO_ASSUMPTIONS, correction=Correction.NONE)
    assert table.alpha_adjusted == 0.05
    assert table.m == 7


def test_appendix_changes_only_the_last_row(swog_main, swog_appendix):
    main = analyze_timegrid(swog_main, Regime.NO_ASSUMPTIONS)
    appendix = analyze_timegrid(swog_appendix, Regime.NO_ASSUMPTIONS)
    for a, b in zip(main.rows[:6], appendix.rows[:6]):
        assert a.contrast.delta == b.contrast.delta
    assert round(main.rows[6].contrast.delta, 2) == -0.51
    assert round(appendix.rows[6].contrast.delta, 2) == -0.59
