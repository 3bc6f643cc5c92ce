"""Tests for rebuilding the published tables from the embedded trial data."""

from __future__ import annotations

import pytest

from survivorbound.models.enums import Regime, SwogVariant
from survivorbound.services import datasets
from survivorbound.services.reproduction import KNOWN_MISPRINTS, ReproductionService


@pytest.fixture(scope="module")
def main_report():
    return ReproductionService().run()


def test_every_printed_value_is_matched_or_explained(main_report):
    assert main_report.failures == ()
    assert len(main_report.tables) == 4
    assert [t.regime for t in main_report.tables] == list(Regime)
    assert len(main_report.quality_of_life) == 2


def test_documented_exceptions(main_report):
    found = {(c.table, c.column, c.quantity) for c in main_report.exceptions}
    quantities = {q for *_, q in found}
    assert {"estimate", "p", "ci95.upper", "treated deaths", "headcount", "scenario headcount"} <= quantities
    assert len(main_report.exceptions) >= len(KNOWN_MISPRINTS)


def test_falsification_rows(main_report):
    rows = [c for c in main_report.comparisons if c.quantity == "falsification"]
    assert len(rows) == 3
    assert all(c.matches for c in rows)


def test_narrative_values(main_report):
    narratives = {n.name: n.value for n in main_report.narratives}
    assert narratives["n_total"] == 674
    assert narratives["bonferroni_threshold"] == pytest.approx(0.05 / 7)
    assert narratives["quality-of-life headcount"] == 34
    assert narratives["quality-of-life scenario bound"] == pytest.approx(0.108905, abs=1e-6)
    assert narratives["quality-of-life scenario headcount"] == 67


def test_appendix_counts_explain_the_last_column():
    report = ReproductionService(SwogVariant.APPENDIX).run()
    assert report.variant == SwogVariant.APPENDIX
    assert report.failures == ()
    last = report.tables[0].rows[-1]
    assert round(last.contrast.delta, 2) == -0.59


def test_p_values_printed_without_continuity_correction(main_report):
    uncorrected = {
        (c.table, c.column)
        for c in main_report.exceptions
        if c.quantity == "p" and "without continuity correction" in c.exception
    }
    assert uncorrected == {("no assumptions", "4 months"), ("censoring monotonicity", "4 months")}


def test_p_values_match_within_five_percent(main_report):
    for c in main_report.comparisons:
        if c.quantity != "p" or c.exception or c.printed.startswith("<") or c.column == "1 month":
            continue
        assert abs(c.computed - float(c.printed)) <= 0.05 * float(c.printed), c


def test_death_count_is_checked_against_the_variant(monkeypatch):
    real = datasets.swog_dataset
    monkeypatch.setattr(datasets, "swog_dataset", lambda variant: real(SwogVariant.APPENDIX))
    report = ReproductionService(SwogVariant.MAIN_TEXT).run()
    row = next(c for c in report.comparisons if c.quantity == "treated deaths")
    assert row.computed == 166
    assert not row.matches
    assert row in report.failures


@pytest.mark.parametrize(("variant", "deaths"), [(SwogVariant.MAIN_TEXT, 139), (SwogVariant.APPENDIX, 166)])
def test_death_count_matches_its_own_variant(variant, deaths):
    report = ReproductionService(variant).run()
    row = next(c for c in report.comparisons if c.quantity == "treated deaths")
    assert row.computed == deaths and row.matches
