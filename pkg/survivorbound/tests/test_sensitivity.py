"""Tests for monotonicity-violation sensitivity."""

from __future__ import annotations

import pytest
from hypothesis import given
from hypothesis import strategies as st

from survivorbound.models.enums import Regime, SensitivityKind
from survivorbound.models.schemas import SensitivityParams
from survivorbound.services import contrasts, sensitivity


@pytest.mark.parametrize(
    ("kind", "regime"),
    [
        (SensitivityKind.DM, Regime.MONO_DEATH),
        (SensitivityKind.AM, Regime.MONO_CENSOR),
        (SensitivityKind.KM, Regime.MONO_BOTH),
    ],
)
def test_breakeven_is_base_contrast(swog_main, kind, regime):
    expected = contrasts.contrast(swog_main, 3, 0, regime).delta
    assert sensitivity.breakeven(swog_main, 3, 0, kind) == pytest.approx(expected)


def test_death_monotonicity_conclusion_survives_small_violation(swog_main):
    params = SensitivityParams(kind=SensitivityKind.DM, value=0.1, t=3, y=0)
    outcome = sensitivity.adjusted_conclusion(swog_main, 3, 0, params)
    assert outcome.base_delta == pytest.approx(146 / 336 - 81 / 338)
    assert outcome.adjusted_delta == pytest.approx(outcome.base_delta - 0.1)
    assert outcome.conclusion


def test_conclusion_lost_at_breakeven(swog_main):
    value = sensitivity.breakeven(swog_main, 3, 0, SensitivityKind.KM)
    params = SensitivityParams(kind=SensitivityKind.KM, value=round(value, 6) + 1e-6, t=3, y=0)
    assert not sensitivity.adjusted_conclusion(swog_main, 3, 0, params).conclusion


def test_params_must_match_request(swog_main):
    params = SensitivityParams(kind=SensitivityKind.DM, value=0.0, t=2, y=0)
    with pytest.raises(ValueError):
        sensitivity.adjusted_conclusion(swog_main, 3, 0, params)


def test_sweep(swog_main):
    sweep = sensitivity.sweep(swog_main, 3, 0, SensitivityKind.DM, (0.0, 0.1, 0.2), label="3 months")
    assert [r.conclusion for r in sweep.rows] == [True, True, False]
    assert sweep.breakeven == sweep.base_delta
    assert sweep.label == "3 months"


@given(value=st.floats(-1, 1), kind=st.sampled_from(list(SensitivityKind)))
def test_adjustment_has_unit_slope(swog_main, value, kind):
    base = sensitivity.base_contrast(swog_main, 4, 0, kind)
    outcome = sensitivity.adjusted_conclusion(
        swog_main, 4, 0, SensitivityParams(kind=kind, value=value, t=4, y=0)
    )
    assert outcome.adjusted_delta == pytest.approx(base - value, abs=1e-15)
    assert outcome.conclusion == (base - value > 0)


class TestParseGrid:
    def test_range_includes_stop(self):
        assert sensitivity.parse_grid("0:0.2:0.05") == (0.0, 0.05, 0.1, 0.15, 0.2)

    def test_list(self):
        assert sensitivity.parse_grid("0, 0.05,0.3") == (0.0, 0.05, 0.3)

    def test_empty(self):
        assert sensitivity.parse_grid("") == ()
        assert sensitivity.parse_grid("0.5:0.1:0.1") == ()

    @pytest.mark.parametrize("text", ["0:1", "0:1:0", "0:1:-0.1", "0,1.5", "a,b"])
    def test_invalid(self, text):
        with pytest.raises(ValueError):
            sensitivity.parse_grid(text)
