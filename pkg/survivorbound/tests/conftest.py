"""Shared fixtures: embedded panels and seeded random streams."""

from __future__ import annotations

import pytest

from survivorbound.core.config import get_settings
from survivorbound.core.rng import SeededRng
from survivorbound.models.enums import SwogVariant
from survivorbound.models.outcome_sets import OutcomeSet
from survivorbound.models.schemas import ContingencyPanel, GeneralizedPanel
from survivorbound.services import datasets


@pytest.fixture(scope="session")
def swog_main() -> ContingencyPanel:
    return datasets.swog_dataset(SwogVariant.MAIN_TEXT)


@pytest.fixture(scope="session")
def swog_appendix() -> ContingencyPanel:
    return datasets.swog_dataset(SwogVariant.APPENDIX)


@pytest.fixture(scope="session")
def qol_panel() -> GeneralizedPanel:
    return datasets.qol_dataset()


@pytest.fixture
def rng() -> SeededRng:
    return SeededRng(7)


@pytest.fixture
def at_most_70() -> OutcomeSet:
    return OutcomeSet.parse("(-inf,70]")


@pytest.fixture
def at_most_75() -> OutcomeSet:
    return OutcomeSet.parse("(-inf,75]")


@pytest.fixture(autouse=True)
def _fresh_settings(monkeypatch: pytest.MonkeyPatch):
    monkeypatch.delenv("SURVIVORBOUND_OUTPUT_FORMAT", raising=False)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()
