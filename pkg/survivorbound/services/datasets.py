"""Embedded trial data.

The docetaxel (X=1, n=338) versus mitoxantrone (X=0, n=336) progression data
at 1, 2, 3, 4, 6, 12 and 18 months, and the 12-week quality-of-life table.
"""

from __future__ import annotations

import math
from pathlib import Path

from survivorbound.core.errors import PanelParseError
from survivorbound.models.enums import Arm, CellStatus, SwogVariant
from survivorbound.models.outcome_sets import Interval
from survivorbound.models.schemas import ContingencyPanel, GeneralizedCell, GeneralizedPanel, TimeGrid
from survivorbound.services.generalized import load_generalized_csv
from survivorbound.services.panel_data import build_panel, load_counts_csv

SWOG_LABELS: tuple[str, ...] = (
    "1 month", "2 months", "3 months", "4 months", "6 months", "12 months", "18 months",
)
SWOG_N0 = 336
SWOG_N1 = 338

# Rows per arm in (y, s) order: alive without progression (0,1), alive with
# progression (1,1), dead (2,0), censored (3,2).
_SWOG_COUNTS: dict[int, dict[tuple[int, int], tuple[int, ...]]] = {
    Arm.TREATED: {
        (0, 1): (320, 289, 243, 221, 172, 65, 17),
        (1, 1): (6, 30, 72, 86, 116, 175, 144),
        (2, 0): (3, 10, 14, 22, 41, 88, 166),
        (3, 2): (9, 9, 9, 9, 9, 10, 11),
    },
    Arm.CONTROL: {
        (0, 1): (278, 219, 160, 146, 109, 58, 14),
        (1, 1): (40, 94, 146, 150, 164, 147, 121),
        (2, 0): (3, 8, 15, 25, 47, 114, 182),
        (3, 2): (15, 15, 15, 15, 16, 17, 19),
    },
}

# The main text reports 139 treated deaths at 18 months where the appendix has 166.
_MAIN_TEXT_DEATHS_18M = 139


def swog_dataset(variant: SwogVariant = SwogVariant.MAIN_TEXT) -> ContingencyPanel:
    counts: dict[tuple[int, int, int, int], int] = {}
    for arm, rows in _SWOG_COUNTS.items():
        for (y, s), series in rows.items():
            for t, value in enumerate(series, start=1):
                counts[(int(arm), t, y, s)] = value
    if SwogVariant(variant) == SwogVariant.MAIN_TEXT:
        counts[(int(Arm.TREATED), len(SWOG_LABELS), 2, 0)] = _MAIN_TEXT_DEATHS_18M
    return build_panel(SWOG_LABELS, SWOG_N0, SWOG_N1, counts)


# ---------------------------------------------------------------------------
# Quality of life at 12 weeks
# ---------------------------------------------------------------------------

QOL_LABELS: tuple[str, ...] = ("12 weeks",)

QOL_BINS: tuple[Interval, ...] = (
    Interval(lo=-math.inf, hi=70, hi_closed=True),
    Interval(lo=70, hi=75, hi_closed=True),
    Interval(lo=75, hi=math.inf),
)

# Both published tables (threshold 70 and 75) combine into three bins.
# The R=0 column splits as outcome-only missingness + full missingness.
_QOL_COUNTS: dict[int, dict[str, tuple[int, ...] | int]] = {
    Arm.TREATED: {"alive": (136, 10, 63), "dead": 13, "missing_outcome": 23, "missing": 93},
    Arm.CONTROL: {"alive": (89, 18, 71), "dead": 11, "missing_outcome": 30, "missing": 117},
}


def qol_dataset() -> GeneralizedPanel:
    cells: list[GeneralizedCell] = []
    for arm, row in _QOL_COUNTS.items():
        for bin_, count in zip(QOL_BINS, row["alive"]):
            cells.append(GeneralizedCell(status=CellStatus.ALIVE, arm=arm, t=1, count=count, bin=bin_))
        cells.append(GeneralizedCell(status=CellStatus.DEAD, arm=arm, t=1, count=row["dead"]))
        cells.append(
            GeneralizedCell(status=CellStatus.MISSING_OUTCOME, arm=arm, t=1, count=row["missing_outcome"])
        )
        cells.append(GeneralizedCell(status=CellStatus.MISSING, arm=arm, t=1, count=row["missing"]))
    return GeneralizedPanel(grid=TimeGrid(labels=QOL_LABELS), n0=SWOG_N0, n1=SWOG_N1, cells=tuple(cells))


# ---------------------------------------------------------------------------
# Selector resolution
# ---------------------------------------------------------------------------

EMBEDDED = ("swog:main_text", "swog:appendix", "qol")


def load_panel(selector: str, strict: bool = True) -> ContingencyPanel | GeneralizedPanel:
    """An embedded dataset selector or a CSV path; the CSV header decides the format."""
    if selector.startswith("swog:"):
        if selector not in EMBEDDED:
            raise PanelParseError(f"unknown dataset {selector!r}; use swog:main_text or swog:appendix")
        return swog_dataset(SwogVariant(selector.split(":", 1)[1]))
    if selector == "qol":
        return qol_dataset()
    text = Path(selector).read_text(encoding="utf-8")
    header = next(
        (line.strip().lower() for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")),
        "",
    )
    if "status" in header.split(","):
        return load_generalized_csv(text)
    return load_counts_csv(text, strict=strict)
