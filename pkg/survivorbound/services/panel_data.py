"""Observed-data model: structural zeros, empirical probabilities, CSV I/O.

Counts are exact integers and probabilities are always computed on demand
as ratios. The CSV schema is ``arm,time,y,s,count`` with optional
``#n0=<int>`` / ``#n1=<int>`` preamble rows declaring arm sizes.
"""

from __future__ import annotations

import io
import logging
from typing import Callable, Iterable, Mapping

import pandas as pd

from survivorbound.core.errors import PanelParseError, StructuralZeroError
from survivorbound.models.enums import Arm, OutcomeCode, SurvivalCode
from survivorbound.models.schemas import (
    ALLOWED_CELLS,
    ContingencyPanel,
    PanelCell,
    RowSumMismatch,
    StructuralViolation,
    TimeGrid,
    ValidationReport,
)

logger = logging.getLogger("survivorbound.panel_data")

CSV_HEADER = ("arm", "time", "y", "s", "count")

# Joint-compatibility rules; a count in a cell matching any of these is an error.
STRUCTURAL_ZEROS: tuple[tuple[str, Callable[[int, int], bool]], ...] = (
    ("s=2 and y≠3", lambda y, s: s == 2 and y != 3),
    ("y=3 and s≠2", lambda y, s: y == 3 and s != 2),
    ("s=0 and y≠2", lambda y, s: s == 0 and y != 2),
    ("y=2 and s≠0", lambda y, s: y == 2 and s != 0),
)


def violated_condition(y: int, s: int) -> str | None:
    """Name of the first structural-zero rule the cell (y, s) breaks, if any."""
    for name, rule in STRUCTURAL_ZEROS:
        if rule(y, s):
            return name
    return None


def build_panel(
    labels: Iterable[str],
    n0: int,
    n1: int,
    counts: Mapping[tuple[int, int, int, int], int],
) -> ContingencyPanel:
    """Canonical panel from ``(arm, t, y, s) -> count``.

    Every allowed cell is present (zeros included) and cells are sorted, so
    two panels with the same counts compare equal.
    """
    grid = TimeGrid(labels=tuple(labels))
    merged: dict[tuple[int, int, int, int], int] = {}
    for arm in (Arm.CONTROL, Arm.TREATED):
        for t in range(1, grid.count + 1):
            for y, s in ALLOWED_CELLS:
                merged[(int(arm), t, y, s)] = 0
    for key, value in counts.items():
        if value or key in merged:
            merged[key] = value
    cells = tuple(
        PanelCell(arm=a, t=t, y=y, s=s, count=c) for (a, t, y, s), c in sorted(merged.items())
    )
    return ContingencyPanel(grid=grid, n0=n0, n1=n1, cells=cells)


# ── Public API ──────────────────────────────────────────────────────────


def validate_panel(panel: ContingencyPanel) -> ValidationReport:
    """Report structural-zero violations (errors) and row-sum mismatches (warnings)."""
    errors: list[StructuralViolation] = []
    for cell in panel.cells:
        if cell.count == 0:
            continue
        condition = violated_condition(int(cell.y), int(cell.s))
        if condition is not None:
            errors.append(
                StructuralViolation(
                    arm=cell.arm, t=cell.t, y=int(cell.y), s=int(cell.s),
                    count=cell.count, condition=condition,
                )
            )

    warnings: list[RowSumMismatch] = []
    for arm in (Arm.CONTROL, Arm.TREATED):
        expected = panel.arm_size(arm)
        for t in range(1, panel.grid.count + 1):
            actual = panel.row_sum(arm, t)
            if actual != expected:
                warnings.append(RowSumMismatch(arm=arm, t=t, expected=expected, actual=actual))

    return ValidationReport(errors=tuple(errors), warnings=tuple(warnings))


def empirical_prob(panel: ContingencyPanel, y: int, s: int, x: int, t: int) -> float:
    """P(Y(t)=y, S(t)=s | X=x) = count / n_x."""
    OutcomeCode(y)
    SurvivalCode(s)
    Arm(x)
    panel.grid.check(t)
    return panel.prob(y, s, x, t)


def load_counts_csv(text: str, strict: bool = True) -> ContingencyPanel:
    """Parse a counts CSV into a panel and validate it.

    With ``strict`` a structural-zero violation raises ``StructuralZeroError``;
    otherwise the panel is returned and the caller inspects ``validate_panel``.
    """
    lines = text.replace("\r\n", "\n").replace("\r", "\n").split("\n")
    declared: dict[str, int] = {}
    body: list[str] = []
    body_lines: list[int] = []
    for lineno, raw in enumerate(lines, 1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, sep, value = line[1:].partition("=")
            key = key.strip()
            if sep and key in ("n0", "n1"):
                try:
                    declared[key] = int(value.strip())
                except ValueError:
                    raise PanelParseError(f"bad arm size {value.strip()!r}", lineno) from None
                if declared[key] < 0:
                    raise PanelParseError(f"negative arm size for {key}", lineno)
            continue
        body.append(line)
        body_lines.append(lineno)

    if not body:
        raise PanelParseError("no data rows")
    try:
        frame = pd.read_csv(io.StringIO("\n".join(body)), dtype=str, keep_default_na=False)
    except pd.errors.ParserError as exc:
        raise PanelParseError(f"malformed row: {exc}") from exc
    header = tuple(c.strip() for c in frame.columns)
    if header != CSV_HEADER:
        raise PanelParseError(f"expected header {','.join(CSV_HEADER)}, got {','.join(header)}", body_lines[0])
    if frame.empty:
        raise PanelParseError("no data rows")

    labels: list[str] = []
    counts: dict[tuple[int, int, int, int], int] = {}
    for row_no, row in enumerate(frame.itertuples(index=False), start=1):
        lineno = body_lines[row_no]
        arm_text, label, y_text, s_text, count_text = (str(v).strip() for v in row)
        arm = _parse_code(arm_text, Arm, "arm", lineno)
        y = _parse_code(y_text, OutcomeCode, "outcome code", lineno)
        s = _parse_code(s_text, SurvivalCode, "survival code", lineno)
        count = _parse_int(count_text, "count", lineno)
        if count < 0:
            raise PanelParseError(f"negative count {count}", lineno)
        if not label:
            raise PanelParseError("empty time label", lineno)
        if label not in labels:
            labels.append(label)
        key = (arm, labels.index(label) + 1, y, s)
        if key in counts:
            raise PanelParseError(f"duplicate row for arm={arm} time={label!r} y={y} s={s}", lineno)
        counts[key] = count

    n0 = declared.get("n0")
    n1 = declared.get("n1")
    if n0 is None:
        n0 = _infer_arm_size(counts, Arm.CONTROL, len(labels))
    if n1 is None:
        n1 = _infer_arm_size(counts, Arm.TREATED, len(labels))

    panel = build_panel(labels, n0, n1, counts)
    report = validate_panel(panel)
    for w in report.warnings:
        logger.warning(
            "Row sum mismatch: arm=%d t=%s expected=%d actual=%d",
            w.arm, panel.grid.label(w.t), w.expected, w.actual,
        )
    if report.errors and strict:
        raise StructuralZeroError(report)
    logger.debug("Loaded panel: %d timepoints, n0=%d, n1=%d", panel.grid.count, n0, n1)
    return panel


def serialize_counts_csv(panel: ContingencyPanel) -> str:
    """Inverse of ``load_counts_csv``: preamble with arm sizes, then one row per cell."""
    records = [
        {
            "arm": int(c.arm),
            "time": panel.grid.label(c.t),
            "y": int(c.y),
            "s": int(c.s),
            "count": c.count,
        }
        for c in panel.cells
    ]
    frame = pd.DataFrame.from_records(records, columns=list(CSV_HEADER))
    preamble = f"#n0={panel.n0}\n#n1={panel.n1}\n"
    return preamble + frame.to_csv(index=False, lineterminator="\n")


# ── Helpers ─────────────────────────────────────────────────────────────


def _parse_int(text: str, what: str, lineno: int) -> int:
    try:
        return int(text)
    except ValueError:
        raise PanelParseError(f"malformed {what} {text!r}", lineno) from None


def _parse_code(text: str, enum: type, what: str, lineno: int) -> int:
    value = _parse_int(text, what, lineno)
    try:
        return int(enum(value))
    except ValueError:
        raise PanelParseError(f"unknown {what} {value}", lineno) from None


def _infer_arm_size(counts: Mapping[tuple[int, int, int, int], int], arm: int, n_times: int) -> int:
    sums = {
        t: sum(v for (a, tt, _, _), v in counts.items() if a == arm and tt == t)
        for t in range(1, n_times + 1)
    }
    distinct = set(sums.values())
    if len(distinct) != 1:
        raise PanelParseError(
            f"cannot infer size of arm {arm}: per-time sums differ {sorted(distinct)}; "
            f"declare it with a #n{arm}= preamble row"
        )
    return distinct.pop()
