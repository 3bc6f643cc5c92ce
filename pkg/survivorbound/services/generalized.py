"""Generalized always-survivor bounds for real-valued outcomes with missingness.

An individual is observed (R=1) or not (R=0); observed individuals are
alive with an outcome value, or dead. The bounds compare the treatment-arm
event {Y in y_a} with the control-arm event {Y not in y_b}. Unidentified
masses in the R=0 cells enter only as sensitivity parameters.
"""

from __future__ import annotations

import io
import logging
from typing import Protocol

import pandas as pd

from survivorbound.core.errors import (
    BoundNotApplicableError,
    OutcomeSetError,
    PanelParseError,
    SensitivityParamsError,
    UndefinedBoundError,
)
from survivorbound.models.enums import Arm, CellStatus, HeadcountRounding
from survivorbound.models.outcome_sets import Interval, OutcomeSet, parse_outcome_set
from survivorbound.models.schemas import (
    BoundValue,
    GeneralizedCell,
    GeneralizedPanel,
    MissingSensitivityParams,
    QolAnalysis,
    RowSumMismatch,
    TestResult,
    TimeGrid,
    ValidationReport,
)
from survivorbound.services.contrasts import headcount
from survivorbound.services.inference import wald_diff_test

logger = logging.getLogger("survivorbound.generalized")

_PARAM_TOL = 1e-12


class GeneralizedMargins(Protocol):
    """Observed-data probabilities of a generalized panel or an exact distribution."""

    def prob_observed(
        self, arm: int, t: int, outcome_set: OutcomeSet | None = None, inside: bool = True
    ) -> float: ...

    def prob_dead(self, arm: int, t: int) -> float: ...

    def prob_missing(self, arm: int, t: int) -> float: ...


# ── Bounds ──────────────────────────────────────────────────────────────


def lb_plain(src: GeneralizedMargins, t: int, y_a: OutcomeSet, y_b: OutcomeSet) -> float:
    """P(Y in y_a, S=1, R=1 | X=1) + P(Y not in y_b, S=1, R=1 | X=0) - 1."""
    return (
        src.prob_observed(Arm.TREATED, t, y_a, inside=True)
        + src.prob_observed(Arm.CONTROL, t, y_b, inside=False)
        - 1.0
    )


def normalized_denominator(src: GeneralizedMargins, t: int) -> float:
    return (
        src.prob_observed(Arm.TREATED, t)
        - src.prob_missing(Arm.CONTROL, t)
        - src.prob_dead(Arm.CONTROL, t)
    )


def lb_normalized(src: GeneralizedMargins, t: int, y_a: OutcomeSet, y_b: OutcomeSet) -> float:
    """lb_plain over a lower bound on the mass of always-observed survivors."""
    den = normalized_denominator(src, t)
    if den <= 0:
        raise UndefinedBoundError(f"normalizing denominator {den:.6g} is not positive")
    return lb_plain(src, t, y_a, y_b) / den


def lb_conditional(src: GeneralizedMargins, t: int, y_a: OutcomeSet, y_b: OutcomeSet) -> float:
    """Bound on the contrast conditional on S_1 = S_0 = 1; needs lb_plain > 0."""
    num = lb_plain(src, t, y_a, y_b)
    if num <= 0:
        raise BoundNotApplicableError(f"lb_plain = {num:.6g} is not positive")
    den = (
        src.prob_observed(Arm.TREATED, t)
        + src.prob_missing(Arm.TREATED, t)
        - src.prob_dead(Arm.CONTROL, t)
    )
    if den <= 0:
        raise BoundNotApplicableError(f"conditional denominator {den:.6g} is not positive")
    return num / den


def lb_monotone(src: GeneralizedMargins, t: int, y_a: OutcomeSet, y_b: OutcomeSet) -> BoundValue:
    """Bound under monotone observed survival (control observed survivors are treated ones too).

    ``normalized`` is None when the control arm has no observed survivors.
    """
    raw = src.prob_observed(Arm.CONTROL, t, y_b, inside=False) - src.prob_observed(
        Arm.TREATED, t, y_a, inside=False
    )
    den = src.prob_observed(Arm.CONTROL, t)
    return BoundValue(raw=raw, normalized=raw / den if den > 0 else None, denominator=den)


def monotone_test(
    panel: GeneralizedPanel,
    t: int,
    y_a: OutcomeSet,
    y_b: OutcomeSet,
    continuity: bool = True,
    alpha: float = 0.05,
) -> TestResult:
    """Wald test behind lb_monotone: #(Y not in y_b, observed | X=0) vs #(Y not in y_a, observed | X=1)."""
    k0 = panel.count_observed(Arm.CONTROL, t, y_b, inside=False)
    k1 = panel.count_observed(Arm.TREATED, t, y_a, inside=False)
    return wald_diff_test(k0, panel.n0, k1, panel.n1, continuity=continuity, alpha=alpha)


def _check_params(
    src: GeneralizedMargins,
    t_treated: int,
    t_control: int,
    params: MissingSensitivityParams,
    need_totals: bool,
) -> None:
    r0_treated = src.prob_missing(Arm.TREATED, t_treated)
    r0_control = src.prob_missing(Arm.CONTROL, t_control)
    problems = []
    if params.p_ya_s1_r0_x1 > r0_treated + _PARAM_TOL:
        problems.append(f"p_ya_s1_r0_x1={params.p_ya_s1_r0_x1} exceeds P(R=0|X=1)={r0_treated:.6g}")
    if params.p_s1_r0_x1 > r0_treated + _PARAM_TOL:
        problems.append(f"p_s1_r0_x1={params.p_s1_r0_x1} exceeds P(R=0|X=1)={r0_treated:.6g}")
    if params.p_not_yb_s1_r0_x0 > r0_control + _PARAM_TOL:
        problems.append(f"p_not_yb_s1_r0_x0={params.p_not_yb_s1_r0_x0} exceeds P(R=0|X=0)={r0_control:.6g}")
    if params.p_s1_r0_x0 > r0_control + _PARAM_TOL:
        problems.append(f"p_s1_r0_x0={params.p_s1_r0_x0} exceeds P(R=0|X=0)={r0_control:.6g}")
    if need_totals:
        if params.p_ya_s1_r0_x1 > params.p_s1_r0_x1 + _PARAM_TOL:
            problems.append("p_ya_s1_r0_x1 exceeds p_s1_r0_x1")
        if params.p_not_yb_s1_r0_x0 > params.p_s1_r0_x0 + _PARAM_TOL:
            problems.append("p_not_yb_s1_r0_x0 exceeds p_s1_r0_x0")
    if problems:
        raise SensitivityParamsError("; ".join(problems))


def lb_missing_sensitivity(
    src: GeneralizedMargins,
    t: int,
    y_a: OutcomeSet,
    y_b: OutcomeSet,
    params: MissingSensitivityParams,
) -> BoundValue:
    """lb_plain completed with hypothesized R=0 content.

    With exact parameters ``raw`` is P(Y_1 in y_a, S_1=1) + P(Y_0 not in y_b, S_0=1) - 1
    over everyone, observed or not. ``normalized`` is reported only when raw >= 0.
    """
    _check_params(src, t, t, params, need_totals=False)
    raw = lb_plain(src, t, y_a, y_b) + params.p_ya_s1_r0_x1 + params.p_not_yb_s1_r0_x0
    if raw < 0:
        return BoundValue(raw=raw)
    _check_params(src, t, t, params, need_totals=True)
    den = (
        src.prob_observed(Arm.TREATED, t)
        + params.p_s1_r0_x1
        - src.prob_dead(Arm.CONTROL, t)
        - (src.prob_missing(Arm.CONTROL, t) - params.p_s1_r0_x0)
    )
    if den <= 0:
        raise UndefinedBoundError(f"missing-data denominator {den:.6g} is not positive")
    return BoundValue(raw=raw, normalized=raw / den, denominator=den)


def mono_sensitivity_two_times(
    src: GeneralizedMargins,
    t_lower: int,
    t_upper: int,
    y_a: OutcomeSet,
    y_b: OutcomeSet,
    params: MissingSensitivityParams,
) -> BoundValue:
    """Control arm at ``t_lower`` against treatment arm at ``t_upper``, corrected by r.

    With exact parameters, ``raw`` equals
    P(Y_1(t_U) in y_a, Y_0(t_L) not in y_b, S_1(t_U)=S_0(t_L)=1)
    - P(Y_1(t_U) not in y_a, Y_0(t_L) in y_b, S_1(t_U)=S_0(t_L)=1)
    and ``normalized`` the same contrast conditional on S_1(t_U)=S_0(t_L)=1.
    """
    _check_params(src, t_upper, t_lower, params, need_totals=True)
    control = src.prob_observed(Arm.CONTROL, t_lower, y_b, inside=False) + params.p_not_yb_s1_r0_x0
    treated = src.prob_observed(Arm.TREATED, t_upper, y_a, inside=False) + (
        params.p_s1_r0_x1 - params.p_ya_s1_r0_x1
    )
    raw = control - treated - params.r_value
    den = src.prob_observed(Arm.CONTROL, t_lower) + params.p_s1_r0_x0 - params.p_s1u_s0l_neq1
    if den <= 0:
        raise UndefinedBoundError(f"two-time denominator {den:.6g} is not positive")
    return BoundValue(raw=raw, normalized=raw / den, denominator=den)


# ── Combined report ─────────────────────────────────────────────────────


def qol_analysis(
    panel: GeneralizedPanel,
    t: int,
    y_a: OutcomeSet,
    y_b: OutcomeSet,
    n_total: int | None = None,
    alpha: float = 0.05,
) -> QolAnalysis:
    """Every generalized bound for one request, with the monotone Wald test in both continuity modes."""
    n_total = n_total or panel.n0 + panel.n1

    normalized: float | None
    normalized_note: str | None = None
    try:
        normalized = lb_normalized(panel, t, y_a, y_b)
    except UndefinedBoundError as exc:
        normalized, normalized_note = None, str(exc)

    conditional: float | None
    conditional_note: str | None = None
    try:
        conditional = lb_conditional(panel, t, y_a, y_b)
    except BoundNotApplicableError as exc:
        conditional, conditional_note = None, f"not applicable: {exc}"

    mono = lb_monotone(panel, t, y_a, y_b)
    return QolAnalysis(
        t=t,
        label=panel.grid.label(t),
        y_a=str(y_a),
        y_b=str(y_b),
        n_total=n_total,
        lb_plain=lb_plain(panel, t, y_a, y_b),
        lb_normalized=normalized,
        lb_normalized_note=normalized_note,
        lb_conditional=conditional,
        lb_conditional_note=conditional_note,
        monotone=mono,
        test_continuity=monotone_test(panel, t, y_a, y_b, continuity=True, alpha=alpha),
        test_plain=monotone_test(panel, t, y_a, y_b, continuity=False, alpha=alpha),
        headcount_floor=headcount(mono.raw, n_total, HeadcountRounding.FLOOR),
        headcount_nearest=headcount(mono.raw, n_total, HeadcountRounding.NEAREST),
    )


# ── Ingestion and validation ────────────────────────────────────────────


def validate_generalized_panel(panel: GeneralizedPanel) -> ValidationReport:
    """Row-sum warnings; the cell model itself rules out structural violations."""
    warnings = []
    for arm in (Arm.CONTROL, Arm.TREATED):
        expected = panel.arm_size(arm)
        for t in range(1, panel.grid.count + 1):
            actual = panel.row_sum(arm, t)
            if actual != expected:
                warnings.append(RowSumMismatch(arm=arm, t=t, expected=expected, actual=actual))
    return ValidationReport(warnings=tuple(warnings))


_INDIVIDUAL_HEADER = ("arm", "time", "status", "y")
_BINNED_HEADER = ("arm", "time", "status", "bin", "count")


def load_generalized_csv(text: str) -> GeneralizedPanel:
    """Parse individual records (``arm,time,status,y``) or binned counts (``arm,time,status,bin,count``).

    ``y`` (or ``bin``, an interval expression such as ``(70,75]``) is present
    only for alive rows. Arm sizes come from ``#n0=``/``#n1=`` preamble rows
    or are inferred from per-time sums.
    """
    declared: dict[str, int] = {}
    body: list[str] = []
    for raw in text.replace("\r\n", "\n").split("\n"):
        line = raw.strip()
        if line.startswith("#"):
            key, sep, value = line[1:].partition("=")
            if sep and key.strip() in ("n0", "n1"):
                try:
                    declared[key.strip()] = int(value)
                except ValueError:
                    raise PanelParseError(f"bad arm size {value.strip()!r}") from None
        elif line:
            body.append(line)
    if len(body) < 2:
        raise PanelParseError("no data rows")

    try:
        frame = pd.read_csv(io.StringIO("\n".join(body)), dtype=str, keep_default_na=False)
    except pd.errors.ParserError as exc:
        raise PanelParseError(f"malformed row: {exc}") from exc
    frame.columns = [c.strip() for c in frame.columns]
    header = tuple(frame.columns)
    if header == _INDIVIDUAL_HEADER:
        frame["bin"] = frame["y"]
        frame["count"] = "1"
        binned = False
    elif header == _BINNED_HEADER:
        binned = True
    else:
        raise PanelParseError(f"unrecognised header {','.join(header)}", 1)

    labels: list[str] = []
    totals: dict[tuple[int, int, CellStatus, Interval | None], int] = {}
    for lineno, row in enumerate(frame.itertuples(index=False), start=2):
        record = row._asdict()
        try:
            arm = Arm(int(record["arm"]))
            status = CellStatus(record["status"].strip())
            count = int(record["count"])
        except ValueError as exc:
            raise PanelParseError(str(exc), lineno) from None
        if count < 0:
            raise PanelParseError(f"negative count {count}", lineno)
        label = record["time"].strip()
        if not label:
            raise PanelParseError("empty time label", lineno)
        if label not in labels:
            labels.append(label)
        value = record["bin"].strip()
        if (status == CellStatus.ALIVE) != bool(value):
            raise PanelParseError("an outcome is required for alive rows and forbidden otherwise", lineno)
        bin_: Interval | None = None
        if value:
            try:
                bin_ = _parse_bin(value) if binned else Interval.point(float(value))
            except (ValueError, OutcomeSetError) as exc:
                raise PanelParseError(f"bad outcome {value!r}: {exc}", lineno) from None
        key = (int(arm), labels.index(label) + 1, status, bin_)
        totals[key] = totals.get(key, 0) + count

    cells = tuple(
        GeneralizedCell(status=status, arm=arm, t=t, count=count, bin=bin_)
        for (arm, t, status, bin_), count in totals.items()
    )
    sizes = {}
    for arm, name in ((Arm.CONTROL, "n0"), (Arm.TREATED, "n1")):
        if name in declared:
            sizes[name] = declared[name]
            continue
        sums = {
            sum(c.count for c in cells if c.arm == arm and c.t == t) for t in range(1, len(labels) + 1)
        }
        if len(sums) != 1:
            raise PanelParseError(f"cannot infer size of arm {int(arm)}: per-time sums differ {sorted(sums)}")
        sizes[name] = sums.pop()

    panel = GeneralizedPanel(grid=TimeGrid(labels=tuple(labels)), n0=sizes["n0"], n1=sizes["n1"], cells=cells)
    for w in validate_generalized_panel(panel).warnings:
        logger.warning("Row sum mismatch: arm=%d t=%d expected=%d actual=%d", w.arm, w.t, w.expected, w.actual)
    return panel


def _parse_bin(expr: str) -> Interval:
    parsed = parse_outcome_set(expr)
    if len(parsed.intervals) != 1:
        raise OutcomeSetError(f"a bin must be a single interval, got {expr!r}")
    return parsed.intervals[0]
