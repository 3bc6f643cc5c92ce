"""Markdown / TSV / JSON rendering of analysis results.

Tables are assembled as pandas DataFrames with display-rounded strings;
JSON always carries the full-precision pydantic models.
"""

from __future__ import annotations

import json
from typing import Any, Sequence

import pandas as pd
from pydantic import BaseModel

from survivorbound.models.enums import CheckStatus, OutputFormat, Regime
from survivorbound.models.schemas import (
    AnalysisTable,
    BoundValue,
    ConfidenceInterval,
    PosteriorSummary,
    QolAnalysis,
    ReproductionReport,
    SensitivitySweep,
    ValidationReport,
    VerificationReport,
)

RULE = "=" * 60
THIN_RULE = "-" * 60


# ── Number formatting ───────────────────────────────────────────────────


def fmt_num(value: float | None, digits: int = 2) -> str:
    if value is None:
        return "n/a"
    text = f"{value:.{digits}f}"
    # no "-0.00"
    return text[1:] if text.startswith("-") and float(text) == 0 else text


def fmt_p(p: float) -> str:
    return "<0.0001" if p < 1e-4 else f"{p:.4f}"


def fmt_ci(ci: ConfidenceInterval, digits: int = 2) -> str:
    return f"({fmt_num(ci.lower, digits)}, {fmt_num(ci.upper, digits)})"


# ── Generic plumbing ────────────────────────────────────────────────────


def _dump(payload: BaseModel | Sequence[BaseModel] | dict[str, Any]) -> str:
    def plain(obj: Any) -> Any:
        if isinstance(obj, BaseModel):
            return obj.model_dump(mode="json")
        if isinstance(obj, dict):
            return {k: plain(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [plain(v) for v in obj]
        return obj

    if isinstance(payload, BaseModel):
        return payload.model_dump_json(indent=2)
    return json.dumps(plain(payload), indent=2)


def _tsv(frame: pd.DataFrame) -> str:
    return frame.to_csv(sep="\t", index=False, lineterminator="\n")


def _markdown(title: str, header: Sequence[str], frame: pd.DataFrame | None, notes: Sequence[str] = ()) -> str:
    lines = [title, RULE, *header]
    if frame is not None and not frame.empty:
        if header:
            lines.append("")
        lines.append(frame.to_markdown(index=False))
    if notes:
        lines.append("")
        lines.extend(notes)
    return "\n".join(lines) + "\n"


# ── Validation ──────────────────────────────────────────────────────────


def validation_frame(report: ValidationReport) -> pd.DataFrame:
    rows = [
        {"kind": "error", "arm": int(e.arm), "t": e.t, "detail": f"y={e.y} s={e.s} count={e.count} ({e.condition})"}
        for e in report.errors
    ]
    rows += [
        {"kind": "warning", "arm": int(w.arm), "t": w.t, "detail": f"row sum {w.actual} != arm size {w.expected}"}
        for w in report.warnings
    ]
    return pd.DataFrame(rows, columns=["kind", "arm", "t", "detail"])


def render_validation(report: ValidationReport, source: str, fmt: OutputFormat) -> str:
    if fmt == OutputFormat.JSON:
        return _dump({"source": source, "ok": report.ok, "report": report})
    frame = validation_frame(report)
    if fmt == OutputFormat.TSV:
        return _tsv(frame)
    status = "OK" if report.ok else "INVALID"
    header = [
        f"Source  : {source}",
        f"Status  : {status}",
        f"Errors  : {len(report.errors)}",
        f"Warnings: {len(report.warnings)}",
    ]
    return _markdown("Panel Validation", header, frame)


# ── Time-grid analyses ──────────────────────────────────────────────────


def analysis_frame(table: AnalysisTable) -> pd.DataFrame:
    rows = []
    for row in table.rows:
        rows.append(
            {
                "time": row.label,
                "estimate": fmt_num(row.contrast.delta),
                "95% CI": fmt_ci(row.test.ci95),
                "99% CI": fmt_ci(row.test.ci99),
                "p (one-sided)": fmt_p(row.test.p_one_sided),
                "significant": "yes" if row.test.significant else "no",
                "headcount": row.headcount,
                "break-even": fmt_num(row.breakeven) if row.breakeven is not None else "",
                "naive survivors": fmt_num(row.naive_survivor_difference),
            }
        )
    frame = pd.DataFrame(rows)
    if table.regime == Regime.NO_ASSUMPTIONS:
        frame = frame.drop(columns=["break-even"])
    return frame


def falsification_note(table: AnalysisTable) -> str | None:
    if not table.falsification:
        return None
    failed = [c for c in table.falsification if c.status == CheckStatus.FALSIFIED]
    if not failed:
        worst = min(c.slack for c in table.falsification)
        return (
            f"Falsification: we fail to falsify {table.regime} at all {len(table.falsification)} "
            f"timepoints (minimum slack {worst:.4f})."
        )
    times = ", ".join(str(c.t) for c in failed)
    return f"Falsification: {table.regime} is FALSIFIED at t = {times}."


def _analysis_block(table: AnalysisTable) -> str:
    header = [
        f"Regime    : {table.regime}",
        f"Direction : y = {table.y}",
        f"Alpha     : {table.alpha} ({table.correction}, threshold {table.alpha_adjusted:.5f})",
        f"Continuity: {'on' if table.continuity else 'off'}",
        f"Enrolled  : {table.n_total}",
    ]
    notes = ["Naive survivors: observed-survivor comparison, a diagnostic and not an estimand."]
    note = falsification_note(table)
    if note:
        notes.insert(0, note)
    return _markdown(f"Always-survivor analysis ({table.regime})", header, analysis_frame(table), notes)


def render_analysis(tables: Sequence[AnalysisTable], fmt: OutputFormat) -> str:
    if fmt == OutputFormat.JSON:
        return _dump(tables[0] if len(tables) == 1 else list(tables))
    if fmt == OutputFormat.TSV:
        frames = [analysis_frame(t).assign(regime=str(t.regime)) for t in tables]
        frame = pd.concat(frames, ignore_index=True)
        return _tsv(frame[["regime", *[c for c in frame.columns if c != "regime"]]])
    return "\n".join(_analysis_block(t) for t in tables)


# ── Sensitivity ─────────────────────────────────────────────────────────


def sweep_frame(sweep: SensitivitySweep) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                sweep.kind.value: fmt_num(r.value, 4),
                "adjusted": fmt_num(r.adjusted_delta, 4),
                "conclusion": "excess established" if r.conclusion else "not established",
            }
            for r in sweep.rows
        ]
    )


def render_sweep(sweeps: Sequence[SensitivitySweep], fmt: OutputFormat) -> str:
    if fmt == OutputFormat.JSON:
        return _dump(sweeps[0] if len(sweeps) == 1 else list(sweeps))
    if fmt == OutputFormat.TSV:
        frame = pd.concat([sweep_frame(s).assign(time=s.label) for s in sweeps], ignore_index=True)
        return _tsv(frame)
    blocks = []
    for s in sweeps:
        header = [
            f"Time      : {s.label}",
            f"Parameter : {s.kind}",
            f"Base      : {s.base_delta:.4f}",
            f"Break-even: {s.breakeven:.4f}",
        ]
        blocks.append(_markdown("Monotonicity sensitivity", header, sweep_frame(s)))
    return "\n".join(blocks)


# ── Generalized outcomes ────────────────────────────────────────────────


def qol_frame(analysis: QolAnalysis) -> pd.DataFrame:
    rows = [
        {"bound": "lb_plain", "value": fmt_num(analysis.lb_plain, 4), "note": ""},
        {
            "bound": "lb_normalized",
            "value": fmt_num(analysis.lb_normalized, 4),
            "note": analysis.lb_normalized_note or "",
        },
        {
            "bound": "lb_conditional",
            "value": fmt_num(analysis.lb_conditional, 4),
            "note": analysis.lb_conditional_note or "",
        },
        {
            "bound": "lb_monotone",
            "value": fmt_num(analysis.monotone.raw, 4),
            "note": f"normalized {fmt_num(analysis.monotone.normalized, 4)}",
        },
    ]
    for name, test in (("continuity", analysis.test_continuity), ("plain", analysis.test_plain)):
        rows.append(
            {
                "bound": f"monotone test ({name})",
                "value": fmt_p(test.p_one_sided),
                "note": f"95% CI {fmt_ci(test.ci95)}, 99% CI {fmt_ci(test.ci99)}",
            }
        )
    return pd.DataFrame(rows)


def _bound_rows(extras: dict[str, BoundValue]) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {
                "bound": name,
                "value": fmt_num(b.raw, 4),
                "note": "normalized undefined" if b.normalized is None else f"normalized {fmt_num(b.normalized, 4)}",
            }
            for name, b in extras.items()
        ]
    )


def render_generalized(
    analysis: QolAnalysis, fmt: OutputFormat, extras: dict[str, BoundValue] | None = None
) -> str:
    extras = extras or {}
    if fmt == OutputFormat.JSON:
        if not extras:
            return _dump(analysis)
        return _dump({"analysis": analysis, "sensitivity": extras})
    frame = qol_frame(analysis)
    if extras:
        frame = pd.concat([frame, _bound_rows(extras)], ignore_index=True)
    if fmt == OutputFormat.TSV:
        return _tsv(frame)
    header = [
        f"Time     : {analysis.label}",
        f"y_a      : {analysis.y_a}",
        f"y_b      : {analysis.y_b}",
        f"Enrolled : {analysis.n_total}",
        f"Headcount: {analysis.headcount_nearest} (floor {analysis.headcount_floor})",
    ]
    return _markdown("Generalized outcome bounds", header, frame)


# ── Verification ────────────────────────────────────────────────────────


def render_verification(report: VerificationReport, fmt: OutputFormat) -> str:
    if fmt == OutputFormat.JSON:
        return _dump(report)
    summary = pd.DataFrame(
        [
            {"metric": "checks", "value": str(report.checks_run)},
            {"metric": "max identity gap", "value": f"{report.max_identity_gap:.3e}"},
            {"metric": "min slack", "value": "n/a" if report.min_slack is None else f"{report.min_slack:.3e}"},
            {"metric": "failures", "value": str(len(report.failures))},
        ]
    )
    if fmt == OutputFormat.TSV:
        return _tsv(summary)
    notes = [f"NOTE: {n}" for n in report.notes]
    notes += [f"FAIL: {f}" for f in report.failures]
    header = [f"Status: {'PASSED' if report.passed else 'FAILED'}"]
    return _markdown("Counterfactual verification", header, summary, notes)


# ── Posterior ───────────────────────────────────────────────────────────


def posterior_frame(summary: PosteriorSummary) -> pd.DataFrame:
    return pd.DataFrame(
        [
            {"statistic": "mean", "value": f"{summary.mean:.4f}"},
            {"statistic": "median", "value": f"{summary.median:.4f}"},
            {"statistic": "sd", "value": f"{summary.sd:.4f}"},
            {"statistic": "50% interval", "value": fmt_ci(summary.ci50, 4)},
            {"statistic": "95% interval", "value": fmt_ci(summary.ci95, 4)},
            {"statistic": "99% interval", "value": fmt_ci(summary.ci99, 4)},
            {"statistic": "P(> 0)", "value": f"{summary.prob_positive:.4f}"},
        ]
    )


def render_posterior(summary: PosteriorSummary, fmt: OutputFormat) -> str:
    if fmt == OutputFormat.JSON:
        return _dump(summary)
    frame = posterior_frame(summary)
    if fmt == OutputFormat.TSV:
        return _tsv(frame)
    header = [
        f"Quantity: {summary.quantity}",
        f"Draws   : {summary.n_draws:,} (seed {summary.seed})",
        f"Prior   : alpha0={list(summary.prior.alpha0)} alpha1={list(summary.prior.alpha1)}",
    ]
    return _markdown("Dirichlet posterior", header, frame)


# ── Reproduction ────────────────────────────────────────────────────────


def comparison_frame(report: ReproductionReport) -> pd.DataFrame:
    rows = []
    for c in report.comparisons:
        computed = c.computed if isinstance(c.computed, str) else f"{c.computed:.4g}"
        status = "match" if c.matches else ("exception" if c.exception else "MISMATCH")
        rows.append(
            {
                "table": c.table, "column": c.column, "quantity": c.quantity,
                "printed": c.printed, "computed": computed, "status": status,
            }
        )
    return pd.DataFrame(rows)


def render_reproduction(report: ReproductionReport, fmt: OutputFormat) -> str:
    if fmt == OutputFormat.JSON:
        return _dump(report)
    if fmt == OutputFormat.TSV:
        return _tsv(comparison_frame(report))

    matched = sum(c.matches for c in report.comparisons)
    blocks = [
        _markdown(
            "Published analysis reproduction",
            [
                f"Variant    : {report.variant}",
                f"Comparisons: {len(report.comparisons)}",
                f"Matched    : {matched}",
                f"Exceptions : {len(report.exceptions)}",
                f"Failures   : {len(report.failures)}",
            ],
            None,
        )
    ]
    blocks += [_analysis_block(t) for t in report.tables]
    blocks += [render_generalized(q, OutputFormat.MARKDOWN) for q in report.quality_of_life]

    narrative = pd.DataFrame(
        [
            {
                "name": n.name,
                "value": str(n.value) if isinstance(n.value, int) else f"{n.value:.4f}",
                "note": n.note,
            }
            for n in report.narratives
        ]
    )
    blocks.append(_markdown("Narrative values", [], narrative))

    lines = ["Documented exceptions", THIN_RULE]
    for c in report.exceptions:
        lines.append(f"  - {c.table} / {c.column} / {c.quantity}: printed {c.printed}; {c.exception}")
    if report.failures:
        lines += ["", "Unexplained mismatches", THIN_RULE]
        for c in report.failures:
            lines.append(f"  - {c.table} / {c.column} / {c.quantity}: printed {c.printed}, computed {c.computed}")
    blocks.append("\n".join(lines) + "\n")
    return "\n".join(blocks)
