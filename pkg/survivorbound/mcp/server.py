"""survivorbound MCP Server -- always-survivor analyses as MCP tools.

Wraps the same services as the command line (time-grid tests, monotonicity
sensitivity, generalized outcome bounds, published-table reproduction) so an
assistant can run them on the embedded trial data or a local CSV.
"""

from __future__ import annotations

import json
import logging
import sys

from dotenv import load_dotenv
from fastmcp import FastMCP

load_dotenv()

from survivorbound.models.enums import OutputFormat, Regime, SensitivityKind, SwogVariant
from survivorbound.models.outcome_sets import OutcomeSet
from survivorbound.models.schemas import ContingencyPanel, GeneralizedPanel
from survivorbound.services import datasets, generalized, report, sensitivity
from survivorbound.services.inference import analyze_timegrid
from survivorbound.services.reproduction import ReproductionService

# ---------------------------------------------------------------------------
# Logging -- stderr only (stdout is reserved for MCP JSON-RPC protocol)
# ---------------------------------------------------------------------------

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
    stream=sys.stderr,
)
logger = logging.getLogger("survivorbound.mcp")

# ---------------------------------------------------------------------------
# MCP Server
# ---------------------------------------------------------------------------

mcp = FastMCP(
    "survivorbound",
    instructions=(
        "survivorbound detects and bounds treatment effects among always-survivors "
        "in randomized trials where some participants die or are censored before "
        "the outcome is measured. Use 'analyze_trial' for one-sided tests across "
        "the time grid, 'sensitivity_breakeven' to see how much monotonicity "
        "violation a conclusion tolerates, 'quality_of_life_bounds' for real-valued "
        "outcomes with missing data, and 'reproduce_paper' to recompute the "
        "published tables with their documented discrepancies."
    ),
)


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _categorical(data: str) -> ContingencyPanel:
    panel = datasets.load_panel(data)
    if not isinstance(panel, ContingencyPanel):
        raise ValueError(f"'{data}' is not a categorical panel")
    return panel


def _generalized(data: str) -> GeneralizedPanel:
    panel = datasets.load_panel(data)
    if not isinstance(panel, GeneralizedPanel):
        raise ValueError(f"'{data}' is not a generalized panel")
    return panel


# ---------------------------------------------------------------------------
# Tools
# ---------------------------------------------------------------------------


@mcp.tool()
async def analyze_trial(
    data: str = "swog:main_text",
    regime: str = "none",
    y: int = 0,
    alpha: float = 0.05,
    continuity: bool = True,
) -> str:
    """Test for an always-survivor effect at every timepoint of a trial.

    Each timepoint gets the regime's observable contrast, 95% and 99%
    confidence intervals, a one-sided p-value against a Bonferroni
    threshold, and a headcount. Monotonicity regimes also report the
    falsification check and break-even sensitivity value.

    Args:
        data: "swog:main_text", "swog:appendix", or a path to a counts CSV.
        regime: One of "none", "mono-death", "mono-censor", "both".
        y: Direction; 0 tests whether treatment prevents the outcome.
        alpha: Family-wise significance level.
        continuity: Apply the continuity correction (default True).

    Returns:
        Markdown table for the regime.
    """
    try:
        rg = Regime(regime)
    except ValueError:
        return (
            f"Error: Invalid regime '{regime}'. "
            f"Use one of: {', '.join(r.value for r in Regime)}."
        )
    try:
        table = analyze_timegrid(_categorical(data), rg, y=y, alpha=alpha, continuity=continuity)
    except (ValueError, OSError) as exc:
        return f"Error: {exc}"
    logger.info("analyze_trial: %s on %s", rg, data)
    return report.render_analysis([table], OutputFormat.MARKDOWN)


@mcp.tool()
async def sensitivity_breakeven(
    data: str = "swog:main_text",
    t: int = 3,
    y: int = 0,
    kind: str = "dm",
) -> str:
    """How large a monotonicity violation must be to void a conclusion.

    The break-even is the smallest value of the sensitivity parameter
    (dm: death monotonicity, am: censoring monotonicity, km: both) at which
    the adjusted contrast is no longer positive.

    Args:
        data: "swog:main_text", "swog:appendix", or a path to a counts CSV.
        t: 1-based timepoint index.
        y: Direction (0 or 1).
        kind: One of "dm", "am", "km".

    Returns:
        JSON with the base contrast and break-even value.
    """
    try:
        sk = SensitivityKind(kind)
        panel = _categorical(data)
        panel.grid.check(t)
        value = sensitivity.breakeven(panel, t, y, sk)
    except (ValueError, OSError) as exc:
        return f"Error: {exc}"
    return json.dumps(
        {
            "data": data,
            "time": panel.grid.label(t),
            "t": t,
            "y": y,
            "kind": sk.value,
            "base_regime": sensitivity.BASE_REGIME[sk].value,
            "base_delta": value,
            "breakeven": value,
            "conclusion_at_zero": value > 0,
        },
        indent=2,
    )


@mcp.tool()
async def quality_of_life_bounds(
    y_a: str = "(-inf,70]",
    y_b: str = "(-inf,70]",
    t: int = 1,
    data: str = "qol",
) -> str:
    """Bounds on the effect for a real-valued outcome with deaths and missing data.

    Reports the plain, normalized, conditional and monotone lower bounds,
    the Wald test behind the monotone bound, and its headcount.

    Args:
        y_a: Outcome set for the treated arm, e.g. "(-inf,70]".
        y_b: Outcome set for the control arm, e.g. "(-inf,75]".
        t: 1-based timepoint index.
        data: "qol" (embedded 12-week quality-of-life data) or a generalized CSV path.

    Returns:
        Markdown report of every bound.
    """
    try:
        panel = _generalized(data)
        analysis = generalized.qol_analysis(panel, t, OutcomeSet.parse(y_a), OutcomeSet.parse(y_b))
    except (ValueError, OSError) as exc:
        return f"Error: {exc}"
    return report.render_generalized(analysis, OutputFormat.MARKDOWN)


@mcp.tool()
async def reproduce_paper(variant: str = "main_text") -> str:
    """Recompute the published result tables from the embedded trial data.

    Every printed estimate, interval, p-value and significance decision is
    compared with the recomputed value. Mismatches are either documented
    exceptions (misprints, the conflicting 18-month death count) or
    failures.

    Args:
        variant: "main_text" (139 treated deaths at 18 months) or "appendix" (166).

    Returns:
        Markdown report ending with the exception list.
    """
    try:
        result = ReproductionService(variant=SwogVariant(variant)).run()
    except ValueError as exc:
        return f"Error: {exc}"
    return report.render_reproduction(result, OutputFormat.MARKDOWN)


@mcp.tool()
async def list_datasets() -> str:
    """Describe the embedded datasets.

    Returns:
        JSON with each dataset's selector, arm sizes and time labels.
    """
    entries = []
    for selector, panel in (
        ("swog:main_text", datasets.swog_dataset(SwogVariant.MAIN_TEXT)),
        ("swog:appendix", datasets.swog_dataset(SwogVariant.APPENDIX)),
        ("qol", datasets.qol_dataset()),
    ):
        entries.append(
            {"data": selector, "n0": panel.n0, "n1": panel.n1, "times": list(panel.grid.labels)}
        )
    return json.dumps(entries, indent=2)
