"""Command-line interface: ``survivorbound <command> [options]``.

Exit codes: 0 success, 1 analysis or verification failure, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Sequence

from dotenv import load_dotenv
from pydantic import ValidationError

from survivorbound.core.config import get_settings
from survivorbound.core.errors import PanelParseError, SurvivorBoundError
from survivorbound.core.rng import SeededRng
from survivorbound.models.enums import (
    Correction,
    GeneralizedBound,
    OutputFormat,
    ReferenceDistribution,
    Regime,
    SensitivityKind,
    SwogVariant,
)
from survivorbound.models.outcome_sets import OutcomeSet
from survivorbound.models.schemas import (
    BoundValue,
    ContingencyPanel,
    DirichletPrior,
    GeneralizedPanel,
    MissingSensitivityParams,
    RunConfig,
)
from survivorbound.services import bayes, datasets, generalized, oracle, panel_data, report, sensitivity
from survivorbound.services.inference import analyze_timegrid
from survivorbound.services.reproduction import QOL_MAIN, ReproductionService

logger = logging.getLogger("survivorbound.cli")

DEFAULT_GRID = "0:0.2:0.05"

# Missing-data parameter flags and the MissingSensitivityParams field each sets.
_MISSING_FLAGS: dict[str, str] = {
    "--p-ya-s1-r0-x1": "p_ya_s1_r0_x1",
    "--p-not-yb-s1-r0-x0": "p_not_yb_s1_r0_x0",
    "--r-value": "r_value",
    "--p-s1u-s0l-neq1": "p_s1u_s0l_neq1",
    "--p-s1-r0-x0": "p_s1_r0_x0",
    "--p-s1-r0-x1": "p_s1_r0_x1",
}


class UsageError(ValueError):
    """Flags that parse but do not make sense together."""


# ── Argument parsing ────────────────────────────────────────────────────


def _parent() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--data",
        default=None,
        help="swog:main_text, swog:appendix, qol, or a CSV path",
    )
    common.add_argument("--format", dest="output_format", choices=[f.value for f in OutputFormat], default=None)
    common.add_argument("--alpha", type=float, default=0.05)
    common.add_argument("--seed", type=int, default=7)
    common.add_argument("-v", "--verbose", action="store_true")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _parent()
    parser = argparse.ArgumentParser(
        prog="survivorbound",
        description="Always-survivor causal effects under truncation by death and censoring.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sub.add_parser("validate", parents=[common], help="check a panel for structural zeros and row sums")

    analyze = sub.add_parser("analyze", parents=[common], help="one-sided tests across the time grid")
    analyze.add_argument("--regime", choices=[r.value for r in Regime], default=None)
    analyze.add_argument("--all-regimes", action="store_true")
    analyze.add_argument("--y", type=int, choices=(0, 1), default=0)
    analyze.add_argument("--no-continuity", action="store_true")
    analyze.add_argument("--correction", choices=[c.value for c in Correction], default=Correction.BONFERRONI.value)
    analyze.add_argument(
        "--reference", choices=[r.value for r in ReferenceDistribution], default=ReferenceDistribution.NORMAL.value
    )

    sens = sub.add_parser("sensitivity", parents=[common], help="monotonicity-violation sweeps and break-evens")
    sens.add_argument("--kind", choices=[k.value for k in SensitivityKind], default=None)
    sens.add_argument("--grid", default=None, help=f"comma list or start:stop:step (default {DEFAULT_GRID})")
    sens.add_argument("--t", type=int, default=None)
    sens.add_argument("--y", type=int, choices=(0, 1), default=0)

    gen = sub.add_parser("generalized", parents=[common], help="bounds for real-valued outcomes with missingness")
    gen.add_argument("--ya", dest="y_a", default=None, help=f"outcome set for the treated arm (default {QOL_MAIN[0]})")
    gen.add_argument("--yb", dest="y_b", default=None, help=f"outcome set for the control arm (default {QOL_MAIN[1]})")
    gen.add_argument("--t", type=int, default=None)
    gen.add_argument("--tl", dest="t_lower", type=int, default=None)
    gen.add_argument("--tu", dest="t_upper", type=int, default=None)
    for flag, field in _MISSING_FLAGS.items():
        gen.add_argument(flag, dest=field, type=float, default=None)

    sim = sub.add_parser("simulate", parents=[common], help="verify identities on random counterfactual distributions")
    sim.add_argument("--checks", type=int, default=1000)
    sim.add_argument("--regime", choices=[r.value for r in Regime], default=None)
    sim.add_argument("--cdist", dest="cdist_path", default=None, help="16-line counterfactual distribution file")
    sim.add_argument("--inject-violation", action="store_true")
    sim.add_argument("--population", type=int, default=0)

    bay = sub.add_parser("bayes", parents=[common], help="Dirichlet posterior of a contrast or generalized bound")
    bay.add_argument("--t", type=int, default=None)
    bay.add_argument("--regime", choices=[r.value for r in Regime], default=None)
    bay.add_argument("--y", type=int, choices=(0, 1), default=0)
    bay.add_argument("--draws", dest="n_draws", type=int, default=10_000)
    bay.add_argument("--chunk-size", type=int, default=25_000)
    bay.add_argument("--alpha-prior", dest="prior_alpha", type=float, default=1.0)
    bay.add_argument("--dump-draws", default=None, metavar="PATH")
    bay.add_argument("--generalized", action="store_true")
    bay.add_argument("--ya", dest="y_a", default=None)
    bay.add_argument("--yb", dest="y_b", default=None)
    bay.add_argument("--kind", dest="bound", choices=[b.value for b in GeneralizedBound], default=None)

    rep = sub.add_parser("reproduce-paper", parents=[common], help="recompute the published tables")
    rep.add_argument("--variant", choices=[v.value for v in SwogVariant], default=SwogVariant.MAIN_TEXT.value)

    return parser


def _default_data(args: argparse.Namespace) -> str:
    if args.command == "generalized" or (args.command == "bayes" and getattr(args, "generalized", False)):
        return "qol"
    return "swog:main_text"


def to_run_config(args: argparse.Namespace) -> RunConfig:
    """Validate the parsed namespace; pydantic enforces flag consistency."""
    fields = {
        k: v for k, v in vars(args).items()
        if k in RunConfig.model_fields and v is not None
    }
    fields["data"] = args.data or _default_data(args)
    fields["output_format"] = args.output_format or get_settings().output_format
    if getattr(args, "no_continuity", False):
        fields["continuity"] = False
    if args.command == "sensitivity" and args.grid is not None:
        fields["grid"] = sensitivity.parse_grid(args.grid)
    if args.command == "generalized":
        given = {f: getattr(args, f) for f in _MISSING_FLAGS.values() if getattr(args, f) is not None}
        if given:
            fields["missing_params"] = MissingSensitivityParams(**given)
    return RunConfig(**fields)


# ── Panel checks ────────────────────────────────────────────────────────


def _require_categorical(panel: ContingencyPanel | GeneralizedPanel, command: str) -> ContingencyPanel:
    if not isinstance(panel, ContingencyPanel):
        raise UsageError(f"{command} needs a categorical panel (arm,time,y,s,count)")
    return panel


def _require_generalized(panel: ContingencyPanel | GeneralizedPanel, command: str) -> GeneralizedPanel:
    if not isinstance(panel, GeneralizedPanel):
        raise UsageError(f"{command} needs a generalized panel (arm,time,status,...)")
    return panel


def _outcome_sets(config: RunConfig) -> tuple[OutcomeSet, OutcomeSet]:
    return OutcomeSet.parse(config.y_a or QOL_MAIN[0]), OutcomeSet.parse(config.y_b or QOL_MAIN[1])


# ── Commands ────────────────────────────────────────────────────────────


def cmd_validate(config: RunConfig) -> tuple[str, int]:
    panel = datasets.load_panel(config.data, strict=False)
    if isinstance(panel, ContingencyPanel):
        result = panel_data.validate_panel(panel)
    else:
        result = generalized.validate_generalized_panel(panel)
    for w in result.warnings:
        logger.warning("Row sum mismatch: arm=%d t=%d sum=%d expected=%d", w.arm, w.t, w.actual, w.expected)
    return report.render_validation(result, config.data, config.output_format), 0 if result.ok else 1


def cmd_analyze(config: RunConfig) -> tuple[str, int]:
    panel = _require_categorical(datasets.load_panel(config.data), "analyze")
    regimes = list(Regime) if config.all_regimes else [config.regime or Regime.NO_ASSUMPTIONS]
    tables = [
        analyze_timegrid(
            panel, rg, y=config.y, alpha=config.alpha, continuity=config.continuity,
            correction=config.correction, reference=config.reference,
        )
        for rg in regimes
    ]
    return report.render_analysis(tables, config.output_format), 0


def cmd_sensitivity(config: RunConfig) -> tuple[str, int]:
    panel = _require_categorical(datasets.load_panel(config.data), "sensitivity")
    grid = config.grid if config.grid is not None else sensitivity.parse_grid(DEFAULT_GRID)
    kinds = [config.kind] if config.kind else list(SensitivityKind)
    times = [config.t] if config.t else range(1, panel.grid.count + 1)
    sweeps = []
    for kind in kinds:
        for t in times:
            panel.grid.check(t)
            sweeps.append(sensitivity.sweep(panel, t, config.y, kind, grid, label=panel.grid.label(t)))
    return report.render_sweep(sweeps, config.output_format), 0


def cmd_generalized(config: RunConfig) -> tuple[str, int]:
    panel = _require_generalized(datasets.load_panel(config.data), "generalized")
    y_a, y_b = _outcome_sets(config)
    t = config.t or 1
    analysis = generalized.qol_analysis(panel, t, y_a, y_b, alpha=config.alpha)

    extras: dict[str, BoundValue] = {}
    if config.missing_params is not None:
        extras["lb_missing_sensitivity"] = generalized.lb_missing_sensitivity(
            panel, t, y_a, y_b, config.missing_params
        )
        if config.t_lower or config.t_upper:
            t_lower = config.t_lower or t
            t_upper = config.t_upper or t
            extras[f"mono_sensitivity_two_times[{t_lower},{t_upper}]"] = generalized.mono_sensitivity_two_times(
                panel, t_lower, t_upper, y_a, y_b, config.missing_params
            )
    return report.render_generalized(analysis, config.output_format, extras), 0


def cmd_simulate(config: RunConfig) -> tuple[str, int]:
    cdist = None
    if config.cdist_path:
        cdist = oracle.cdist_from_csv(Path(config.cdist_path).read_text(encoding="utf-8"))
    result = oracle.VerificationSuite(seed=config.seed).run(
        checks=config.checks,
        regime=config.regime,
        population=config.population,
        cdist=cdist,
        inject_violation=config.inject_violation,
    )
    for failure in result.failures:
        logger.error("Verification failure: %s", failure)
    return report.render_verification(result, config.output_format), 0 if result.passed else 1


def cmd_bayes(config: RunConfig, bound: GeneralizedBound | None = None) -> tuple[str, int]:
    panel = datasets.load_panel(config.data)
    rng = SeededRng(config.seed)
    prior = DirichletPrior.uniform(config.prior_alpha)
    t = config.t or 1
    if config.generalized:
        gpanel = _require_generalized(panel, "bayes --generalized")
        y_a, y_b = _outcome_sets(config)
        summary, draws, values = bayes.posterior_generalized(
            gpanel, t, y_a, y_b, bound=bound or GeneralizedBound.MONOTONE, prior=prior,
            n_draws=config.n_draws, rng=rng, chunk_size=config.chunk_size,
        )
    else:
        cpanel = _require_categorical(panel, "bayes")
        summary, draws, values = bayes.posterior_contrast(
            cpanel, t, config.y, config.regime or Regime.NO_ASSUMPTIONS, prior=prior,
            n_draws=config.n_draws, rng=rng, chunk_size=config.chunk_size,
        )
    if config.dump_draws:
        draws.frame(values, name="contrast").to_csv(config.dump_draws, index=False, lineterminator="\n")
        logger.info("Wrote %d draws to %s", draws.n_draws, config.dump_draws)
    return report.render_posterior(summary, config.output_format), 0


def cmd_reproduce_paper(config: RunConfig) -> tuple[str, int]:
    result = ReproductionService(variant=config.variant, alpha=config.alpha).run()
    return report.render_reproduction(result, config.output_format), 0 if not result.failures else 1


# ── Entry point ─────────────────────────────────────────────────────────


def run(config: RunConfig, bound: GeneralizedBound | None = None) -> tuple[str, int]:
    """Execute one validated command; returns the rendered output and the exit code."""
    if config.command == "validate":
        return cmd_validate(config)
    if config.command == "analyze":
        return cmd_analyze(config)
    if config.command == "sensitivity":
        return cmd_sensitivity(config)
    if config.command == "generalized":
        return cmd_generalized(config)
    if config.command == "simulate":
        return cmd_simulate(config)
    if config.command == "bayes":
        return cmd_bayes(config, bound)
    return cmd_reproduce_paper(config)


def main(argv: Sequence[str] | None = None) -> int:
    """Entry point for the ``survivorbound`` console script."""
    load_dotenv()
    args = build_parser().parse_args(argv)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(asctime)s [%(levelname)s] %(name)s: %(message)s",
        stream=sys.stderr,
    )

    try:
        config = to_run_config(args)
    except (ValidationError, ValueError) as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return 2

    bound = GeneralizedBound(args.bound) if getattr(args, "bound", None) else None
    try:
        output, code = run(config, bound)
    except (OSError, PanelParseError, UsageError) as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return 2
    except SurvivorBoundError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        # out-of-range time index and similar argument problems
        print(f"Error: {exc}", file=sys.stderr)
        return 2

    sys.stdout.write(output)
    return code
