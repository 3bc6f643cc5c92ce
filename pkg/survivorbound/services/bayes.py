"""Dirichlet-Multinomial posteriors for contrasts and generalized bounds.

This is the standard conjugate construction: per arm, a Dirichlet prior on
the cell probabilities updated by the observed counts, with the arms
independent. Unidentified missing-cell content never enters the posterior.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from survivorbound.core.errors import ImproperPosteriorError
from survivorbound.core.rng import SeededRng
from survivorbound.models.enums import Arm, CellStatus, GeneralizedBound, Regime
from survivorbound.models.outcome_sets import OutcomeSet
from survivorbound.models.schemas import (
    ALLOWED_CELLS,
    ConfidenceInterval,
    ContingencyPanel,
    DirichletPrior,
    GeneralizedPanel,
    PosteriorSummary,
)
from survivorbound.services.contrasts import union_cells

logger = logging.getLogger("survivorbound.bayes")

GENERALIZED_CELLS = ("in_set", "out_of_set", "dead", "missing")


@dataclass(frozen=True)
class PosteriorDraws:
    """Posterior draws of each arm's cell probabilities, one row per draw."""

    cells: tuple[str, ...]
    p0: np.ndarray
    p1: np.ndarray
    seed: int
    prior: DirichletPrior

    @property
    def n_draws(self) -> int:
        return int(self.p0.shape[0])

    def frame(self, values: np.ndarray | None = None, name: str = "value") -> pd.DataFrame:
        """Draws as a DataFrame with ``x0:<cell>`` / ``x1:<cell>`` columns."""
        columns = {f"x0:{c}": self.p0[:, j] for j, c in enumerate(self.cells)}
        columns.update({f"x1:{c}": self.p1[:, j] for j, c in enumerate(self.cells)})
        if values is not None:
            columns[name] = values
        return pd.DataFrame(columns)


def _cell_name(y: int, s: int) -> str:
    return f"y{y}s{s}"


def _dirichlet(
    rng: SeededRng, alpha: np.ndarray, n_draws: int, chunk_size: int
) -> np.ndarray:
    """Rows of normalized Gamma variates; chunk ``i`` draws from ``rng.substream(i)``."""
    blocks = []
    for index, start in enumerate(range(0, n_draws, chunk_size)):
        size = min(chunk_size, n_draws - start)
        gammas = rng.substream(index).standard_gamma(alpha, size=(size, alpha.size))
        blocks.append(gammas / gammas.sum(axis=1, keepdims=True))
    return np.vstack(blocks)


def _posterior(
    counts0: list[int],
    counts1: list[int],
    cells: tuple[str, ...],
    prior: DirichletPrior,
    n_draws: int,
    rng: SeededRng,
    chunk_size: int,
) -> PosteriorDraws:
    if n_draws < 1:
        raise ValueError(f"n_draws must be >= 1, got {n_draws}")
    params = []
    for arm, counts, alpha in ((Arm.CONTROL, counts0, prior.alpha0), (Arm.TREATED, counts1, prior.alpha1)):
        a = np.asarray(alpha, dtype=float) + np.asarray(counts, dtype=float)
        zero = [cells[j] for j in np.flatnonzero(a == 0)]
        if zero:
            raise ImproperPosteriorError(
                f"arm X={int(arm)}: posterior parameter is zero for cell(s) {', '.join(zero)}"
            )
        params.append(a)
    p0 = _dirichlet(rng.substream(0), params[0], n_draws, chunk_size)
    p1 = _dirichlet(rng.substream(1), params[1], n_draws, chunk_size)
    return PosteriorDraws(cells=cells, p0=p0, p1=p1, seed=rng.seed, prior=prior)


def posterior_draws(
    panel: ContingencyPanel,
    t: int,
    prior: DirichletPrior | None = None,
    n_draws: int = 10_000,
    rng: SeededRng | None = None,
    chunk_size: int = 25_000,
) -> PosteriorDraws:
    """Independent Dirichlet(alpha + counts) draws per arm over the four allowed cells."""
    panel.grid.check(t)
    counts = {
        arm: [panel.count(arm, t, y, s) for y, s in ALLOWED_CELLS] for arm in (Arm.CONTROL, Arm.TREATED)
    }
    cells = tuple(_cell_name(y, s) for y, s in ALLOWED_CELLS)
    return _posterior(
        counts[Arm.CONTROL], counts[Arm.TREATED], cells,
        prior or DirichletPrior(), n_draws, rng or SeededRng(7), chunk_size,
    )


def summarize(values: np.ndarray, quantity: str, seed: int, prior: DirichletPrior) -> PosteriorSummary:
    lo50, hi50, lo95, hi95, lo99, hi99, median = np.quantile(
        values, [0.25, 0.75, 0.025, 0.975, 0.005, 0.995, 0.5]
    )
    return PosteriorSummary(
        quantity=quantity,
        mean=float(np.mean(values)),
        median=float(median),
        sd=float(np.std(values, ddof=1)) if values.size > 1 else 0.0,
        ci50=ConfidenceInterval(level=0.50, lower=float(lo50), upper=float(hi50)),
        ci95=ConfidenceInterval(level=0.95, lower=float(lo95), upper=float(hi95)),
        ci99=ConfidenceInterval(level=0.99, lower=float(lo99), upper=float(hi99)),
        prob_positive=float(np.mean(values > 0)),
        n_draws=int(values.size),
        seed=seed,
        prior=prior,
    )


def contrast_draws(draws: PosteriorDraws, y: int, regime: Regime) -> np.ndarray:
    """The regime's contrast evaluated on every draw."""
    col = {cell: j for j, cell in enumerate(ALLOWED_CELLS)}
    control = draws.p0[:, col[(1 - y, 1)]]
    treated = sum(draws.p1[:, col[c]] for c in union_cells(regime, y))
    return control - treated


def posterior_contrast(
    panel: ContingencyPanel,
    t: int,
    y: int,
    regime: Regime,
    prior: DirichletPrior | None = None,
    n_draws: int = 10_000,
    rng: SeededRng | None = None,
    chunk_size: int = 25_000,
) -> tuple[PosteriorSummary, PosteriorDraws, np.ndarray]:
    """Posterior of the regime's contrast; ``prob_positive`` mirrors the one-sided test."""
    draws = posterior_draws(panel, t, prior, n_draws, rng, chunk_size)
    values = contrast_draws(draws, y, regime)
    summary = summarize(values, f"delta[{Regime(regime)}, y={y}, {panel.grid.label(t)}]", draws.seed, draws.prior)
    logger.info(
        "Posterior %s: mean %.4f, P(>0) %.4f over %d draws", summary.quantity, summary.mean,
        summary.prob_positive, summary.n_draws,
    )
    return summary, draws, values


def _generalized_counts(panel: GeneralizedPanel, arm: int, t: int, outcome_set: OutcomeSet) -> list[int]:
    missing = sum(
        c.count for c in panel.cells
        if c.arm == arm and c.t == t and c.status in (CellStatus.MISSING, CellStatus.MISSING_OUTCOME)
    )
    dead = sum(c.count for c in panel.cells if c.arm == arm and c.t == t and c.status == CellStatus.DEAD)
    return [
        panel.count_observed(arm, t, outcome_set, inside=True),
        panel.count_observed(arm, t, outcome_set, inside=False),
        dead,
        missing,
    ]


def posterior_generalized(
    panel: GeneralizedPanel,
    t: int,
    y_a: OutcomeSet,
    y_b: OutcomeSet,
    bound: GeneralizedBound = GeneralizedBound.MONOTONE,
    prior: DirichletPrior | None = None,
    n_draws: int = 10_000,
    rng: SeededRng | None = None,
    chunk_size: int = 25_000,
) -> tuple[PosteriorSummary, PosteriorDraws, np.ndarray]:
    """Posterior of lb_plain or lb_monotone.raw.

    The set splitting observed survivors is y_a in the treated arm and y_b in
    the control arm.
    """
    panel.grid.check(t)
    draws = _posterior(
        _generalized_counts(panel, Arm.CONTROL, t, y_b),
        _generalized_counts(panel, Arm.TREATED, t, y_a),
        GENERALIZED_CELLS,
        prior or DirichletPrior(),
        n_draws,
        rng or SeededRng(7),
        chunk_size,
    )
    if GeneralizedBound(bound) == GeneralizedBound.PLAIN:
        values = draws.p1[:, 0] + draws.p0[:, 1] - 1.0
    else:
        values = draws.p0[:, 1] - draws.p1[:, 1]
    quantity = f"lb_{GeneralizedBound(bound)}[y_a={y_a}, y_b={y_b}, {panel.grid.label(t)}]"
    return summarize(values, quantity, draws.seed, draws.prior), draws, values
