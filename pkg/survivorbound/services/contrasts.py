"""Observable contrasts that detect always-survivor causal effects.

Each regime's contrast compares the control-arm event {Y=1-y, S=1} with a
treatment-arm union event; the regime decides which of the death and
censoring cells join the union. A positive contrast implies that some
always survivors have Y_1 = y and Y_0 = 1-y.
"""

from __future__ import annotations

import logging
import math
from typing import Protocol

from survivorbound.core.errors import DegenerateInputError
from survivorbound.models.enums import Arm, CheckStatus, HeadcountRounding, Regime
from survivorbound.models.schemas import ContingencyPanel, ContrastResult, FalsificationCheck

logger = logging.getLogger("survivorbound.contrasts")


class CellProbabilities(Protocol):
    """Anything that can report P(Y(t)=y, S(t)=s | X=x)."""

    def prob(self, y: int, s: int, x: int, t: int) -> float: ...


def union_cells(regime: Regime, y: int) -> tuple[tuple[int, int], ...]:
    """Treatment-arm (y, s) cells whose union is compared against the control event."""
    alive = (1 - y, 1)
    match Regime(regime):
        case Regime.NO_ASSUMPTIONS:
            return (alive, (2, 0), (3, 2))
        case Regime.MONO_DEATH:
            return (alive, (3, 2))
        case Regime.MONO_CENSOR:
            return (alive, (2, 0))
        case Regime.MONO_BOTH:
            return (alive,)
    raise ValueError(f"unknown regime {regime!r}")


def _check_direction(y: int) -> None:
    if y not in (0, 1):
        raise ValueError(f"direction y must be 0 or 1, got {y}")


# ── Public API ──────────────────────────────────────────────────────────


def contrast(panel: ContingencyPanel, t: int, y: int, regime: Regime) -> ContrastResult:
    """The regime's contrast at time index ``t``, with the counts behind it."""
    _check_direction(y)
    panel.grid.check(t)
    n0, n1 = panel.n0, panel.n1
    if n0 <= 0 or n1 <= 0:
        raise DegenerateInputError(f"arm sizes must be positive (n0={n0}, n1={n1})")
    k0 = panel.count(Arm.CONTROL, t, 1 - y, 1)
    k1 = sum(panel.count(Arm.TREATED, t, yy, ss) for yy, ss in union_cells(regime, y))
    p0, p1 = k0 / n0, k1 / n1
    delta = p0 - p1
    logger.debug("contrast t=%d y=%d %s: %d/%d - %d/%d = %.6f", t, y, regime, k0, n0, k1, n1, delta)
    return ContrastResult(
        t=t, y=y, regime=Regime(regime), delta=delta, lower_bound=max(delta, 0.0),
        p0=p0, p1=p1, k0=k0, n0=n0, k1=k1, n1=n1,
    )


def contrast_value(source: CellProbabilities, t: int, y: int, regime: Regime) -> float:
    """Same contrast computed from exact or estimated cell probabilities."""
    _check_direction(y)
    p0 = source.prob(1 - y, 1, Arm.CONTROL, t)
    p1 = math.fsum(source.prob(yy, ss, Arm.TREATED, t) for yy, ss in union_cells(regime, y))
    return p0 - p1


def survivor_sum_form(source: CellProbabilities, t: int, y: int) -> float:
    """P_{y,1.1} + P_{1-y,1.0} - 1; equals the no-assumption contrast when arm X=1 sums to one."""
    _check_direction(y)
    return source.prob(y, 1, Arm.TREATED, t) + source.prob(1 - y, 1, Arm.CONTROL, t) - 1.0


def naive_survivor_difference(panel: ContingencyPanel, t: int, y: int) -> float | None:
    """P(Y=1-y | S=1, X=0) - P(Y=1-y | S=1, X=1).

    Diagnostic only: conditioning on observed survival compares different
    subpopulations, so this is not a causal contrast. None when an arm has
    no observed survivors.
    """
    _check_direction(y)
    shares = []
    for arm in (Arm.CONTROL, Arm.TREATED):
        alive = panel.count(arm, t, 0, 1) + panel.count(arm, t, 1, 1)
        if alive == 0:
            return None
        shares.append(panel.count(arm, t, 1 - y, 1) / alive)
    return shares[0] - shares[1]


def headcount(
    bound: ContrastResult | float,
    n_total: int,
    rounding: HeadcountRounding = HeadcountRounding.FLOOR,
) -> int:
    """Number of individuals a population-scale lower bound guarantees.

    FLOOR applies to the exact bound. NEAREST rounds the bound to two
    decimals first, then to the nearest person.
    """
    if n_total <= 0:
        raise ValueError(f"n_total must be positive, got {n_total}")
    value = bound.lower_bound if isinstance(bound, ContrastResult) else max(float(bound), 0.0)
    if HeadcountRounding(rounding) == HeadcountRounding.NEAREST:
        return math.floor(round(value, 2) * n_total + 0.5)
    return math.floor(round(value * n_total, 9))


def _survival_prob(source: CellProbabilities, s: int, x: int, t: int) -> float:
    return math.fsum(source.prob(y, s, x, t) for y in range(4))


def _check(t: int, assumption: Regime, lhs: float) -> FalsificationCheck:
    slack = 1.0 - lhs
    status = CheckStatus.CONSISTENT if slack >= 0 else CheckStatus.FALSIFIED
    return FalsificationCheck(t=t, assumption=assumption, lhs=lhs, slack=slack, status=status)


def falsify_mono_death(source: CellProbabilities, t: int) -> FalsificationCheck:
    """Death monotonicity implies P(S=0 | X=1) + P(S=1 | X=0) <= 1.

    CONSISTENT means only that the data fail to falsify the assumption.
    """
    lhs = _survival_prob(source, 0, Arm.TREATED, t) + _survival_prob(source, 1, Arm.CONTROL, t)
    return _check(t, Regime.MONO_DEATH, lhs)


def falsify_mono_censor(source: CellProbabilities, t: int) -> FalsificationCheck:
    """Censoring monotonicity implies P(S=2 | X=1) + P(S=1 | X=0) <= 1."""
    lhs = _survival_prob(source, 2, Arm.TREATED, t) + _survival_prob(source, 1, Arm.CONTROL, t)
    return _check(t, Regime.MONO_CENSOR, lhs)


def falsification_checks(panel: ContingencyPanel, regime: Regime) -> tuple[FalsificationCheck, ...]:
    """Every check implied by ``regime`` across the time grid."""
    checks: list[FalsificationCheck] = []
    for t in range(1, panel.grid.count + 1):
        if regime in (Regime.MONO_DEATH, Regime.MONO_BOTH):
            checks.append(falsify_mono_death(panel, t))
        if regime in (Regime.MONO_CENSOR, Regime.MONO_BOTH):
            checks.append(falsify_mono_censor(panel, t))
    for c in checks:
        if c.status == CheckStatus.FALSIFIED:
            logger.warning("%s falsified at t=%d (slack %.4f)", c.assumption, c.t, c.slack)
    return tuple(checks)
