"""One-sided two-proportion Wald tests across a time grid.

For each timepoint the null hypothesis is P(Y=1-y, S=1 | X=0) <= P(union | X=1),
with the union event chosen by the regime. Tests are multiplicity-adjusted
with Bonferroni by default.
"""

from __future__ import annotations

import logging
import math

from scipy import special, stats

from survivorbound.core.errors import DegenerateVarianceError
from survivorbound.models.enums import Correction, ReferenceDistribution, Regime, SensitivityKind
from survivorbound.models.schemas import (
    AnalysisRow,
    AnalysisTable,
    ConfidenceInterval,
    ContingencyPanel,
    TestResult,
)
from survivorbound.services import contrasts, sensitivity

logger = logging.getLogger("survivorbound.inference")

# Regime whose conclusion a given sensitivity parameter attacks.
REGIME_SENSITIVITY: dict[Regime, SensitivityKind] = {
    Regime.MONO_DEATH: SensitivityKind.DM,
    Regime.MONO_CENSOR: SensitivityKind.AM,
    Regime.MONO_BOTH: SensitivityKind.KM,
}


def std_normal_cdf(z: float) -> float:
    """Φ(z), via the Cephes erf/erfc rational approximations in ``scipy.special.ndtr``."""
    if not math.isfinite(z):
        raise ValueError(f"z must be finite, got {z}")
    return float(special.ndtr(z))


def _two_sided_quantile(level: float, reference: ReferenceDistribution, df: int) -> float:
    if reference == ReferenceDistribution.STUDENT_T:
        return float(stats.t.ppf(0.5 + level / 2, df))
    return float(special.ndtri(0.5 + level / 2))


def bonferroni(alpha: float, m: int) -> float:
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if m < 1:
        raise ValueError(f"number of tests must be >= 1, got {m}")
    return alpha / m


def wald_diff_test(
    k0: int,
    n0: int,
    k1: int,
    n1: int,
    continuity: bool = True,
    alpha: float = 0.05,
    m: int = 1,
    reference: ReferenceDistribution = ReferenceDistribution.NORMAL,
) -> TestResult:
    """Test p0 > p1 with unpooled variance.

    With ``continuity`` the estimate is shrunk towards zero by
    (1/n0 + 1/n1)/2 for the statistic, and the CIs are widened by the same
    amount on each side.
    """
    if n0 <= 0 or n1 <= 0:
        raise ValueError(f"arm sizes must be positive (n0={n0}, n1={n1})")
    if not (0 <= k0 <= n0 and 0 <= k1 <= n1):
        raise ValueError(f"event counts out of range: k0={k0}/{n0}, k1={k1}/{n1}")

    p0, p1 = k0 / n0, k1 / n1
    estimate = p0 - p1
    se = math.sqrt(p0 * (1 - p0) / n0 + p1 * (1 - p1) / n1)
    if se == 0.0:
        raise DegenerateVarianceError(
            f"zero standard error (k0={k0}/{n0}, k1={k1}/{n1}); the Wald statistic is undefined"
        )

    correction = (1 / n0 + 1 / n1) / 2 if continuity else 0.0
    shrunk = math.copysign(max(abs(estimate) - correction, 0.0), estimate)
    z = shrunk / se

    df = n0 + n1 - 2
    if reference == ReferenceDistribution.STUDENT_T:
        p_value = float(stats.t.sf(z, df))
    else:
        p_value = std_normal_cdf(-z)

    def interval(level: float) -> ConfidenceInterval:
        half = _two_sided_quantile(level, reference, df) * se + correction
        return ConfidenceInterval(
            level=level, lower=max(estimate - half, -1.0), upper=min(estimate + half, 1.0)
        )

    alpha_adjusted = bonferroni(alpha, m)
    return TestResult(
        estimate=estimate,
        se=se,
        z=z,
        p_one_sided=min(max(p_value, 0.0), 1.0),
        ci95=interval(0.95),
        ci99=interval(0.99),
        continuity=continuity,
        alpha=alpha,
        alpha_adjusted=alpha_adjusted,
        significant=p_value < alpha_adjusted,
        reference=reference,
    )


def analyze_timegrid(
    panel: ContingencyPanel,
    regime: Regime,
    y: int = 0,
    alpha: float = 0.05,
    continuity: bool = True,
    correction: Correction = Correction.BONFERRONI,
    reference: ReferenceDistribution = ReferenceDistribution.NORMAL,
) -> AnalysisTable:
    """One Wald test per timepoint using the regime's union-event counts."""
    regime = Regime(regime)
    m = panel.grid.count if correction == Correction.BONFERRONI else 1
    n_total = panel.n0 + panel.n1
    kind = REGIME_SENSITIVITY.get(regime)

    rows: list[AnalysisRow] = []
    for t in range(1, panel.grid.count + 1):
        result = contrasts.contrast(panel, t, y, regime)
        test = wald_diff_test(
            result.k0, result.n0, result.k1, result.n1,
            continuity=continuity, alpha=alpha, m=m, reference=reference,
        )
        rows.append(
            AnalysisRow(
                t=t,
                label=panel.grid.label(t),
                contrast=result,
                test=test,
                breakeven=sensitivity.breakeven(panel, t, y, kind) if kind else None,
                headcount=contrasts.headcount(result, n_total),
                naive_survivor_difference=contrasts.naive_survivor_difference(panel, t, y),
            )
        )

    table = AnalysisTable(
        regime=regime,
        y=y,
        alpha=alpha,
        continuity=continuity,
        correction=correction,
        m=panel.grid.count,
        alpha_adjusted=bonferroni(alpha, m),
        n_total=n_total,
        rows=tuple(rows),
        falsification=contrasts.falsification_checks(panel, regime),
    )
    logger.info(
        "Analyzed %s (y=%d): %d/%d timepoints significant at %.5f",
        regime, y, sum(r.test.significant for r in rows), len(rows), table.alpha_adjusted,
    )
    return table
