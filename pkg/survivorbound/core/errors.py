"""Exception types raised by survivorbound.

Everything derives from ``ValueError`` so callers that only care about bad
input can keep catching that.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Sequence

if TYPE_CHECKING:
    from survivorbound.models.schemas import ValidationReport


class SurvivorBoundError(ValueError):
    """Base class for all domain errors."""


class DegenerateInputError(SurvivorBoundError):
    """An arm has no individuals, so its proportions are undefined."""


class DegenerateVarianceError(SurvivorBoundError):
    """Both arms have zero variance; the Wald statistic is undefined."""


class PanelParseError(SurvivorBoundError):
    """Malformed CSV input."""

    def __init__(self, message: str, line: int | None = None) -> None:
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class StructuralZeroError(SurvivorBoundError):
    """A panel has counts in cells that cannot occur."""

    def __init__(self, report: ValidationReport) -> None:
        self.report = report
        first = report.errors[0]
        super().__init__(
            f"{len(report.errors)} structural-zero violation(s); first: "
            f"arm={first.arm} t={first.t} y={first.y} s={first.s} ({first.condition})"
        )


class UndefinedBoundError(SurvivorBoundError):
    """A bound's denominator is not positive."""


class BoundNotApplicableError(SurvivorBoundError):
    """A conditional bound's precondition does not hold for this panel."""


class RegimePreconditionError(SurvivorBoundError):
    """A counterfactual distribution puts mass on types the regime excludes."""

    def __init__(self, regime: str, offending: Sequence[int]) -> None:
        self.regime = regime
        self.offending = tuple(offending)
        types = ", ".join(str(i) for i in self.offending)
        super().__init__(f"regime {regime} excludes response type(s) {types}, which carry mass")


class OutcomeSetError(SurvivorBoundError):
    """Bad outcome-set expression, or a bin that straddles a set boundary."""


class ImproperPosteriorError(SurvivorBoundError):
    """A Dirichlet posterior parameter is zero."""


class SensitivityParamsError(SurvivorBoundError):
    """Hypothesized missing-cell masses do not fit the observed panel."""
