"""Pydantic v2 models for survivorbound's data, results and run configuration."""

from __future__ import annotations

import math
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, PrivateAttr, field_validator, model_validator

from survivorbound.core.errors import DegenerateInputError
from survivorbound.models.enums import (
    Arm,
    CellStatus,
    CheckStatus,
    Correction,
    OutcomeCode,
    OutputFormat,
    ReferenceDistribution,
    Regime,
    SensitivityKind,
    SurvivalCode,
    SwogVariant,
)
from survivorbound.models.outcome_sets import Interval, OutcomeSet

#: The four (y, s) cells an individual can actually occupy.
ALLOWED_CELLS: tuple[tuple[int, int], ...] = ((0, 1), (1, 1), (2, 0), (3, 2))

Direction = Literal[0, 1]


class _Frozen(BaseModel):
    model_config = ConfigDict(frozen=True)


# ---------------------------------------------------------------------------
# Observed categorical data
# ---------------------------------------------------------------------------


class TimeGrid(_Frozen):
    """Ordered timepoint labels; time indices are 1-based."""

    labels: tuple[str, ...] = Field(..., min_length=1)

    @field_validator("labels")
    @classmethod
    def _unique(cls, v: tuple[str, ...]) -> tuple[str, ...]:
        if len(set(v)) != len(v):
            raise ValueError(f"timepoint labels must be unique: {v}")
        return v

    @property
    def count(self) -> int:
        return len(self.labels)

    def label(self, t: int) -> str:
        self.check(t)
        return self.labels[t - 1]

    def index(self, label: str) -> int:
        try:
            return self.labels.index(label) + 1
        except ValueError:
            raise ValueError(f"unknown timepoint label {label!r}") from None

    def check(self, t: int) -> None:
        if not 1 <= t <= self.count:
            raise ValueError(f"time index {t} outside 1..{self.count}")


class PanelCell(_Frozen):
    """One count in a contingency panel."""

    arm: Arm
    t: int = Field(..., ge=1)
    y: OutcomeCode
    s: SurvivalCode
    count: int = Field(..., ge=0)


class ContingencyPanel(_Frozen):
    """Per-arm, per-timepoint counts over the joint (Y, S) cells."""

    grid: TimeGrid
    n0: int = Field(..., ge=0, description="Control-arm size.")
    n1: int = Field(..., ge=0, description="Treatment-arm size.")
    cells: tuple[PanelCell, ...] = ()

    _index: dict[tuple[int, int, int, int], int] = PrivateAttr(default_factory=dict)

    def model_post_init(self, __context: object) -> None:
        index: dict[tuple[int, int, int, int], int] = {}
        for c in self.cells:
            key = (int(c.arm), c.t, int(c.y), int(c.s))
            if c.t > self.grid.count:
                raise ValueError(f"cell time index {c.t} outside grid of {self.grid.count}")
            if key in index:
                raise ValueError(f"duplicate cell arm={c.arm} t={c.t} y={c.y} s={c.s}")
            index[key] = c.count
        self._index = index

    def arm_size(self, arm: int) -> int:
        return self.n1 if arm == Arm.TREATED else self.n0

    def count(self, arm: int, t: int, y: int, s: int) -> int:
        return self._index.get((int(arm), t, int(y), int(s)), 0)

    def row_sum(self, arm: int, t: int) -> int:
        return sum(v for (a, tt, _, _), v in self._index.items() if a == arm and tt == t)

    def prob(self, y: int, s: int, x: int, t: int) -> float:
        """P(Y(t)=y, S(t)=s | X=x) as count / arm size."""
        n = self.arm_size(x)
        if n <= 0:
            raise DegenerateInputError(f"arm X={x} has size zero")
        return self.count(x, t, y, s) / n


class StructuralViolation(_Frozen):
    arm: Arm
    t: int
    y: int
    s: int
    count: int
    condition: str


class RowSumMismatch(_Frozen):
    arm: Arm
    t: int
    expected: int
    actual: int


class ValidationReport(_Frozen):
    """Structural-zero errors and row-sum warnings for a panel."""

    errors: tuple[StructuralViolation, ...] = ()
    warnings: tuple[RowSumMismatch, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.errors


# ---------------------------------------------------------------------------
# Contrasts and inference
# ---------------------------------------------------------------------------


class ContrastResult(_Frozen):
    """An observable contrast delta = p0 - p1 at one timepoint."""

    t: int
    y: Direction
    regime: Regime
    delta: float = Field(..., ge=-1.0, le=1.0)
    lower_bound: float = Field(..., ge=0.0, le=1.0)
    p0: float = Field(..., description="Control-arm event proportion P(Y=1-y, S=1 | X=0).")
    p1: float = Field(..., description="Treatment-arm union-event proportion.")
    k0: int = Field(..., ge=0)
    n0: int = Field(..., ge=1)
    k1: int = Field(..., ge=0)
    n1: int = Field(..., ge=1)

    @model_validator(mode="after")
    def _consistent(self) -> ContrastResult:
        if self.k0 > self.n0 or self.k1 > self.n1:
            raise ValueError("event counts exceed arm sizes")
        if self.lower_bound != max(self.delta, 0.0):
            raise ValueError("lower_bound must equal max(delta, 0)")
        return self


class FalsificationCheck(_Frozen):
    """Observable implication of a monotonicity assumption at one timepoint."""

    t: int
    assumption: Regime
    lhs: float = Field(..., description="P(S=0 or 2 | X=1) + P(S=1 | X=0).")
    slack: float
    status: CheckStatus


class ConfidenceInterval(_Frozen):
    level: float = Field(..., gt=0.0, lt=1.0)
    lower: float
    upper: float


class TestResult(_Frozen):
    """One-sided two-proportion Wald test of H0: p0 <= p1."""

    __test__ = False  # not a pytest class

    estimate: float
    se: float = Field(..., ge=0.0)
    z: float
    p_one_sided: float = Field(..., ge=0.0, le=1.0)
    ci95: ConfidenceInterval
    ci99: ConfidenceInterval
    continuity: bool
    alpha: float
    alpha_adjusted: float
    significant: bool
    reference: ReferenceDistribution = ReferenceDistribution.NORMAL


class AnalysisRow(_Frozen):
    t: int
    label: str
    contrast: ContrastResult
    test: TestResult
    breakeven: float | None = Field(
        default=None, description="Smallest sensitivity parameter that voids the conclusion."
    )
    headcount: int = Field(..., ge=0)
    naive_survivor_difference: float | None = Field(
        default=None, description="Diagnostic only: comparison among observed survivors."
    )


class AnalysisTable(_Frozen):
    """One regime's tests across the time grid."""

    regime: Regime
    y: Direction
    alpha: float
    continuity: bool
    correction: Correction
    m: int = Field(..., ge=1)
    alpha_adjusted: float
    n_total: int
    rows: tuple[AnalysisRow, ...]
    falsification: tuple[FalsificationCheck, ...] = ()

    @model_validator(mode="after")
    def _m_matches(self) -> AnalysisTable:
        if self.m != len(self.rows):
            raise ValueError(f"m={self.m} but table has {len(self.rows)} rows")
        return self


# ---------------------------------------------------------------------------
# Sensitivity
# ---------------------------------------------------------------------------


class SensitivityParams(_Frozen):
    kind: SensitivityKind
    value: float = Field(..., ge=-1.0, le=1.0)
    t: int = Field(..., ge=1)
    y: Direction


class SensitivityOutcome(_Frozen):
    t: int
    y: Direction
    kind: SensitivityKind
    value: float
    base_delta: float
    adjusted_delta: float
    conclusion: bool = Field(..., description="True iff the counterfactual excess is established.")


class SensitivitySweep(_Frozen):
    t: int
    label: str
    y: Direction
    kind: SensitivityKind
    base_delta: float
    breakeven: float
    rows: tuple[SensitivityOutcome, ...]


# ---------------------------------------------------------------------------
# Generalized (real-valued outcome, missingness)
# ---------------------------------------------------------------------------


class GeneralizedCell(_Frozen):
    """Count of individuals with one observed status; alive cells carry an outcome bin."""

    status: CellStatus
    arm: Arm
    t: int = Field(..., ge=1)
    count: int = Field(..., ge=0)
    bin: Interval | None = Field(default=None, description="Outcome value or bin (alive only).")

    @model_validator(mode="after")
    def _bin_iff_alive(self) -> GeneralizedCell:
        if (self.status == CellStatus.ALIVE) != (self.bin is not None):
            raise ValueError("an outcome bin is required for alive cells and forbidden otherwise")
        return self


class GeneralizedPanel(_Frozen):
    grid: TimeGrid
    n0: int = Field(..., ge=0)
    n1: int = Field(..., ge=0)
    cells: tuple[GeneralizedCell, ...] = ()

    def arm_size(self, arm: int) -> int:
        return self.n1 if arm == Arm.TREATED else self.n0

    def _arm_cells(self, arm: int, t: int) -> list[GeneralizedCell]:
        self.grid.check(t)
        return [c for c in self.cells if c.arm == arm and c.t == t]

    def _ratio(self, k: int, arm: int) -> float:
        n = self.arm_size(arm)
        if n <= 0:
            raise DegenerateInputError(f"arm X={arm} has size zero")
        return k / n

    def row_sum(self, arm: int, t: int) -> int:
        return sum(c.count for c in self._arm_cells(arm, t))

    def count_observed(
        self, arm: int, t: int, outcome_set: OutcomeSet | None = None, inside: bool = True
    ) -> int:
        total = 0
        for c in self._arm_cells(arm, t):
            if c.status != CellStatus.ALIVE:
                continue
            if outcome_set is None or outcome_set.classify(c.bin) == inside:
                total += c.count
        return total

    # GeneralizedMargins protocol

    def prob_observed(
        self, arm: int, t: int, outcome_set: OutcomeSet | None = None, inside: bool = True
    ) -> float:
        """P(Y in/not in set, S=1, R=1 | X=arm); any outcome when the set is None."""
        return self._ratio(self.count_observed(arm, t, outcome_set, inside), arm)

    def prob_dead(self, arm: int, t: int) -> float:
        """P(S=0, R=1 | X=arm)."""
        k = sum(c.count for c in self._arm_cells(arm, t) if c.status == CellStatus.DEAD)
        return self._ratio(k, arm)

    def prob_missing(self, arm: int, t: int) -> float:
        """P(R=0 | X=arm), counting outcome-only missingness since R = RS * RY."""
        k = sum(
            c.count
            for c in self._arm_cells(arm, t)
            if c.status in (CellStatus.MISSING, CellStatus.MISSING_OUTCOME)
        )
        return self._ratio(k, arm)


class MissingSensitivityParams(_Frozen):
    """Hypothesized content of the R=0 cells and cross-time survival masses."""

    p_ya_s1_r0_x1: float = Field(0.0, ge=0.0, le=1.0, description="P(Y in y_a, S=1, R=0 | X=1).")
    p_not_yb_s1_r0_x0: float = Field(
        0.0, ge=0.0, le=1.0, description="P(Y not in y_b, S=1, R=0 | X=0)."
    )
    r_value: float = Field(0.0, ge=-1.0, le=1.0, description="r(t_L, t_U).")
    p_s1u_s0l_neq1: float = Field(
        0.0, ge=0.0, le=1.0, description="P(S_1(t_U) != 1, S_0(t_L) = 1)."
    )
    p_s1_r0_x0: float = Field(0.0, ge=0.0, le=1.0, description="P(S=1, R=0 | X=0).")
    p_s1_r0_x1: float = Field(0.0, ge=0.0, le=1.0, description="P(S=1, R=0 | X=1).")


class BoundValue(_Frozen):
    raw: float
    normalized: float | None = None
    denominator: float | None = None


class QolAnalysis(_Frozen):
    """Every generalized bound for one (t, y_a, y_b) request."""

    t: int
    label: str
    y_a: str
    y_b: str
    n_total: int
    lb_plain: float
    lb_normalized: float | None
    lb_normalized_note: str | None = None
    lb_conditional: float | None
    lb_conditional_note: str | None = None
    monotone: BoundValue
    test_continuity: TestResult
    test_plain: TestResult
    headcount_floor: int
    headcount_nearest: int


# ---------------------------------------------------------------------------
# Counterfactual oracle
# ---------------------------------------------------------------------------


class CounterfactualDistribution(_Frozen):
    """Probabilities of the 16 response types, in canonical row order."""

    probs: tuple[float, ...] = Field(..., min_length=16, max_length=16)

    @field_validator("probs")
    @classmethod
    def _simplex(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if any(p < 0 or not math.isfinite(p) for p in v):
            raise ValueError("probabilities must be finite and non-negative")
        if abs(math.fsum(v) - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {math.fsum(v)!r}, not 1")
        return v

    def mass(self, type_index: int) -> float:
        """Probability of response type 1..16."""
        return self.probs[type_index - 1]


class ResponseSlice(_Frozen):
    """Potential outcomes, survival and observation indicators at one time."""

    y1: float | None
    y0: float | None
    s1: Literal[0, 1]
    s0: Literal[0, 1]
    r1: Literal[0, 1] = 1
    r0: Literal[0, 1] = 1

    @model_validator(mode="after")
    def _star_iff_dead(self) -> ResponseSlice:
        if (self.y1 is None) != (self.s1 == 0) or (self.y0 is None) != (self.s0 == 0):
            raise ValueError("outcome must be missing (★) exactly when the individual is dead")
        return self


class GeneralizedAtom(_Frozen):
    slices: tuple[ResponseSlice, ...] = Field(..., min_length=1)
    prob: float = Field(..., ge=0.0)


class GeneralizedCfDistribution(_Frozen):
    support: tuple[GeneralizedAtom, ...] = Field(..., min_length=1)

    @model_validator(mode="after")
    def _valid(self) -> GeneralizedCfDistribution:
        if abs(math.fsum(a.prob for a in self.support) - 1.0) > 1e-12:
            raise ValueError("support probabilities must sum to 1")
        if len({len(a.slices) for a in self.support}) != 1:
            raise ValueError("every atom needs the same number of time slices")
        return self

    @property
    def n_times(self) -> int:
        return len(self.support[0].slices)


class PropositionCheck(_Frozen):
    regime: Regime
    y: Direction
    lhs: float
    rhs: float
    gap: float


class CorollaryCheck(_Frozen):
    regime: Regime
    y: Direction
    contrast: float
    target: float
    slack: float
    attained: float = Field(..., description="P^c(y, 1-y, 1, 1).")
    holds: bool


class SensitivityIdentity(_Frozen):
    kind: SensitivityKind
    parameter: float
    adjusted: float
    target: float
    gap: float


class BoundCheck(_Frozen):
    """One bound or identity compared against its brute-force target."""

    name: str
    value: float
    target: float
    identity: bool = Field(default=False, description="Equality required, not just <=.")
    holds: bool


class VerificationReport(_Frozen):
    checks_run: int = 0
    max_identity_gap: float = 0.0
    min_slack: float | None = None
    failures: tuple[str, ...] = ()
    notes: tuple[str, ...] = ()

    @property
    def passed(self) -> bool:
        return not self.failures


# ---------------------------------------------------------------------------
# Bayesian summaries
# ---------------------------------------------------------------------------


class DirichletPrior(_Frozen):
    """Dirichlet concentration per arm over the four allowed cells.

    Cell order follows ``ALLOWED_CELLS`` for categorical panels and
    (in-set, out-of-set, dead, missing) for generalized panels. A zero
    marks an improper component.
    """

    alpha0: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0)
    alpha1: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0)

    @field_validator("alpha0", "alpha1")
    @classmethod
    def _non_negative(cls, v: tuple[float, ...]) -> tuple[float, ...]:
        if any(a < 0 or not math.isfinite(a) for a in v):
            raise ValueError("Dirichlet concentrations must be finite and >= 0")
        return v

    @classmethod
    def uniform(cls, alpha: float = 1.0) -> DirichletPrior:
        return cls(alpha0=(alpha,) * 4, alpha1=(alpha,) * 4)


class PosteriorSummary(_Frozen):
    quantity: str
    mean: float
    median: float
    sd: float
    ci50: ConfidenceInterval
    ci95: ConfidenceInterval
    ci99: ConfidenceInterval
    prob_positive: float = Field(..., ge=0.0, le=1.0)
    n_draws: int
    seed: int
    prior: DirichletPrior


# ---------------------------------------------------------------------------
# Reproduction
# ---------------------------------------------------------------------------


class Comparison(_Frozen):
    """A published value next to the recomputed one."""

    table: str
    column: str
    quantity: str
    printed: str
    computed: float | str
    matches: bool
    exception: str | None = Field(default=None, description="Why a mismatch is expected.")


class NarrativeValue(_Frozen):
    name: str
    value: float | int
    note: str = ""


class ReproductionReport(_Frozen):
    variant: SwogVariant
    tables: tuple[AnalysisTable, ...]
    quality_of_life: tuple[QolAnalysis, ...]
    narratives: tuple[NarrativeValue, ...]
    comparisons: tuple[Comparison, ...]

    @property
    def exceptions(self) -> tuple[Comparison, ...]:
        return tuple(c for c in self.comparisons if c.exception is not None)

    @property
    def failures(self) -> tuple[Comparison, ...]:
        return tuple(c for c in self.comparisons if not c.matches and c.exception is None)


# ---------------------------------------------------------------------------
# CLI run configuration
# ---------------------------------------------------------------------------


class RunConfig(BaseModel):
    """Validated form of the command line."""

    command: Literal[
        "validate", "analyze", "sensitivity", "generalized", "simulate", "bayes", "reproduce-paper"
    ]
    data: str = "swog:main_text"
    regime: Regime | None = None
    all_regimes: bool = False
    y: Direction = 0
    alpha: float = Field(0.05, gt=0.0, lt=1.0)
    continuity: bool = True
    correction: Correction = Correction.BONFERRONI
    reference: ReferenceDistribution = ReferenceDistribution.NORMAL
    output_format: OutputFormat = OutputFormat.MARKDOWN
    seed: int = Field(7, ge=0)
    n_draws: int = Field(10_000, ge=1)
    chunk_size: int = Field(25_000, ge=1)
    t: int | None = Field(default=None, ge=1)
    t_lower: int | None = Field(default=None, ge=1)
    t_upper: int | None = Field(default=None, ge=1)
    kind: SensitivityKind | None = None
    grid: tuple[float, ...] | None = None
    y_a: str | None = None
    y_b: str | None = None
    missing_params: MissingSensitivityParams | None = None
    prior_alpha: float = Field(1.0, ge=0.0)
    dump_draws: str | None = None
    generalized: bool = False
    checks: int = Field(1000, ge=1)
    population: int = Field(0, ge=0)
    cdist_path: str | None = None
    inject_violation: bool = False
    variant: SwogVariant = SwogVariant.MAIN_TEXT

    @model_validator(mode="after")
    def _consistent_flags(self) -> RunConfig:
        if self.grid is not None and self.command != "sensitivity":
            raise ValueError("--grid is only valid with the sensitivity command")
        if self.kind is not None and self.command != "sensitivity":
            raise ValueError("--kind is only valid with the sensitivity command")
        if (self.y_a or self.y_b) and not (
            self.command == "generalized" or (self.command == "bayes" and self.generalized)
        ):
            raise ValueError("outcome sets are only valid with generalized analyses")
        if self.missing_params is not None and self.command != "generalized":
            raise ValueError("missing-data parameters are only valid with the generalized command")
        if (self.cdist_path or self.inject_violation or self.population) and self.command != "simulate":
            raise ValueError("--cdist, --inject-violation and --population belong to simulate")
        if self.dump_draws and self.command != "bayes":
            raise ValueError("--dump-draws is only valid with the bayes command")
        return self
