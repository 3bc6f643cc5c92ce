"""Enumerations used throughout survivorbound."""

from enum import IntEnum, StrEnum


class OutcomeCode(IntEnum):
    """Categorical outcome Y at a timepoint."""

    ABSENT = 0
    PRESENT = 1
    DEAD = 2
    CENSORED = 3


class SurvivalCode(IntEnum):
    """Survival status S at a timepoint."""

    DEAD = 0
    ALIVE = 1
    CENSORED = 2


class Arm(IntEnum):
    """Randomized treatment assignment X."""

    CONTROL = 0
    TREATED = 1


class Regime(StrEnum):
    """Which monotonicity assumptions the analyst is willing to make."""

    NO_ASSUMPTIONS = "none"
    MONO_DEATH = "mono-death"     # excludes response types 5, 6
    MONO_CENSOR = "mono-censor"   # excludes response types 11, 12
    MONO_BOTH = "both"            # excludes 5, 6, 11, 12


class SensitivityKind(StrEnum):
    """Unidentified parameter of a monotonicity-violation analysis."""

    DM = "dm"  # death monotonicity, MonoDeath base contrast
    AM = "am"  # censoring monotonicity, MonoCensor base contrast
    KM = "km"  # both, MonoBoth base contrast


class CheckStatus(StrEnum):
    """Outcome of a falsification check."""

    CONSISTENT = "consistent"
    FALSIFIED = "falsified"


class Correction(StrEnum):
    """Multiplicity correction across the time grid."""

    BONFERRONI = "bonferroni"
    NONE = "none"


class ReferenceDistribution(StrEnum):
    """Null distribution of the Wald statistic."""

    NORMAL = "normal"
    STUDENT_T = "t"


class HeadcountRounding(StrEnum):
    """How a population-scale bound is turned into a number of people."""

    FLOOR = "floor"      # guaranteed minimum
    NEAREST = "nearest"  # narrative convention on the display-rounded bound


class OutputFormat(StrEnum):
    """Rendering target for CLI output."""

    MARKDOWN = "markdown"
    TSV = "tsv"
    JSON = "json"


class SwogVariant(StrEnum):
    """Which published count to use for treated deaths at 18 months."""

    MAIN_TEXT = "main_text"  # 139
    APPENDIX = "appendix"    # 166


class CellStatus(StrEnum):
    """Observed status of an individual in the generalized data model."""

    ALIVE = "alive"                      # S=1, R=1, outcome observed
    DEAD = "dead"                        # S=0, R=1, outcome is ★
    MISSING = "missing"                  # R=0
    MISSING_OUTCOME = "missing_outcome"  # RS=1, S=1, RY=0 (so R=0)


class GeneralizedBound(StrEnum):
    """Generalized bound a posterior can be computed for."""

    PLAIN = "plain"
    MONOTONE = "monotone"
