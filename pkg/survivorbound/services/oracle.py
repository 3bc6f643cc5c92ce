"""Brute-force counterfactual engine.

A counterfactual distribution assigns probability to the 16 response types
(Y_1, Y_0, S_1, S_0). Randomization and consistency turn it into exact
observed margins, so every identity and bound the library relies on can be
checked as plain arithmetic against the counterfactual sums it claims.
"""

from __future__ import annotations

import io
import logging
import math
from typing import Callable, Iterable

import numpy as np
import pandas as pd

from survivorbound.core.errors import (
    PanelParseError,
    RegimePreconditionError,
    UndefinedBoundError,
)
from survivorbound.core.rng import SeededRng
from survivorbound.models.enums import Arm, Regime, SensitivityKind
from survivorbound.models.outcome_sets import OutcomeSet
from survivorbound.models.schemas import (
    BoundCheck,
    BoundValue,
    ContingencyPanel,
    CorollaryCheck,
    CounterfactualDistribution,
    GeneralizedAtom,
    GeneralizedCfDistribution,
    MissingSensitivityParams,
    PropositionCheck,
    ResponseSlice,
    SensitivityIdentity,
    VerificationReport,
)
from survivorbound.services import generalized
from survivorbound.services.contrasts import contrast_value
from survivorbound.services.panel_data import build_panel
from survivorbound.services.sensitivity import BASE_REGIME

logger = logging.getLogger("survivorbound.oracle")

IDENTITY_TOL = 1e-12

#: Response types 1..16 as (Y_1, Y_0, S_1, S_0).
TYPES: tuple[tuple[int, int, int, int], ...] = (
    (1, 1, 1, 1),
    (0, 1, 1, 1),
    (1, 0, 1, 1),
    (0, 0, 1, 1),
    (2, 1, 0, 1),
    (2, 0, 0, 1),
    (1, 2, 1, 0),
    (0, 2, 1, 0),
    (2, 2, 0, 0),
    (3, 3, 2, 2),
    (3, 1, 2, 1),
    (3, 0, 2, 1),
    (3, 2, 2, 0),
    (1, 3, 1, 2),
    (0, 3, 1, 2),
    (2, 3, 0, 2),
)
_TYPE_INDEX = {quad: i for i, quad in enumerate(TYPES, start=1)}

#: Types a regime rules out.
EXCLUDED_TYPES: dict[Regime, tuple[int, ...]] = {
    Regime.NO_ASSUMPTIONS: (),
    Regime.MONO_DEATH: (5, 6),
    Regime.MONO_CENSOR: (11, 12),
    Regime.MONO_BOTH: (5, 6, 11, 12),
}


def pc(cdist: CounterfactualDistribution, y1: int, y0: int, s1: int, s0: int) -> float:
    """P^c(y1, y0, s1, s0); zero for quadruples that are not response types."""
    index = _TYPE_INDEX.get((y1, y0, s1, s0))
    return cdist.mass(index) if index is not None else 0.0


# ── Observed margins ────────────────────────────────────────────────────


class ObservedMargins:
    """Exact P(Y=y, S=s | X=x) implied by a counterfactual distribution.

    A single-timepoint object: ``t`` is accepted for protocol compatibility
    and ignored.
    """

    def __init__(self, cdist: CounterfactualDistribution) -> None:
        probs: dict[tuple[int, int, int], list[float]] = {}
        for (y1, y0, s1, s0), p in zip(TYPES, cdist.probs):
            probs.setdefault((y1, s1, int(Arm.TREATED)), []).append(p)
            probs.setdefault((y0, s0, int(Arm.CONTROL)), []).append(p)
        self._probs = {key: math.fsum(values) for key, values in probs.items()}

    def prob(self, y: int, s: int, x: int, t: int = 1) -> float:
        return self._probs.get((int(y), int(s), int(x)), 0.0)

    def cells(self, x: int) -> dict[tuple[int, int], float]:
        return {(y, s): p for (y, s, arm), p in self._probs.items() if arm == x}


def observed_margins(cdist: CounterfactualDistribution) -> ObservedMargins:
    return ObservedMargins(cdist)


def check_regime(cdist: CounterfactualDistribution, regime: Regime) -> None:
    offending = [i for i in EXCLUDED_TYPES[Regime(regime)] if cdist.mass(i) > 0]
    if offending:
        raise RegimePreconditionError(str(regime), offending)


# ── Counterfactual targets ──────────────────────────────────────────────


def proposition_rhs(cdist: CounterfactualDistribution, regime: Regime, y: int) -> float:
    """Counterfactual expression the regime's contrast equals."""
    n = 1 - y
    subtract = [(n, y, 1, 1), (n, 2, 1, 0), (n, 3, 1, 2)]
    match Regime(regime):
        case Regime.NO_ASSUMPTIONS:
            subtract += [(2, y, 0, 1), (2, 2, 0, 0), (3, 3, 2, 2), (3, y, 2, 1), (3, 2, 2, 0), (2, 3, 0, 2)]
        case Regime.MONO_DEATH:
            subtract += [(3, 3, 2, 2), (3, y, 2, 1), (3, 2, 2, 0)]
        case Regime.MONO_CENSOR:
            subtract += [(2, y, 0, 1), (2, 2, 0, 0), (2, 3, 0, 2)]
        case Regime.MONO_BOTH:
            pass
    return pc(cdist, y, n, 1, 1) - math.fsum(pc(cdist, *q) for q in subtract)


def corollary_target(cdist: CounterfactualDistribution, regime: Regime, y: int) -> float:
    """Always-survivor risk difference the regime's contrast lower-bounds."""
    n = 1 - y
    subtract = [(n, y, 1, 1), (n, 3, 1, 2)]
    if Regime(regime) in (Regime.NO_ASSUMPTIONS, Regime.MONO_DEATH):
        subtract += [(3, 3, 2, 2), (3, y, 2, 1)]
    return pc(cdist, y, n, 1, 1) - math.fsum(pc(cdist, *q) for q in subtract)


def sensitivity_parameter(cdist: CounterfactualDistribution, kind: SensitivityKind, y: int) -> float:
    """d_m, a_m or k_m read off the counterfactual distribution."""
    n = 1 - y
    match SensitivityKind(kind):
        case SensitivityKind.DM:
            plus, minus = [(2, n, 0, 1)], [(n, 2, 1, 0), (3, 2, 2, 0)]
        case SensitivityKind.AM:
            plus = [(3, n, 2, 1)]
            minus = [(n, 2, 1, 0), (n, 3, 1, 2), (2, y, 0, 1), (2, 2, 0, 0), (2, 3, 0, 2)]
        case SensitivityKind.KM:
            plus, minus = [(2, n, 0, 1), (3, n, 2, 1)], [(n, 2, 1, 0), (n, 3, 1, 2)]
    return math.fsum(pc(cdist, *q) for q in plus) - math.fsum(pc(cdist, *q) for q in minus)


def sensitivity_target(cdist: CounterfactualDistribution, kind: SensitivityKind, y: int) -> float:
    if SensitivityKind(kind) == SensitivityKind.DM:
        return corollary_target(cdist, Regime.NO_ASSUMPTIONS, y)
    return pc(cdist, y, 1 - y, 1, 1) - pc(cdist, 1 - y, y, 1, 1)


# ── Identity and bound checks ───────────────────────────────────────────


def verify_proposition(cdist: CounterfactualDistribution, regime: Regime, y: int) -> PropositionCheck:
    check_regime(cdist, regime)
    lhs = contrast_value(observed_margins(cdist), 1, y, regime)
    rhs = proposition_rhs(cdist, regime, y)
    return PropositionCheck(regime=regime, y=y, lhs=lhs, rhs=rhs, gap=abs(lhs - rhs))


def verify_corollary_bounds(cdist: CounterfactualDistribution, regime: Regime, y: int) -> CorollaryCheck:
    check_regime(cdist, regime)
    value = contrast_value(observed_margins(cdist), 1, y, regime)
    target = corollary_target(cdist, regime, y)
    attained = pc(cdist, y, 1 - y, 1, 1)
    slack = target - value
    holds = slack >= -IDENTITY_TOL and max(value, 0.0) <= attained + IDENTITY_TOL
    return CorollaryCheck(
        regime=regime, y=y, contrast=value, target=target, slack=slack, attained=attained, holds=holds,
    )


def verify_sensitivity_identities(
    cdist: CounterfactualDistribution, y: int
) -> tuple[SensitivityIdentity, ...]:
    """Base contrast minus each parameter against its counterfactual expression."""
    margins = observed_margins(cdist)
    results = []
    for kind in SensitivityKind:
        parameter = sensitivity_parameter(cdist, kind, y)
        adjusted = contrast_value(margins, 1, y, BASE_REGIME[kind]) - parameter
        target = sensitivity_target(cdist, kind, y)
        results.append(
            SensitivityIdentity(
                kind=kind, parameter=parameter, adjusted=adjusted, target=target, gap=abs(adjusted - target)
            )
        )
    return tuple(results)


# ── Generators ──────────────────────────────────────────────────────────


def _free_types(constraints: Iterable[int]) -> list[int]:
    excluded = set(constraints)
    if not excluded <= set(range(1, 17)):
        raise ValueError(f"constraint types must lie in 1..16, got {sorted(excluded)}")
    free = [i for i in range(1, 17) if i not in excluded]
    if not free:
        raise ValueError("every response type is constrained to zero")
    return free


def _from_weights(types: list[int], weights: np.ndarray) -> CounterfactualDistribution:
    probs = [0.0] * 16
    for i, w in zip(types, weights / weights.sum()):
        probs[i - 1] = float(w)
    return CounterfactualDistribution(probs=tuple(probs))


def random_cdist(rng: SeededRng, constraints: Iterable[int] = ()) -> CounterfactualDistribution:
    """Uniform draw on the simplex of the unconstrained types."""
    free = _free_types(constraints)
    return _from_weights(free, rng.standard_exponential(len(free)))


def boundary_cdist(
    rng: SeededRng, constraints: Iterable[int] = (), support_size: int = 2
) -> CounterfactualDistribution:
    """Sparse draw: ``support_size`` random free types carry all the mass."""
    free = _free_types(constraints)
    k = max(1, min(support_size, len(free)))
    chosen = sorted(int(free[i]) for i in rng.generator.permutation(len(free))[:k])
    return _from_weights(chosen, rng.standard_exponential(k))


def point_mass(type_index: int) -> CounterfactualDistribution:
    probs = [0.0] * 16
    probs[type_index - 1] = 1.0
    return CounterfactualDistribution(probs=tuple(probs))


def tight_witnesses() -> tuple[tuple[Regime, int, CounterfactualDistribution], ...]:
    """Point masses on (Y_1, Y_0) = (y, 1-y) always survivors; every corollary is tight there."""
    witnesses = []
    for regime in Regime:
        for y in (0, 1):
            witnesses.append((regime, y, point_mass(_TYPE_INDEX[(y, 1 - y, 1, 1)])))
    return tuple(witnesses)


def violating_cdist(regime: Regime) -> CounterfactualDistribution:
    """Half the mass on the first type ``regime`` excludes."""
    excluded = EXCLUDED_TYPES[Regime(regime)]
    if not excluded:
        raise ValueError(f"regime {regime} excludes no response type")
    probs = [0.0] * 16
    probs[excluded[0] - 1] = 0.5
    probs[_TYPE_INDEX[(1, 0, 1, 1)] - 1] = 0.5
    return CounterfactualDistribution(probs=tuple(probs))


# ── Serialization ───────────────────────────────────────────────────────


def cdist_to_csv(cdist: CounterfactualDistribution) -> str:
    """16 ``type_index,probability`` lines in type order."""
    frame = pd.DataFrame({"type_index": range(1, 17), "probability": cdist.probs})
    return frame.to_csv(header=False, index=False, lineterminator="\n", float_format="%.17g")


def cdist_from_csv(text: str) -> CounterfactualDistribution:
    try:
        frame = pd.read_csv(io.StringIO(text.strip()), header=None, dtype=str)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise PanelParseError(f"malformed distribution file: {exc}") from exc
    if frame.shape != (16, 2):
        raise PanelParseError(f"expected 16 rows of type_index,probability, got shape {frame.shape}")
    probs = []
    for lineno, (index, value) in enumerate(frame.itertuples(index=False), start=1):
        try:
            type_index, prob = int(index), float(value)
        except ValueError:
            raise PanelParseError(f"bad row {index},{value}", lineno) from None
        if type_index != lineno:
            raise PanelParseError(f"expected type index {lineno}, got {type_index}", lineno)
        probs.append(prob)
    return CounterfactualDistribution(probs=tuple(probs))


# ── Population sampling ─────────────────────────────────────────────────


def sample_population(
    cdist: CounterfactualDistribution,
    n: int,
    p_treat: float = 0.5,
    rng: SeededRng | None = None,
    chunk_size: int = 250_000,
    label: str = "t",
) -> ContingencyPanel:
    """Draw ``n`` individuals, randomize each to an arm and tabulate what is observed.

    Chunk ``i`` uses ``rng.substream(i)``, so results depend only on the
    seed, ``n`` and ``chunk_size``.
    """
    if n < 1:
        raise ValueError(f"population size must be >= 1, got {n}")
    if not 0.0 < p_treat < 1.0:
        raise ValueError(f"p_treat must lie in (0, 1), got {p_treat}")
    rng = rng or SeededRng(0)
    probs = np.asarray(cdist.probs, dtype=float)
    probs = probs / probs.sum()

    by_type = {Arm.CONTROL: np.zeros(16, dtype=np.int64), Arm.TREATED: np.zeros(16, dtype=np.int64)}
    for index, start in enumerate(range(0, n, chunk_size)):
        size = min(chunk_size, n - start)
        sub = rng.substream(index)
        types = sub.choice(16, size, probs)
        treated = sub.random(size) < p_treat
        by_type[Arm.TREATED] += np.bincount(types[treated], minlength=16)
        by_type[Arm.CONTROL] += np.bincount(types[~treated], minlength=16)

    counts: dict[tuple[int, int, int, int], int] = {}
    for arm, tally in by_type.items():
        for (y1, y0, s1, s0), k in zip(TYPES, tally):
            y, s = (y1, s1) if arm == Arm.TREATED else (y0, s0)
            key = (int(arm), 1, y, s)
            counts[key] = counts.get(key, 0) + int(k)
    n1 = int(by_type[Arm.TREATED].sum())
    return build_panel((label,), n - n1, n1, counts)


def margin_deviations(cdist: CounterfactualDistribution, panel: ContingencyPanel) -> list[tuple[int, int, int, float]]:
    """(arm, y, s, |error| / binomial SE) for every observed cell of a sampled panel."""
    margins = observed_margins(cdist)
    out = []
    for arm in (Arm.CONTROL, Arm.TREATED):
        n = panel.arm_size(arm)
        if n == 0:
            continue
        for (y, s), p in margins.cells(arm).items():
            err = abs(panel.prob(y, s, arm, 1) - p)
            se = math.sqrt(p * (1 - p) / n)
            out.append((int(arm), y, s, err / se if se > 0 else (0.0 if err == 0 else math.inf)))
    return out


# ── Generalized distributions ───────────────────────────────────────────


class GdistMargins:
    """Observed-data margins of a generalized distribution.

    The treated arm is read at time slice ``t_treated`` and the control arm at
    ``t_control`` when given; otherwise both at the requested ``t``.
    """

    def __init__(self, gdist: GeneralizedCfDistribution) -> None:
        self._gdist = gdist

    def _mass(self, arm: int, t: int, keep: Callable[[float | None, int, int], bool]) -> float:
        total = []
        for atom in self._gdist.support:
            sl = atom.slices[t - 1]
            y, s, r = (sl.y1, sl.s1, sl.r1) if arm == Arm.TREATED else (sl.y0, sl.s0, sl.r0)
            if keep(y, s, r):
                total.append(atom.prob)
        return math.fsum(total)

    def prob_observed(
        self, arm: int, t: int, outcome_set: OutcomeSet | None = None, inside: bool = True
    ) -> float:
        return self._mass(
            arm, t,
            lambda y, s, r: s == 1 and r == 1 and (outcome_set is None or outcome_set.contains(y) == inside),
        )

    def prob_dead(self, arm: int, t: int) -> float:
        return self._mass(arm, t, lambda y, s, r: s == 0 and r == 1)

    def prob_missing(self, arm: int, t: int) -> float:
        return self._mass(arm, t, lambda y, s, r: r == 0)


def _gmass(gdist: GeneralizedCfDistribution, keep: Callable[[GeneralizedAtom], bool]) -> float:
    return math.fsum(a.prob for a in gdist.support if keep(a))


def random_gdist(
    rng: SeededRng,
    support_size: int = 12,
    n_times: int = 1,
    monotone: bool = False,
    y_values: int = 6,
) -> GeneralizedCfDistribution:
    """Random finite-support distribution with integer outcomes in ``0..y_values-1``.

    With ``monotone`` no atom is an observed control survivor without also
    being an observed treated survivor.
    """
    k = int(rng.integers(1, support_size + 1))
    weights = rng.standard_exponential(k)
    weights = weights / weights.sum()
    atoms = []
    for w in weights:
        slices = []
        for _ in range(n_times):
            s1, s0, r1, r0 = (int(v) for v in rng.integers(0, 2, size=4))
            if monotone and s0 == 1 and r0 == 1:
                s1, r1 = 1, 1
            y1 = float(rng.integers(0, y_values)) if s1 else None
            y0 = float(rng.integers(0, y_values)) if s0 else None
            slices.append(ResponseSlice(y1=y1, y0=y0, s1=s1, s0=s0, r1=r1, r0=r0))
        atoms.append(GeneralizedAtom(slices=tuple(slices), prob=float(w)))
    return GeneralizedCfDistribution(support=tuple(atoms))


def random_outcome_set(rng: SeededRng, y_values: int = 6) -> OutcomeSet:
    """Threshold set on the integer outcome grid, occasionally the whole line or empty."""
    pick = int(rng.integers(0, 10))
    if pick == 0:
        return OutcomeSet.real_line()
    if pick == 1:
        return OutcomeSet.empty()
    threshold = float(rng.integers(0, y_values))
    return OutcomeSet.at_most(threshold) if pick % 2 else OutcomeSet.above(threshold)


def is_monotone(gdist: GeneralizedCfDistribution, t: int) -> bool:
    return not any(
        a.prob > 0
        and a.slices[t - 1].s0 == 1 and a.slices[t - 1].r0 == 1
        and not (a.slices[t - 1].s1 == 1 and a.slices[t - 1].r1 == 1)
        for a in gdist.support
    )


def exact_missing_params(
    gdist: GeneralizedCfDistribution,
    y_a: OutcomeSet,
    y_b: OutcomeSet,
    t_lower: int = 1,
    t_upper: int = 1,
) -> MissingSensitivityParams:
    """The sensitivity parameters a perfectly informed analyst would supply."""
    def tu(a: GeneralizedAtom) -> ResponseSlice:
        return a.slices[t_upper - 1]

    def tl(a: GeneralizedAtom) -> ResponseSlice:
        return a.slices[t_lower - 1]

    return MissingSensitivityParams(
        p_ya_s1_r0_x1=_gmass(gdist, lambda a: tu(a).s1 == 1 and tu(a).r1 == 0 and y_a.contains(tu(a).y1)),
        p_s1_r0_x1=_gmass(gdist, lambda a: tu(a).s1 == 1 and tu(a).r1 == 0),
        p_not_yb_s1_r0_x0=_gmass(
            gdist, lambda a: tl(a).s0 == 1 and tl(a).r0 == 0 and not y_b.contains(tl(a).y0)
        ),
        p_s1_r0_x0=_gmass(gdist, lambda a: tl(a).s0 == 1 and tl(a).r0 == 0),
        r_value=_gmass(gdist, lambda a: tu(a).s1 == 0 and tl(a).s0 == 1 and not y_b.contains(tl(a).y0))
        - _gmass(gdist, lambda a: tu(a).s1 == 1 and tl(a).s0 == 0 and not y_a.contains(tu(a).y1)),
        p_s1u_s0l_neq1=_gmass(gdist, lambda a: tu(a).s1 != 1 and tl(a).s0 == 1),
    )


def _contrast_terms(
    gdist: GeneralizedCfDistribution,
    y_a: OutcomeSet,
    y_b: OutcomeSet,
    t_treated: int,
    t_control: int,
    stratum: Callable[[ResponseSlice, ResponseSlice], bool],
    harm_stratum: Callable[[ResponseSlice, ResponseSlice], bool] | None = None,
) -> tuple[float, float, float]:
    """(benefit mass, harm mass, stratum mass) for the two-sided contrast in a stratum."""
    harm_stratum = harm_stratum or stratum

    def benefit(a: GeneralizedAtom) -> bool:
        u, l = a.slices[t_treated - 1], a.slices[t_control - 1]
        return stratum(u, l) and y_a.contains(u.y1) and not y_b.contains(l.y0)

    def harm(a: GeneralizedAtom) -> bool:
        u, l = a.slices[t_treated - 1], a.slices[t_control - 1]
        return harm_stratum(u, l) and not y_a.contains(u.y1) and y_b.contains(l.y0)

    mass = _gmass(gdist, lambda a: stratum(a.slices[t_treated - 1], a.slices[t_control - 1]))
    return _gmass(gdist, benefit), _gmass(gdist, harm), mass


def _survivors(u: ResponseSlice, l: ResponseSlice) -> bool:
    return u.s1 == 1 and l.s0 == 1


def _observed_survivors(u: ResponseSlice, l: ResponseSlice) -> bool:
    return u.s1 == 1 and l.s0 == 1 and u.r1 == 1 and l.r0 == 1


def _bound(name: str, value: float, target: float, identity: bool = False, scale: float = 1.0) -> BoundCheck:
    """Compare within 1e-12, loosened for ratios by their denominator ``scale``."""
    tol = IDENTITY_TOL / min(scale, 1.0)
    holds = abs(value - target) <= tol if identity else value <= target + tol
    return BoundCheck(name=name, value=value, target=target, identity=identity, holds=holds)


def verify_generalized_bounds(
    gdist: GeneralizedCfDistribution,
    y_a: OutcomeSet,
    y_b: OutcomeSet,
    t: int = 1,
    t_lower: int | None = None,
    t_upper: int | None = None,
) -> tuple[tuple[BoundCheck, ...], tuple[str, ...]]:
    """Every generalized bound against its brute-force target.

    Returns the checks and notes for bounds whose regime or precondition
    does not hold on this distribution.
    """
    margins = GdistMargins(gdist)
    checks: list[BoundCheck] = []
    notes: list[str] = []

    benefit, harm, survivors = _contrast_terms(gdist, y_a, y_b, t, t, _survivors)
    obs_benefit, obs_harm, observed = _contrast_terms(gdist, y_a, y_b, t, t, _observed_survivors)

    plain = generalized.lb_plain(margins, t, y_a, y_b)
    checks.append(_bound("lb_plain", plain, obs_benefit - harm))

    try:
        normalized = generalized.lb_normalized(margins, t, y_a, y_b)
        if observed > IDENTITY_TOL:
            checks.append(_bound("lb_normalized", normalized, (obs_benefit - obs_harm) / observed, scale=observed))
    except UndefinedBoundError:
        notes.append("lb_normalized: denominator not positive")

    if plain > IDENTITY_TOL and survivors > IDENTITY_TOL:
        conditional = generalized.lb_conditional(margins, t, y_a, y_b)
        checks.append(_bound("lb_conditional", conditional, (benefit - harm) / survivors, scale=survivors))
    else:
        notes.append("lb_conditional: not applicable")

    if is_monotone(gdist, t):
        mono = generalized.lb_monotone(margins, t, y_a, y_b)
        _, mono_harm, _ = _contrast_terms(
            gdist, y_a, y_b, t, t, _observed_survivors,
            harm_stratum=lambda u, l: u.s1 == 1 and u.r1 == 1 and l.s0 == 1,
        )
        target = obs_benefit - mono_harm
        checks.append(_bound("lb_monotone", mono.raw, target))
        if mono.normalized is not None and mono.denominator > IDENTITY_TOL:
            checks.append(_bound("lb_monotone_normalized", mono.normalized, target / mono.denominator, scale=mono.denominator))
    else:
        notes.append("lb_monotone: distribution is not monotone")

    exact = exact_missing_params(gdist, y_a, y_b, t, t)
    try:
        full = generalized.lb_missing_sensitivity(margins, t, y_a, y_b, exact)
    except UndefinedBoundError:
        full = BoundValue(raw=plain + exact.p_ya_s1_r0_x1 + exact.p_not_yb_s1_r0_x0)
        notes.append("lb_missing_sensitivity: normalizing denominator not positive")
    in_a = _gmass(gdist, lambda a: a.slices[t - 1].s1 == 1 and y_a.contains(a.slices[t - 1].y1))
    in_b = _gmass(gdist, lambda a: a.slices[t - 1].s0 == 1 and not y_b.contains(a.slices[t - 1].y0))
    both = _gmass(
        gdist,
        lambda a: a.slices[t - 1].s1 == 1 and y_a.contains(a.slices[t - 1].y1)
        and a.slices[t - 1].s0 == 1 and not y_b.contains(a.slices[t - 1].y0),
    )
    neither = 1.0 - in_a - in_b + both
    checks.append(_bound("lb_missing_sensitivity_identity", full.raw, both - neither, identity=True))
    checks.append(_bound("lb_missing_sensitivity", full.raw, benefit - harm))
    if full.normalized is not None and survivors > IDENTITY_TOL:
        checks.append(_bound("lb_missing_sensitivity_normalized", full.normalized, (benefit - harm) / survivors, scale=survivors))

    lo = t_lower or t
    hi = t_upper or t
    exact_two = exact_missing_params(gdist, y_a, y_b, lo, hi)
    b2, h2, s2 = _contrast_terms(gdist, y_a, y_b, hi, lo, _survivors)
    if s2 > IDENTITY_TOL:
        two = generalized.mono_sensitivity_two_times(margins, lo, hi, y_a, y_b, exact_two)
        checks.append(_bound("mono_sensitivity_two_times", two.raw, b2 - h2, identity=True))
        checks.append(_bound("mono_sensitivity_two_times_normalized", two.normalized, (b2 - h2) / s2, identity=True, scale=s2))
    else:
        notes.append("mono_sensitivity_two_times: no joint survivors")
    return tuple(checks), tuple(notes)


# ── Suite ───────────────────────────────────────────────────────────────


def _describe(cdist: CounterfactualDistribution) -> str:
    return "[" + ", ".join(f"{p:.6g}" for p in cdist.probs) + "]"


class VerificationSuite:
    """Runs the identity, bound and sampling checks over many random distributions."""

    def __init__(self, seed: int = 7, tolerance: float = IDENTITY_TOL) -> None:
        self._seed = seed
        self._tol = tolerance

    def run(
        self,
        checks: int = 1000,
        regime: Regime | None = None,
        population: int = 0,
        cdist: CounterfactualDistribution | None = None,
        inject_violation: bool = False,
        generalized_checks: int | None = None,
    ) -> VerificationReport:
        regimes = [Regime(regime)] if regime is not None else list(Regime)
        failures: list[str] = []
        notes: list[str] = []
        state = {"runs": 0, "gap": 0.0, "slack": math.inf}

        def record_gap(label: str, gap: float, dist: CounterfactualDistribution) -> None:
            state["runs"] += 1
            state["gap"] = max(state["gap"], gap)
            if gap > self._tol:
                failures.append(f"{label}: gap {gap:.3g} for {_describe(dist)}")

        def check_cdist(dist: CounterfactualDistribution, rg: Regime, label: str) -> None:
            for y in (0, 1):
                prop = verify_proposition(dist, rg, y)
                record_gap(f"{label} proposition {rg} y={y}", prop.gap, dist)
                cor = verify_corollary_bounds(dist, rg, y)
                state["runs"] += 1
                state["slack"] = min(state["slack"], cor.slack)
                if not cor.holds:
                    failures.append(f"{label} corollary {rg} y={y}: slack {cor.slack:.3g} for {_describe(dist)}")
                for ident in verify_sensitivity_identities(dist, y):
                    record_gap(f"{label} sensitivity {ident.kind} y={y}", ident.gap, dist)

        root = SeededRng(self._seed)
        for stream, rg in enumerate(regimes, start=1):
            rng = root.substream(stream)
            excluded = EXCLUDED_TYPES[rg]
            for i in range(checks):
                dist = random_cdist(rng, excluded) if i % 2 == 0 else boundary_cdist(rng, excluded, 1 + i % 4)
                check_cdist(dist, rg, f"random[{i}]")
            logger.info("Regime %s: %d random distributions checked", rg, checks)

        for rg, y, witness in tight_witnesses():
            if rg not in regimes:
                continue
            cor = verify_corollary_bounds(witness, rg, y)
            state["runs"] += 1
            if abs(cor.slack) > self._tol or abs(cor.contrast - 1.0) > self._tol:
                failures.append(f"tight witness {rg} y={y}: slack {cor.slack:.3g}")

        if cdist is not None:
            for rg in regimes:
                try:
                    check_cdist(cdist, rg, "supplied")
                except RegimePreconditionError as exc:
                    failures.append(f"supplied distribution: {exc}")

        if inject_violation:
            rg = next((r for r in regimes if EXCLUDED_TYPES[r]), Regime.MONO_DEATH)
            bad = violating_cdist(rg)
            try:
                check_cdist(bad, rg, "injected")
            except RegimePreconditionError as exc:
                failures.append(f"injected violation: {exc}")

        n_gen = generalized_checks if generalized_checks is not None else max(checks // 2, 1)
        rng = root.substream(len(Regime) + 1)
        skipped = 0
        for i in range(n_gen):
            gdist = random_gdist(rng, support_size=12, n_times=2, monotone=i % 2 == 0)
            y_a, y_b = random_outcome_set(rng), random_outcome_set(rng)
            bound_checks, bound_notes = verify_generalized_bounds(gdist, y_a, y_b, t=1, t_lower=1, t_upper=2)
            skipped += len(bound_notes)
            for bc in bound_checks:
                state["runs"] += 1
                if bc.identity:
                    state["gap"] = max(state["gap"], abs(bc.value - bc.target))
                if not bc.holds:
                    failures.append(
                        f"generalized[{i}] {bc.name}: {bc.value:.6g} vs {bc.target:.6g} (y_a={y_a}, y_b={y_b})"
                    )
        if n_gen:
            notes.append(f"{n_gen} generalized distributions checked; {skipped} bound(s) not applicable")

        if population:
            dist = random_cdist(root.substream(len(Regime) + 2))
            panel = sample_population(dist, population, rng=root.substream(len(Regime) + 3))
            worst = 0.0
            for arm, y, s, z in margin_deviations(dist, panel):
                state["runs"] += 1
                worst = max(worst, z)
                if z > 4.0:
                    failures.append(f"sampled margin arm={arm} y={y} s={s}: {z:.2f} SE from {_describe(dist)}")
            notes.append(f"population n={population}: largest margin deviation {worst:.2f} SE")

        report = VerificationReport(
            checks_run=state["runs"],
            max_identity_gap=state["gap"],
            min_slack=None if state["slack"] == math.inf else state["slack"],
            failures=tuple(failures),
            notes=tuple(notes),
        )
        level = logging.INFO if report.passed else logging.WARNING
        logger.log(level, "Verification: %d checks, %d failures", report.checks_run, len(report.failures))
        return report
