"""Sensitivity of the monotonicity-based conclusions to violations.

Each parameter (d_m, a_m, k_m) is an unidentified counterfactual mass. The
base contrast minus the parameter equals a counterfactual risk difference
exactly, so the base contrast is the break-even value of the parameter.
"""

from __future__ import annotations

import logging
from typing import Sequence

import numpy as np

from survivorbound.models.enums import Regime, SensitivityKind
from survivorbound.models.schemas import SensitivityOutcome, SensitivityParams, SensitivitySweep
from survivorbound.services.contrasts import CellProbabilities, contrast_value

logger = logging.getLogger("survivorbound.sensitivity")

BASE_REGIME: dict[SensitivityKind, Regime] = {
    SensitivityKind.DM: Regime.MONO_DEATH,
    SensitivityKind.AM: Regime.MONO_CENSOR,
    SensitivityKind.KM: Regime.MONO_BOTH,
}


def base_contrast(source: CellProbabilities, t: int, y: int, kind: SensitivityKind) -> float:
    return contrast_value(source, t, y, BASE_REGIME[SensitivityKind(kind)])


def adjusted_conclusion(
    source: CellProbabilities, t: int, y: int, params: SensitivityParams
) -> SensitivityOutcome:
    """Base contrast minus the supplied parameter; positive establishes the excess."""
    if params.t != t or params.y != y:
        raise ValueError(f"params are for t={params.t}, y={params.y}; asked for t={t}, y={y}")
    base = base_contrast(source, t, y, params.kind)
    adjusted = base - params.value
    return SensitivityOutcome(
        t=t, y=y, kind=params.kind, value=params.value,
        base_delta=base, adjusted_delta=adjusted, conclusion=adjusted > 0,
    )


def breakeven(source: CellProbabilities, t: int, y: int, kind: SensitivityKind) -> float:
    """Smallest parameter value at which the conclusion is lost."""
    return base_contrast(source, t, y, kind)


def sweep(
    source: CellProbabilities,
    t: int,
    y: int,
    kind: SensitivityKind,
    grid: Sequence[float],
    label: str | None = None,
) -> SensitivitySweep:
    base = base_contrast(source, t, y, kind)
    rows = tuple(
        adjusted_conclusion(source, t, y, SensitivityParams(kind=kind, value=float(v), t=t, y=y))
        for v in grid
    )
    flips = sum(1 for r in rows if not r.conclusion)
    logger.debug("sweep %s t=%d: base %.4f, %d/%d grid values void the conclusion", kind, t, base, flips, len(rows))
    return SensitivitySweep(
        t=t, label=label or str(t), y=y, kind=SensitivityKind(kind),
        base_delta=base, breakeven=base, rows=rows,
    )


def parse_grid(text: str) -> tuple[float, ...]:
    """Parse ``0,0.05,0.1`` or ``start:stop:step`` (stop included when on the grid)."""
    text = text.strip()
    if not text:
        return ()
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"grid range must be start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise ValueError(f"grid step must be positive, got {step}")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        if n < 1:
            return ()
        values = np.round(start + step * np.arange(n), 12)
    else:
        values = np.array([float(p) for p in text.split(",") if p.strip()])
    if np.any(np.abs(values) > 1.0):
        raise ValueError("sensitivity parameters must lie in [-1, 1]")
    return tuple(float(v) for v in values)
