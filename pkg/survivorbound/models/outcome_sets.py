"""Outcome sets on the real line: finite unions of intervals.

Endpoints carry explicit open/closed flags so "Q > 70" and "Q >= 70" differ
exactly for integer-valued scores. Infinite endpoints are always open.
"""

from __future__ import annotations

import math
import re

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from survivorbound.core.errors import OutcomeSetError


def _fmt(x: float) -> str:
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return f"{x:g}"


class Interval(BaseModel):
    """A connected subset of the real line."""

    model_config = ConfigDict(frozen=True)

    lo: float
    hi: float
    lo_closed: bool = False
    hi_closed: bool = False

    @model_validator(mode="before")
    @classmethod
    def _open_at_infinity(cls, data: object) -> object:
        if isinstance(data, dict):
            data = dict(data)
            if math.isinf(float(data.get("lo", 0.0))):
                data["lo_closed"] = False
            if math.isinf(float(data.get("hi", 0.0))):
                data["hi_closed"] = False
        return data

    @model_validator(mode="after")
    def _non_empty(self) -> Interval:
        if math.isnan(self.lo) or math.isnan(self.hi):
            raise ValueError("interval endpoints must not be NaN")
        if self.lo > self.hi or (self.lo == self.hi and not (self.lo_closed and self.hi_closed)):
            raise ValueError(f"empty interval {self}")
        return self

    @classmethod
    def point(cls, y: float) -> Interval:
        return cls(lo=y, hi=y, lo_closed=True, hi_closed=True)

    # Endpoint keys: a closed lower end sits just below an open one at the
    # same value; a closed upper end sits just above an open one.
    @property
    def lower_key(self) -> tuple[float, int]:
        return (self.lo, 0 if self.lo_closed else 1)

    @property
    def upper_key(self) -> tuple[float, int]:
        return (self.hi, 1 if self.hi_closed else 0)

    def contains(self, y: float) -> bool:
        above = y > self.lo or (self.lo_closed and y == self.lo)
        below = y < self.hi or (self.hi_closed and y == self.hi)
        return above and below

    def intersects(self, other: Interval) -> bool:
        lo = max(self.lower_key, other.lower_key)
        hi = min(self.upper_key, other.upper_key)
        if lo[0] < hi[0]:
            return True
        return lo[0] == hi[0] and lo[1] == 0 and hi[1] == 1

    def within(self, other: Interval) -> bool:
        return other.lower_key <= self.lower_key and self.upper_key <= other.upper_key

    def __str__(self) -> str:
        if self.lo == self.hi:
            return "{" + _fmt(self.lo) + "}"
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{_fmt(self.lo)},{_fmt(self.hi)}{right}"


def _touches(a: Interval, b: Interval) -> bool:
    """True when ``b`` (starting no earlier than ``a``) overlaps or abuts ``a``."""
    if b.lo < a.hi:
        return True
    return b.lo == a.hi and (a.hi_closed or b.lo_closed)


def _normalize(intervals: tuple[Interval, ...]) -> tuple[Interval, ...]:
    ordered = sorted(intervals, key=lambda iv: iv.lower_key)
    merged: list[Interval] = []
    for iv in ordered:
        if merged and _touches(merged[-1], iv):
            last = merged[-1]
            upper = max(last.upper_key, iv.upper_key)
            merged[-1] = Interval(
                lo=last.lo, lo_closed=last.lo_closed, hi=upper[0], hi_closed=upper[1] == 1
            )
        else:
            merged.append(iv)
    return tuple(merged)


class OutcomeSet(BaseModel):
    """Sorted, pairwise-disjoint union of intervals (y_a or y_b)."""

    model_config = ConfigDict(frozen=True)

    intervals: tuple[Interval, ...] = Field(default=())

    @field_validator("intervals")
    @classmethod
    def _canonical(cls, v: tuple[Interval, ...]) -> tuple[Interval, ...]:
        return _normalize(v)

    # ── Constructors ────────────────────────────────────────────────────

    @classmethod
    def of(cls, *intervals: Interval) -> OutcomeSet:
        return cls(intervals=intervals)

    @classmethod
    def real_line(cls) -> OutcomeSet:
        return cls.of(Interval(lo=-math.inf, hi=math.inf))

    @classmethod
    def empty(cls) -> OutcomeSet:
        return cls()

    @classmethod
    def above(cls, threshold: float, inclusive: bool = False) -> OutcomeSet:
        return cls.of(Interval(lo=threshold, hi=math.inf, lo_closed=inclusive))

    @classmethod
    def at_most(cls, threshold: float, inclusive: bool = True) -> OutcomeSet:
        return cls.of(Interval(lo=-math.inf, hi=threshold, hi_closed=inclusive))

    @classmethod
    def parse(cls, expr: str) -> OutcomeSet:
        return parse_outcome_set(expr)

    # ── Set calculus ────────────────────────────────────────────────────

    @property
    def is_empty(self) -> bool:
        return not self.intervals

    def contains(self, y: float) -> bool:
        return any(iv.contains(y) for iv in self.intervals)

    def complement(self) -> OutcomeSet:
        gaps: list[Interval] = []
        lo, lo_closed = -math.inf, False
        for iv in self.intervals:
            hi, hi_closed = iv.lo, not iv.lo_closed
            if lo < hi or (lo == hi and lo_closed and hi_closed):
                gaps.append(Interval(lo=lo, hi=hi, lo_closed=lo_closed, hi_closed=hi_closed))
            lo, lo_closed = iv.hi, not iv.hi_closed
        if lo < math.inf:
            gaps.append(Interval(lo=lo, hi=math.inf, lo_closed=lo_closed))
        return OutcomeSet(intervals=tuple(gaps))

    def union(self, other: OutcomeSet) -> OutcomeSet:
        return OutcomeSet(intervals=self.intervals + other.intervals)

    def issubset(self, other: OutcomeSet) -> bool:
        return all(any(iv.within(ov) for ov in other.intervals) for iv in self.intervals)

    def classify(self, bin_: Interval) -> bool:
        """Whether an outcome bin lies inside this set.

        Raises ``OutcomeSetError`` when the bin is neither contained in nor
        disjoint from the set.
        """
        if any(bin_.within(iv) for iv in self.intervals):
            return True
        if not any(bin_.intersects(iv) for iv in self.intervals):
            return False
        raise OutcomeSetError(f"outcome bin {bin_} straddles the boundary of {self}")

    def __str__(self) -> str:
        if self.is_empty:
            return "empty"
        if len(self.intervals) == 1 and self.intervals[0].lo == -math.inf and self.intervals[0].hi == math.inf:
            return "R"
        return "u".join(str(iv) for iv in self.intervals)


# ---------------------------------------------------------------------------
# Expression parser
# ---------------------------------------------------------------------------

_NUM = r"[+-]?(?:inf|infinity|\d+(?:\.\d*)?(?:e[+-]?\d+)?|\.\d+(?:e[+-]?\d+)?)"
_INTERVAL_RE = re.compile(rf"^([\[(])\s*({_NUM})\s*,\s*({_NUM})\s*([\])])$", re.IGNORECASE)
_POINT_RE = re.compile(rf"^\{{\s*({_NUM})\s*\}}$", re.IGNORECASE)
_COMPARE_RE = re.compile(rf"^(<=|>=|<|>)\s*({_NUM})$", re.IGNORECASE)


def _number(text: str) -> float:
    try:
        return float(text)
    except ValueError as exc:
        raise OutcomeSetError(f"not a number: {text!r}") from exc


def _parse_piece(piece: str) -> Interval:
    m = _INTERVAL_RE.match(piece)
    if m:
        left, lo, hi, right = m.groups()
        try:
            return Interval(
                lo=_number(lo), hi=_number(hi), lo_closed=left == "[", hi_closed=right == "]"
            )
        except ValueError as exc:
            raise OutcomeSetError(f"invalid interval {piece!r}: {exc}") from exc
    m = _POINT_RE.match(piece)
    if m:
        return Interval.point(_number(m.group(1)))
    m = _COMPARE_RE.match(piece)
    if m:
        op, value = m.group(1), _number(m.group(2))
        if op.startswith(">"):
            return Interval(lo=value, hi=math.inf, lo_closed=op == ">=")
        return Interval(lo=-math.inf, hi=value, hi_closed=op == "<=")
    raise OutcomeSetError(f"cannot parse outcome set piece {piece!r}")


def parse_outcome_set(expr: str) -> OutcomeSet:
    """Parse ``(70,inf)``, ``(-inf,75]``, ``[0,5)u(7,9]``, ``>70``, ``R`` or ``empty``."""
    text = expr.strip().replace("∪", "u").replace("∞", "inf")
    if not text:
        raise OutcomeSetError("empty outcome set expression")
    if text.lower() in {"r", "all", "real"}:
        return OutcomeSet.real_line()
    if text.lower() in {"empty", "{}", "none"}:
        return OutcomeSet.empty()
    pieces = [p.strip() for p in re.split(r"\s*[uU]\s*(?=[\[({<>])", text)]
    return OutcomeSet(intervals=tuple(_parse_piece(p) for p in pieces))
