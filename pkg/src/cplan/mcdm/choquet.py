"""Choquet aggregation and alternative ranking.

The integral of a value profile x with respect to a capacity mu is computed
from the ascending rearrangement x(1) <= ... <= x(n):

    C(x) = sum_i (x(i) - x(i-1)) * mu(A_i),   x(0) = 0,

where A_i is the set of criteria at sorted positions i..n. Ties are ordered
by criterion position for deterministic traces; the result does not depend on
the tie order because tied increments are zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from ..errors import DomainError, ValidationFailed
from .capacity import Capacity, CriteriaSet

_COLUMN_SUM_TOL = 1e-6


def _profile(values: Sequence[float] | Mapping[str, float], criteria: CriteriaSet) -> list[float]:
    if isinstance(values, Mapping):
        missing = [name for name in criteria.names if name not in values]
        if missing:
            raise ValidationFailed(f"missing values for criteria: {missing}")
        extra = [name for name in values if name not in criteria.names]
        if extra:
            raise ValidationFailed(f"values given for unknown criteria: {extra}")
        xs = [float(values[name]) for name in criteria.names]
    else:
        xs = [float(v) for v in values]
        if len(xs) != criteria.n:
            raise ValidationFailed(f"expected {criteria.n} values, got {len(xs)}")
    for name, x in zip(criteria.names, xs):
        if not math.isfinite(x) or x < 0.0 or x > 1.0:
            raise DomainError(f"value for {name!r} is {x!r}, outside [0, 1]")
    return xs


def choquet(values: Sequence[float] | Mapping[str, float], cap: Capacity) -> float:
    """Choquet integral of per-criterion values (each in [0,1]) w.r.t. ``cap``.

    Sequence inputs are taken in criteria order; mappings are keyed by
    criterion name.
    """
    xs = _profile(values, cap.criteria)
    order = sorted(range(len(xs)), key=lambda i: (xs[i], i))
    mask = (1 << len(xs)) - 1
    total = 0.0
    prev = 0.0
    for idx in order:
        total += (xs[idx] - prev) * cap.values[mask]
        prev = xs[idx]
        mask &= ~(1 << idx)
    return total


@dataclass(frozen=True)
class EvaluationTable:
    """Local priorities of k alternatives on n criteria.

    Each column is a priority vector over the alternatives, so every column
    must sum to 1 (within 1e-6) and all entries lie in [0,1].
    """

    criteria: CriteriaSet
    alternatives: tuple[str, ...]
    rows: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        alts = tuple(str(a) for a in self.alternatives)
        if not alts:
            raise ValidationFailed("evaluation table must have at least one alternative")
        if len(set(alts)) != len(alts):
            raise ValidationFailed("alternative identifiers must be unique")
        rows = tuple(tuple(float(x) for x in row) for row in self.rows)
        if len(rows) != len(alts):
            raise ValidationFailed(f"expected {len(alts)} rows, got {len(rows)}")
        n = self.criteria.n
        for alt, row in zip(alts, rows):
            if len(row) != n:
                raise ValidationFailed(f"row for {alt!r} has {len(row)} entries, expected {n}")
            for name, x in zip(self.criteria.names, row):
                if not math.isfinite(x) or x < 0.0 or x > 1.0:
                    raise ValidationFailed(f"local priority of {alt!r} on {name!r} is {x!r}, outside [0, 1]")
        for j, name in enumerate(self.criteria.names):
            col_sum = sum(row[j] for row in rows)
            if abs(col_sum - 1.0) > _COLUMN_SUM_TOL:
                raise ValidationFailed(f"column {name!r} sums to {col_sum!r}, expected 1 within {_COLUMN_SUM_TOL}")
        object.__setattr__(self, "alternatives", alts)
        object.__setattr__(self, "rows", rows)

    @property
    def k(self) -> int:
        return len(self.alternatives)

    def row(self, alternative: str) -> tuple[float, ...]:
        try:
            return self.rows[self.alternatives.index(alternative)]
        except ValueError:
            raise ValidationFailed(f"unknown alternative {alternative!r}") from None


@dataclass(frozen=True)
class ScoredAlternative:
    """One ranked alternative; rank 1 is best."""

    alternative: str
    score: float
    rank: int


def rank_alternatives(table: EvaluationTable, cap: Capacity) -> list[ScoredAlternative]:
    """Score every row with the Choquet integral and rank descending.

    Ties are broken by alternative identifier ascending, so the ranking is
    deterministic for any input.
    """
    if cap.criteria.names != table.criteria.names:
        raise ValidationFailed(
            f"criteria mismatch: table has {list(table.criteria.names)}, capacity has {list(cap.criteria.names)}"
        )
    scored = [(alt, choquet(row, cap)) for alt, row in zip(table.alternatives, table.rows)]
    ordering = sorted(scored, key=lambda item: (-item[1], item[0]))
    rank_of = {alt: pos + 1 for pos, (alt, _) in enumerate(ordering)}
    return [ScoredAlternative(alt, score, rank_of[alt]) for alt, score in scored]
