"""Capacity identification from a scored evaluation table.

Finds a monotone normalized capacity whose Choquet scores come as close as
possible (in the max norm) to caller-supplied target scores. Because the
sort order of each row is fixed by its values, each row's Choquet score is
linear in the subset values, so the least-max-deviation problem is a linear
program; it is solved exactly and the result is then snapped to the reporting
resolution (rounding every subset value is monotone, so the snapped capacity
stays valid).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import linprog

from ..errors import CplanError, ValidationFailed
from .capacity import Capacity
from .choquet import EvaluationTable, choquet

DEFAULT_RESOLUTION = 0.001
DEFAULT_TOLERANCE = 0.005


@dataclass(frozen=True)
class CapacityFit:
    """Best capacity found and its max absolute score deviation."""

    capacity: Capacity
    max_deviation: float

    def feasible(self, tolerance: float = DEFAULT_TOLERANCE) -> bool:
        return self.max_deviation <= tolerance


def fit_capacity(
    table: EvaluationTable,
    targets: Sequence[float],
    *,
    resolution: float = DEFAULT_RESOLUTION,
) -> CapacityFit:
    """Search monotone normalized capacities minimizing max |score - target|.

    Always returns the best capacity found; callers decide feasibility by
    comparing ``max_deviation`` against their own tolerance. Subset values in
    the result are quantized to ``resolution``.
    """
    ys = [float(t) for t in targets]
    if len(ys) != table.k:
        raise ValidationFailed(f"expected {table.k} target scores, got {len(ys)}")
    for alt, y in zip(table.alternatives, ys):
        if not 0.0 <= y <= 1.0:
            raise ValidationFailed(f"target score for {alt!r} is {y!r}, outside [0, 1]")
    if resolution <= 0:
        raise ValidationFailed(f"resolution must be positive, got {resolution!r}")

    n = table.criteria.n
    full = (1 << n) - 1
    # Decision variables: one per proper non-empty subset, plus the deviation bound t.
    var_masks = [mask for mask in range(1, full)]
    var_index = {mask: i for i, mask in enumerate(var_masks)}
    n_vars = len(var_masks) + 1
    t_idx = n_vars - 1

    a_ub: list[list[float]] = []
    b_ub: list[float] = []

    for row, y in zip(table.rows, ys):
        coeffs = np.zeros(n_vars)
        constant = 0.0
        order = sorted(range(n), key=lambda i: (row[i], i))
        mask = full
        prev = 0.0
        for idx in order:
            inc = row[idx] - prev
            if mask == full:
                constant += inc  # value of the full set is fixed at 1
            else:
                coeffs[var_index[mask]] += inc
            prev = row[idx]
            mask &= ~(1 << idx)
        # constant + coeffs . mu - y <= t   and   y - constant - coeffs . mu <= t
        upper = coeffs.copy()
        upper[t_idx] = -1.0
        a_ub.append(upper.tolist())
        b_ub.append(y - constant)
        lower = -coeffs
        lower[t_idx] = -1.0
        a_ub.append(lower.tolist())
        b_ub.append(constant - y)

    # Monotonicity between proper subsets differing by one element; boundary
    # constraints against the empty and full sets are covered by the variable
    # bounds 0 <= mu <= 1.
    for mask in var_masks:
        for i in range(n):
            bit = 1 << i
            if mask & bit:
                sub = mask & ~bit
                if sub == 0:
                    continue
                constraint = np.zeros(n_vars)
                constraint[var_index[sub]] = 1.0
                constraint[var_index[mask]] = -1.0
                a_ub.append(constraint.tolist())
                b_ub.append(0.0)

    cost = np.zeros(n_vars)
    cost[t_idx] = 1.0
    bounds = [(0.0, 1.0)] * len(var_masks) + [(0.0, None)]
    result = linprog(cost, A_ub=np.array(a_ub), b_ub=np.array(b_ub), bounds=bounds, method="highs")
    if not result.success:  # pragma: no cover - the uniform additive capacity is always feasible
        raise CplanError(f"capacity fit failed: {result.message}")

    values = [0.0] * (full + 1)
    values[full] = 1.0
    for mask in var_masks:
        raw = float(result.x[var_index[mask]])
        snapped = round(raw / resolution) * resolution
        values[mask] = min(max(snapped, 0.0), 1.0)
    capacity = Capacity(table.criteria, tuple(values))
    deviation = max(abs(choquet(row, capacity) - y) for row, y in zip(table.rows, ys))
    return CapacityFit(capacity=capacity, max_deviation=deviation)
