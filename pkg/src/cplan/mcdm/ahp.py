"""Pairwise comparison matrices and AHP priority vectors.

Weights are derived from a positive reciprocal judgment matrix with the
principal-eigenvector method (power iteration); the row geometric mean is
available both as an explicit alternative and as the fallback when the
iteration fails to converge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, ValidationFailed

# Saaty random consistency indices for n = 1..9.
RANDOM_INDEX = {1: 0.0, 2: 0.0, 3: 0.58, 4: 0.90, 5: 1.12, 6: 1.24, 7: 1.32, 8: 1.41, 9: 1.45}

# Conventional acceptability limit for the consistency ratio. Values above
# produce a warning, never a hard error: judgment quality is policed by the
# revision loop, not by this engine.
CR_WARNING_LIMIT = 0.10

POWER_ITERATION_TOL = 1e-10
POWER_ITERATION_CAP = 10_000

_RECIPROCITY_TOL = 1e-9


@dataclass(frozen=True)
class PairwiseMatrix:
    """Square matrix of positive judgment ratios.

    ``label`` names what is being compared (criteria over the goal, or
    alternatives over one criterion). Construction only enforces shape and
    finiteness; invariant violations are reported by :func:`validate_pairwise`
    so that in-progress judgments can be inspected before use.
    """

    values: tuple[tuple[float, ...], ...]
    label: str = ""

    def __post_init__(self) -> None:
        try:
            rows = tuple(tuple(float(x) for x in row) for row in self.values)
        except (TypeError, ValueError) as exc:
            raise ValidationFailed(f"pairwise matrix entries must be numbers: {exc}") from exc
        if not rows:
            raise ValidationFailed("pairwise matrix must not be empty")
        n = len(rows)
        for i, row in enumerate(rows):
            if len(row) != n:
                raise ValidationFailed(
                    f"pairwise matrix must be square; row {i + 1} has {len(row)} entries, expected {n}"
                )
        if any(not math.isfinite(x) for row in rows for x in row):
            raise ValidationFailed("pairwise matrix entries must be finite")
        object.__setattr__(self, "values", rows)

    @property
    def n(self) -> int:
        return len(self.values)

    def as_array(self) -> np.ndarray:
        return np.array(self.values, dtype=float)


@dataclass(frozen=True)
class MatrixIssue:
    """One invariant violation found in a pairwise matrix (1-based positions)."""

    kind: str  # "diagonal" | "positivity" | "reciprocity"
    row: int
    col: int
    message: str


def validate_pairwise(m: PairwiseMatrix) -> list[MatrixIssue]:
    """Report diagonal, positivity and reciprocity violations.

    An empty report means the matrix satisfies all invariants: unit diagonal,
    strictly positive entries, and a[i][j] * a[j][i] = 1 within 1e-9.
    Reciprocity violations are reported once, at the lower-triangle position.
    """
    issues: list[MatrixIssue] = []
    a = m.values
    n = m.n
    for i in range(n):
        if abs(a[i][i] - 1.0) > _RECIPROCITY_TOL:
            issues.append(
                MatrixIssue("diagonal", i + 1, i + 1, f"diagonal entry ({i + 1},{i + 1}) is {a[i][i]!r}, expected 1")
            )
    for i in range(n):
        for j in range(n):
            if a[i][j] <= 0.0:
                issues.append(
                    MatrixIssue("positivity", i + 1, j + 1, f"entry ({i + 1},{j + 1}) is {a[i][j]!r}, expected > 0")
                )
    for i in range(n):
        for j in range(i + 1, n):
            if a[i][j] > 0.0 and a[j][i] > 0.0 and abs(a[i][j] * a[j][i] - 1.0) > _RECIPROCITY_TOL:
                issues.append(
                    MatrixIssue(
                        "reciprocity",
                        j + 1,
                        i + 1,
                        f"entries ({i + 1},{j + 1}) and ({j + 1},{i + 1}) multiply to {a[i][j] * a[j][i]!r}, expected 1",
                    )
                )
    return issues


def require_valid(m: PairwiseMatrix) -> None:
    issues = validate_pairwise(m)
    if issues:
        raise ValidationFailed(
            f"pairwise matrix {m.label or '(unlabeled)'} violates invariants",
            details=[f"{it.kind} at ({it.row},{it.col}): {it.message}" for it in issues],
        )


def saaty_scale_violations(m: PairwiseMatrix) -> list[tuple[int, int, float]]:
    """Off-diagonal entries outside the 1/9..9 judgment scale (1-based positions).

    The library accepts any positive reciprocal matrix (revision may produce
    intermediate values); callers surface these as warnings only.
    """
    out: list[tuple[int, int, float]] = []
    for i in range(m.n):
        for j in range(m.n):
            if i == j:
                continue
            v = m.values[i][j]
            if v < 1.0 / 9.0 - 1e-12 or v > 9.0 + 1e-12:
                out.append((i + 1, j + 1, v))
    return out


@dataclass(frozen=True)
class PriorityVector:
    """Non-negative weights summing to one.

    ``method`` records how the vector was obtained ("power_iteration",
    "geometric_mean" or "geometric_mean_fallback" when the eigenvector
    iteration did not converge).
    """

    weights: tuple[float, ...]
    method: str = "power_iteration"

    def __post_init__(self) -> None:
        w = tuple(float(x) for x in self.weights)
        if not w:
            raise ValidationFailed("priority vector must not be empty")
        if any(x < -1e-12 or not math.isfinite(x) for x in w):
            raise ValidationFailed("priority vector components must be non-negative")
        w = tuple(max(x, 0.0) for x in w)
        if abs(sum(w) - 1.0) > 1e-9:
            raise ValidationFailed(f"priority vector components sum to {sum(w)!r}, expected 1")
        object.__setattr__(self, "weights", w)

    @property
    def n(self) -> int:
        return len(self.weights)


def priority_vector_geometric(m: PairwiseMatrix, *, method: str = "geometric_mean") -> PriorityVector:
    """Row-geometric-mean weights (the logarithmic least squares variant)."""
    require_valid(m)
    a = m.as_array()
    gm = np.exp(np.log(a).mean(axis=1))
    w = gm / gm.sum()
    return PriorityVector(tuple(w.tolist()), method=method)


def priority_vector(
    m: PairwiseMatrix,
    *,
    tol: float = POWER_ITERATION_TOL,
    max_iterations: int = POWER_ITERATION_CAP,
) -> PriorityVector:
    """Normalized principal-eigenvector weights of a valid pairwise matrix.

    Power iteration on the positive matrix converges to the Perron vector;
    convergence is declared when successive normalized iterates differ by at
    most ``tol`` in the max norm. If the iteration cap is reached the row
    geometric mean is returned instead, flagged via ``method``.
    """
    require_valid(m)
    a = m.as_array()
    n = m.n
    if n == 1:
        return PriorityVector((1.0,))
    w = np.full(n, 1.0 / n)
    for _ in range(max_iterations):
        v = a @ w
        w_next = v / v.sum()
        if np.max(np.abs(w_next - w)) < tol:
            return PriorityVector(tuple(w_next.tolist()))
        w = w_next
    return priority_vector_geometric(m, method="geometric_mean_fallback")


def principal_eigenvalue(m: PairwiseMatrix, w: PriorityVector | None = None) -> float:
    """Estimate of the dominant eigenvalue from the weight vector (Saaty's lambda-max)."""
    if w is None:
        w = priority_vector(m)
    a = m.as_array()
    wv = np.array(w.weights)
    return float(np.mean((a @ wv) / wv))


def consistency_ratio(m: PairwiseMatrix) -> float:
    """CR = ((lambda_max - n) / (n - 1)) / RI(n); zero for n <= 2.

    Matrices larger than 9 are outside the random-index table and rejected.
    Tiny negative values from floating point are clamped to zero.
    """
    require_valid(m)
    n = m.n
    if n > 9:
        raise DomainError(f"consistency ratio is unsupported for n={n}; the random-index table covers n <= 9")
    if n <= 2:
        return 0.0
    lam = principal_eigenvalue(m)
    ci = (lam - n) / (n - 1)
    return max(ci / RANDOM_INDEX[n], 0.0)


def consistent_matrix(weights: tuple[float, ...] | list[float], label: str = "") -> PairwiseMatrix:
    """Build the perfectly consistent matrix with entries w[i] / w[j]."""
    w = [float(x) for x in weights]
    if any(x <= 0 for x in w):
        raise ValidationFailed("generating weights must be positive")
    rows = tuple(tuple(wi / wj for wj in w) for wi in w)
    return PairwiseMatrix(rows, label=label)
