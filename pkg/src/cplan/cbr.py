"""Case-based reasoning over process-quality situations.

A case pairs a quality situation (Cp, Cpk, internal and external
non-conformity rates) with the control scenario that was applied to it and
the outcome that was observed. Retrieval is a weighted Minkowski
nearest-neighbour search under a strict distance threshold; revision either
marks the case satisfactory, sends the decision maker back to manual
evaluation, or tightens the threshold after a failed automatic
recommendation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Iterator

from .errors import IntegrityError, ValidationFailed

DEFAULT_THRESHOLD = 10.0
DEFAULT_ORDER_P = 1.0
DEFAULT_REPAIR_DELTA = 0.05

ATTRIBUTES = ("cp", "cpk", "ncr", "encr")


def _check_indicators(kind: str, cp: float, cpk: float, ncr: float, encr: float) -> None:
    problems = []
    for name, v in zip(ATTRIBUTES, (cp, cpk, ncr, encr)):
        if not math.isfinite(v):
            problems.append(f"{name} must be finite, got {v!r}")
    if math.isfinite(cp) and cp < 0.0:
        problems.append(f"cp must be >= 0, got {cp!r}")
    for name, v in (("ncr", ncr), ("encr", encr)):
        if math.isfinite(v) and not 0.0 <= v <= 100.0:
            problems.append(f"{name} must be within 0..100 percentage points, got {v!r}")
    if problems:
        raise ValidationFailed(f"invalid {kind}", details=problems)


@dataclass(frozen=True)
class QualitySituation:
    """Four-indicator quality state of one (operation, characteristic) pair.

    ``ncr`` and ``encr`` are percentage points in 0..100. ``cpk`` may exceed
    ``cp`` without raising (entry noise is tolerated); :meth:`warnings`
    reports it.
    """

    cp: float
    cpk: float
    ncr: float
    encr: float

    def __post_init__(self) -> None:
        for name in ATTRIBUTES:
            object.__setattr__(self, name, float(getattr(self, name)))
        _check_indicators("quality situation", self.cp, self.cpk, self.ncr, self.encr)

    def warnings(self) -> list[str]:
        if self.cpk > self.cp:
            return [f"cpk ({self.cpk!r}) exceeds cp ({self.cp!r}); expected cpk <= cp"]
        return []

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.cp, self.cpk, self.ncr, self.encr)


@dataclass(frozen=True)
class Objectives:
    """Target indicator levels a selected scenario is expected to reach."""

    cp: float
    cpk: float
    ncr: float
    encr: float

    def __post_init__(self) -> None:
        for name in ATTRIBUTES:
            object.__setattr__(self, name, float(getattr(self, name)))
        _check_indicators("objectives", self.cp, self.cpk, self.ncr, self.encr)


class CaseOrigin(str, Enum):
    MANUAL = "manual"
    AUTOMATIC = "automatic"


class CaseStatus(str, Enum):
    PROVISIONAL = "provisional"
    SATISFACTORY = "satisfactory"
    FAILED = "failed"


@dataclass(frozen=True)
class Case:
    """One problem/solution pair with its observed outcome.

    ``retrieval_distance`` records, for automatic-origin cases, how far the
    source case was when its solution was reused; threshold repair needs it.
    """

    id: int | None
    operation: str
    characteristic: str
    situation: QualitySituation
    scenario_id: str
    objectives: Objectives
    observed: QualitySituation | None = None
    origin: CaseOrigin = CaseOrigin.MANUAL
    status: CaseStatus = CaseStatus.PROVISIONAL
    retrieval_distance: float | None = None
    created_at: str = ""
    closed_at: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "origin", CaseOrigin(self.origin))
        object.__setattr__(self, "status", CaseStatus(self.status))
        if self.status in (CaseStatus.SATISFACTORY, CaseStatus.FAILED) and self.observed is None:
            raise ValidationFailed(f"case with status {self.status.value!r} must carry observed results")
        if self.retrieval_distance is not None and self.retrieval_distance < 0:
            raise ValidationFailed(f"retrieval distance must be >= 0, got {self.retrieval_distance!r}")


@dataclass(frozen=True)
class RetrievalConfig:
    """Similarity threshold, Minkowski exponent and per-attribute weights.

    Defaults (p=1, unit weights) make the distance the plain sum of absolute
    indicator differences. ``repair_delta`` is the relative margin used when
    a failed automatic recommendation tightens the threshold.
    """

    threshold: float = DEFAULT_THRESHOLD
    order_p: float = DEFAULT_ORDER_P
    attribute_weights: tuple[float, float, float, float] = (1.0, 1.0, 1.0, 1.0)
    repair_delta: float = DEFAULT_REPAIR_DELTA

    def __post_init__(self) -> None:
        object.__setattr__(self, "threshold", float(self.threshold))
        object.__setattr__(self, "order_p", float(self.order_p))
        object.__setattr__(self, "attribute_weights", tuple(float(w) for w in self.attribute_weights))
        object.__setattr__(self, "repair_delta", float(self.repair_delta))
        problems = []
        if not (math.isfinite(self.threshold) and self.threshold >= 0.0):
            problems.append(f"threshold must be >= 0, got {self.threshold!r}")
        if not (math.isfinite(self.order_p) and self.order_p >= 1.0):
            problems.append(f"order_p must be >= 1, got {self.order_p!r}")
        if len(self.attribute_weights) != 4:
            problems.append(f"expected 4 attribute weights, got {len(self.attribute_weights)}")
        elif any(not math.isfinite(w) or w < 0.0 for w in self.attribute_weights):
            problems.append("attribute weights must be non-negative")
        elif not any(w > 0.0 for w in self.attribute_weights):
            problems.append("at least one attribute weight must be positive")
        if not 0.0 < self.repair_delta < 1.0:
            problems.append(f"repair_delta must be in (0, 1), got {self.repair_delta!r}")
        if problems:
            raise ValidationFailed("invalid retrieval configuration", details=problems)


@dataclass(frozen=True)
class RetrievalResult:
    """The selected source case and its distance to the target situation."""

    case: Case
    distance: float


def distance(a: QualitySituation, b: QualitySituation, cfg: RetrievalConfig | None = None) -> float:
    """Weighted Minkowski distance over the four quality indicators.

    With the default config (p=1, unit weights) this is exactly
    |cp_a - cp_b| + |cpk_a - cpk_b| + |ncr_a - ncr_b| + |encr_a - encr_b|.
    """
    cfg = cfg or RetrievalConfig()
    diffs = [abs(x - y) for x, y in zip(a.as_tuple(), b.as_tuple())]
    if cfg.order_p == 1.0:
        return sum(w * d for w, d in zip(cfg.attribute_weights, diffs))
    total = sum(w * d**cfg.order_p for w, d in zip(cfg.attribute_weights, diffs))
    return total ** (1.0 / cfg.order_p)


class CaseBase:
    """Ordered collection of cases; ids strictly increase with retention order."""

    def __init__(self, cases: Iterable[Case] = ()):
        self._cases: list[Case] = []
        for case in cases:
            if case.id is None:
                raise IntegrityError("stored cases must have ids")
            if self._cases and case.id <= self._cases[-1].id:
                raise IntegrityError(
                    f"case ids must strictly increase; id {case.id} follows id {self._cases[-1].id}"
                )
            self._cases.append(case)

    def __len__(self) -> int:
        return len(self._cases)

    def __iter__(self) -> Iterator[Case]:
        return iter(self._cases)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, CaseBase) and self._cases == other._cases

    def get(self, case_id: int) -> Case | None:
        for case in self._cases:
            if case.id == case_id:
                return case
        return None

    def satisfactory(self) -> Iterator[Case]:
        return (c for c in self._cases if c.status is CaseStatus.SATISFACTORY)

    @property
    def next_id(self) -> int:
        return (self._cases[-1].id + 1) if self._cases else 1

    def retain(self, case: Case) -> Case:
        """Append a closed case, assigning the next id when none is given.

        Failed cases are kept for audit but never become retrievable. A
        pre-assigned id that duplicates or reorders existing ids is a storage
        integrity error.
        """
        if case.status not in (CaseStatus.SATISFACTORY, CaseStatus.FAILED):
            raise ValidationFailed(f"only satisfactory or failed cases can be retained, got {case.status.value!r}")
        if case.id is None:
            case = replace(case, id=self.next_id)
        elif self.get(case.id) is not None:
            raise IntegrityError(f"case id {case.id} already exists")
        elif self._cases and case.id < self.next_id:
            raise IntegrityError(f"case id {case.id} would break retention order; next id is {self.next_id}")
        self._cases.append(case)
        return case


def retain(base: CaseBase, case: Case) -> Case:
    """Module-level alias of :meth:`CaseBase.retain`."""
    return base.retain(case)


def retrieve(target: QualitySituation, base: CaseBase, cfg: RetrievalConfig | None = None) -> RetrievalResult | None:
    """Nearest satisfactory case, only if strictly closer than the threshold.

    Ties at equal distance resolve to the most recently retained case
    (largest id). Returns ``None`` when the base is empty or nothing passes;
    that is the normal routing to the manual path.
    """
    cfg = cfg or RetrievalConfig()
    best_case: Case | None = None
    best_distance = math.inf
    for case in base.satisfactory():
        d = distance(target, case.situation, cfg)
        if d < best_distance or (d == best_distance and best_case is not None and case.id > best_case.id):
            best_case = case
            best_distance = d
    if best_case is None or not best_distance < cfg.threshold:
        return None
    return RetrievalResult(case=best_case, distance=best_distance)


@dataclass(frozen=True)
class Recommendation:
    """Scenario reuse proposal carrying provenance to its source case."""

    scenario_id: str
    distance: float
    source_case_id: int


def adapt(result: RetrievalResult, base: CaseBase | None = None) -> Recommendation:
    """Reuse the source case's scenario unchanged for the target situation."""
    case = result.case
    if case.id is None:
        raise IntegrityError("retrieval result references a case without an id")
    if base is not None and base.get(case.id) is not case:
        raise IntegrityError(f"retrieval result references case {case.id}, which is not in the case base")
    return Recommendation(scenario_id=case.scenario_id, distance=result.distance, source_case_id=case.id)


class Outcome(str, Enum):
    SATISFACTORY = "satisfactory"
    UNSATISFACTORY = "unsatisfactory"


def evaluate_outcome(observed: QualitySituation, objectives: Objectives) -> Outcome:
    """Satisfactory iff every objective is reached (boundaries inclusive).

    Capability indicators must come up to their targets, non-conformity
    rates must come down to theirs; the comparison is conjunctive.
    """
    ok = (
        observed.cp >= objectives.cp
        and observed.cpk >= objectives.cpk
        and observed.ncr <= objectives.ncr
        and observed.encr <= objectives.encr
    )
    return Outcome.SATISFACTORY if ok else Outcome.UNSATISFACTORY


class RevisionKind(str, Enum):
    RETAIN_SATISFACTORY = "retain_satisfactory"
    REPAIR_MANUAL = "repair_manual"
    REPAIR_THRESHOLD = "repair_threshold"


@dataclass(frozen=True)
class RevisionAction:
    """What the workflow must do after comparing results with objectives."""

    kind: RevisionKind
    new_threshold: float | None = None


def revise(case: Case, outcome: Outcome, cfg: RetrievalConfig) -> RevisionAction:
    """Decide the follow-up for a case with observed results.

    Satisfactory outcomes retain the case. Unsatisfactory manual choices
    re-open judgment elicitation. Unsatisfactory automatic choices tighten
    the threshold to min(current, (1 - delta) * d_fail), so the threshold
    never increases and the failed distance is pushed out of range.
    """
    if case.observed is None:
        raise ValidationFailed("revision requires observed results on the case")
    if outcome is Outcome.SATISFACTORY:
        return RevisionAction(RevisionKind.RETAIN_SATISFACTORY)
    if case.origin is CaseOrigin.MANUAL:
        return RevisionAction(RevisionKind.REPAIR_MANUAL)
    if case.retrieval_distance is None:
        raise ValidationFailed("automatic-origin case lacks its retrieval distance; cannot repair the threshold")
    new_threshold = min(cfg.threshold, (1.0 - cfg.repair_delta) * case.retrieval_distance)
    return RevisionAction(RevisionKind.REPAIR_THRESHOLD, new_threshold=new_threshold)
