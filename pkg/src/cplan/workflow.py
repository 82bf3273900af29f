"""Decision sessions: an explicit state machine orchestrating retrieval,
manual multi-criteria evaluation, application and revision.

A session walks a fixed graph:

    Created -> SituationEntered -> {AutoRecommended, ManualRequired}
    AutoRecommended -> {ScenarioSelected, ManualRequired}
    ManualRequired -> ManualEvaluated -> {ScenarioSelected, ManualRequired}
    ScenarioSelected -> Applied -> ResultsRecorded -> Closed

Closing a session compares observed results with objectives, revises
(retention, threshold repair, or re-opened manual elicitation) and retains
the case. Closed sessions are immutable.
"""

from __future__ import annotations

import copy
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Callable, Iterable, Mapping, Sequence

from . import cbr, mcdm
from .cbr import (
    Case,
    CaseBase,
    CaseOrigin,
    CaseStatus,
    Objectives,
    Outcome,
    QualitySituation,
    Recommendation,
    RetrievalConfig,
    RevisionKind,
)
from .errors import IllegalTransition, IntegrityError, NotFoundError, ValidationFailed
from .mcdm import Capacity, CriteriaSet, EvaluationTable, PairwiseMatrix, ScoredAlternative


class SessionState(str, Enum):
    CREATED = "Created"
    SITUATION_ENTERED = "SituationEntered"
    AUTO_RECOMMENDED = "AutoRecommended"
    MANUAL_REQUIRED = "ManualRequired"
    MANUAL_EVALUATED = "ManualEvaluated"
    SCENARIO_SELECTED = "ScenarioSelected"
    APPLIED = "Applied"
    RESULTS_RECORDED = "ResultsRecorded"
    CLOSED = "Closed"


ALLOWED_EDGES: dict[SessionState, frozenset[SessionState]] = {
    SessionState.CREATED: frozenset({SessionState.SITUATION_ENTERED}),
    SessionState.SITUATION_ENTERED: frozenset({SessionState.AUTO_RECOMMENDED, SessionState.MANUAL_REQUIRED}),
    SessionState.AUTO_RECOMMENDED: frozenset({SessionState.SCENARIO_SELECTED, SessionState.MANUAL_REQUIRED}),
    SessionState.MANUAL_REQUIRED: frozenset({SessionState.MANUAL_EVALUATED}),
    SessionState.MANUAL_EVALUATED: frozenset({SessionState.SCENARIO_SELECTED, SessionState.MANUAL_REQUIRED}),
    SessionState.SCENARIO_SELECTED: frozenset({SessionState.APPLIED}),
    SessionState.APPLIED: frozenset({SessionState.RESULTS_RECORDED}),
    SessionState.RESULTS_RECORDED: frozenset({SessionState.CLOSED}),
    SessionState.CLOSED: frozenset(),
}


@dataclass
class ControlScenario:
    """One candidate control policy, e.g. a sampling plan."""

    id: str
    name: str
    description: str = ""
    parameters: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not str(self.id):
            raise ValidationFailed("scenario id must be non-empty")
        if not str(self.name):
            raise ValidationFailed("scenario name must be non-empty")


def default_catalog() -> list[ControlScenario]:
    """The four shipped scenarios; the catalog is fully editable at runtime."""
    return [
        ControlScenario("S1", "S1 (name unspecified in source)"),
        ControlScenario("S2", "Sampling control by measure (simple plan)"),
        ControlScenario("S3", "Sampling control by measure (double plan)"),
        ControlScenario("S4", "S4 (name unspecified in source)"),
    ]


@dataclass
class TransitionRecord:
    """One successful edge traversal in a session's audit trail."""

    from_state: SessionState
    to_state: SessionState
    op: str
    at: str
    details: dict[str, Any] = field(default_factory=dict)


@dataclass
class ManualEvaluation:
    """Artifacts of one manual multi-criteria evaluation pass."""

    capacity: Capacity
    table: EvaluationTable
    ranking: list[ScoredAlternative]
    matrices: dict[str, PairwiseMatrix] | None = None
    warnings: list[str] = field(default_factory=list)

    @property
    def best(self) -> str:
        for item in self.ranking:
            if item.rank == 1:
                return item.alternative
        raise IntegrityError("ranking has no rank-1 alternative")


@dataclass
class DecisionSession:
    """One pass through the decision flowchart, from situation entry to retention."""

    id: int
    operation: str = ""
    characteristic: str = ""
    state: SessionState = SessionState.CREATED
    situation: QualitySituation | None = None
    objectives: Objectives | None = None
    recommendation: Recommendation | None = None
    manual: ManualEvaluation | None = None
    selected_scenario: str | None = None
    selection_source: str | None = None  # "automatic" | "manual"
    observed: QualitySituation | None = None
    period_t: dict[str, Any] | None = None
    predecessor_id: int | None = None
    successor_id: int | None = None
    case_id: int | None = None
    transitions: list[TransitionRecord] = field(default_factory=list)
    created_at: str = ""
    closed_at: str | None = None


@dataclass
class AppState:
    """Everything the engine owns; the store persists exactly this."""

    case_base: CaseBase
    catalog: list[ControlScenario]
    config: RetrievalConfig
    criteria: CriteriaSet
    sessions: dict[int, DecisionSession] = field(default_factory=dict)
    next_session_id: int = 1

    def scenario(self, scenario_id: str) -> ControlScenario:
        for sc in self.catalog:
            if sc.id == scenario_id:
                return sc
        raise NotFoundError(f"scenario {scenario_id!r} is not in the catalog")

    def has_scenario(self, scenario_id: str) -> bool:
        return any(sc.id == scenario_id for sc in self.catalog)


def fresh_state() -> AppState:
    return AppState(
        case_base=CaseBase(),
        catalog=default_catalog(),
        config=RetrievalConfig(),
        criteria=mcdm.DEFAULT_CRITERIA,
    )


@dataclass(frozen=True)
class CloseReport:
    """Outcome of closing a session: revision verdict and applied side effects."""

    session_id: int
    outcome: Outcome
    case_id: int
    case_status: CaseStatus
    threshold_change: tuple[float, float] | None = None
    successor_id: int | None = None


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat()


class DecisionEngine:
    """Single-writer facade over the application state.

    ``persistence`` (optional) must expose ``commit(state, events)`` where
    ``events`` is a list of audit-event dicts; audit lines are made durable
    before the state files are rewritten and before the operation reports
    success. On persistence failure the in-memory state is rolled back, so a
    failed operation leaves no half-applied transition.
    """

    def __init__(self, persistence=None, *, state: AppState | None = None, clock: Callable[[], str] = _utc_now):
        self.persistence = persistence
        self.clock = clock
        if state is None:
            state = persistence.load() if persistence is not None else fresh_state()
        self.state = state

    # -- plumbing ---------------------------------------------------------

    def _mutate(self, fn):
        snapshot = copy.deepcopy(self.state)
        try:
            result, events = fn()
            if self.persistence is not None:
                self.persistence.commit(self.state, events)
            return result
        except BaseException:
            self.state = snapshot
            raise

    def _event(self, kind: str, session_id: int | None, before: Any, after: Any, **details: Any) -> dict[str, Any]:
        return {
            "at": self.clock(),
            "session_id": session_id,
            "kind": kind,
            "before": before,
            "after": after,
            "details": details,
        }

    def session(self, session_id: int) -> DecisionSession:
        try:
            return self.state.sessions[int(session_id)]
        except (KeyError, ValueError, TypeError):
            raise NotFoundError(f"session {session_id!r} does not exist") from None

    def _guard(self, session: DecisionSession, op: str, *allowed: SessionState) -> None:
        if session.state not in allowed:
            raise IllegalTransition(
                f"cannot {op} in state {session.state.value}; allowed in {[s.value for s in allowed]}"
            )

    def _step(self, session: DecisionSession, to_state: SessionState, op: str, **details: Any) -> dict[str, Any]:
        if to_state not in ALLOWED_EDGES[session.state]:
            raise IllegalTransition(f"no edge {session.state.value} -> {to_state.value}")
        record = TransitionRecord(session.state, to_state, op, self.clock(), dict(details))
        event = self._event("transition", session.id, session.state.value, to_state.value, op=op, **details)
        session.transitions.append(record)
        session.state = to_state
        return event

    # -- session lifecycle -------------------------------------------------

    def create_session(self, operation: str = "", characteristic: str = "") -> DecisionSession:
        def run():
            session = DecisionSession(
                id=self.state.next_session_id,
                operation=str(operation),
                characteristic=str(characteristic),
                created_at=self.clock(),
            )
            self.state.sessions[session.id] = session
            self.state.next_session_id += 1
            events = [self._event("transition", session.id, None, SessionState.CREATED.value, op="create_session")]
            return session, events

        return self._mutate(run)

    def submit_situation(
        self,
        session_id: int,
        situation: QualitySituation,
        objectives: Objectives,
        *,
        operation: str | None = None,
        characteristic: str | None = None,
    ) -> DecisionSession:
        """Enter the quality situation; route to an automatic recommendation
        when a satisfactory case lies strictly within the threshold, to the
        manual path otherwise."""
        session = self.session(session_id)
        self._guard(session, "submit a situation", SessionState.CREATED)

        def run():
            if operation is not None:
                session.operation = str(operation)
            if characteristic is not None:
                session.characteristic = str(characteristic)
            session.situation = situation
            session.objectives = objectives
            events = [self._step(session, SessionState.SITUATION_ENTERED, "submit_situation")]
            hit = cbr.retrieve(situation, self.state.case_base, self.state.config)
            if hit is not None:
                recommendation = cbr.adapt(hit, self.state.case_base)
                session.recommendation = recommendation
                events.append(
                    self._step(
                        session,
                        SessionState.AUTO_RECOMMENDED,
                        "recommend",
                        scenario=recommendation.scenario_id,
                        distance=recommendation.distance,
                        source_case=recommendation.source_case_id,
                    )
                )
                events.append(
                    self._event(
                        "recommendation",
                        session.id,
                        None,
                        recommendation.scenario_id,
                        distance=recommendation.distance,
                        source_case=recommendation.source_case_id,
                        threshold=self.state.config.threshold,
                    )
                )
            else:
                events.append(self._step(session, SessionState.MANUAL_REQUIRED, "route_manual", reason="no similar case"))
            return session, events

        return self._mutate(run)

    def accept_recommendation(self, session_id: int) -> DecisionSession:
        session = self.session(session_id)
        self._guard(session, "accept a recommendation", SessionState.AUTO_RECOMMENDED)

        def run():
            recommendation = session.recommendation
            session.selected_scenario = recommendation.scenario_id
            session.selection_source = "automatic"
            events = [
                self._step(
                    session,
                    SessionState.SCENARIO_SELECTED,
                    "accept_recommendation",
                    scenario=recommendation.scenario_id,
                    source_case=recommendation.source_case_id,
                )
            ]
            return session, events

        return self._mutate(run)

    def reject_recommendation(self, session_id: int) -> DecisionSession:
        """Decline the automatic proposal and fall back to the manual path.

        The recommendation stays on the session and in the audit trail; the
        threshold is not touched (only post-application failures adjust it).
        """
        session = self.session(session_id)
        self._guard(session, "reject a recommendation", SessionState.AUTO_RECOMMENDED)

        def run():
            recommendation = session.recommendation
            events = [
                self._step(
                    session,
                    SessionState.MANUAL_REQUIRED,
                    "reject_recommendation",
                    rejected_scenario=recommendation.scenario_id,
                    distance=recommendation.distance,
                    source_case=recommendation.source_case_id,
                )
            ]
            return session, events

        return self._mutate(run)

    def manual_evaluate(
        self,
        session_id: int,
        capacity: Capacity,
        *,
        matrices: Mapping[str, PairwiseMatrix] | None = None,
        table: EvaluationTable | None = None,
    ) -> ManualEvaluation:
        """Run the manual multi-criteria evaluation.

        Either per-criterion pairwise matrices over the catalog alternatives
        or a ready evaluation table must be supplied. Re-evaluation from
        ManualEvaluated is allowed and recorded as a re-opened manual choice.
        """
        session = self.session(session_id)
        self._guard(session, "evaluate manually", SessionState.MANUAL_REQUIRED, SessionState.MANUAL_EVALUATED)
        if (matrices is None) == (table is None):
            raise ValidationFailed("provide either pairwise matrices or an evaluation table, not both")
        if capacity.criteria.names != self.state.criteria.names:
            raise ValidationFailed(
                f"capacity criteria {list(capacity.criteria.names)} do not match {list(self.state.criteria.names)}"
            )

        warnings: list[str] = []
        if table is None:
            table = self._table_from_matrices(matrices, warnings)
        else:
            if table.criteria.names != self.state.criteria.names:
                raise ValidationFailed(
                    f"table criteria {list(table.criteria.names)} do not match {list(self.state.criteria.names)}"
                )
            for alt in table.alternatives:
                if not self.state.has_scenario(alt):
                    raise NotFoundError(f"evaluation table references scenario {alt!r}, not in the catalog")
        ranking = mcdm.rank_alternatives(table, capacity)
        evaluation = ManualEvaluation(
            capacity=capacity,
            table=table,
            ranking=ranking,
            matrices=dict(matrices) if matrices is not None else None,
            warnings=warnings,
        )

        def run():
            events = []
            if session.state is SessionState.MANUAL_EVALUATED:
                events.append(self._step(session, SessionState.MANUAL_REQUIRED, "reopen_manual"))
            session.manual = evaluation
            events.append(
                self._step(
                    session,
                    SessionState.MANUAL_EVALUATED,
                    "manual_evaluate",
                    best=evaluation.best,
                    warnings=list(evaluation.warnings),
                )
            )
            return evaluation, events

        return self._mutate(run)

    def _table_from_matrices(self, matrices: Mapping[str, PairwiseMatrix], warnings: list[str]) -> EvaluationTable:
        criteria = self.state.criteria
        alternatives = [sc.id for sc in self.state.catalog]
        missing = [name for name in criteria.names if name not in matrices]
        if missing:
            raise ValidationFailed(f"missing pairwise matrices for criteria: {missing}")
        extra = [name for name in matrices if name not in criteria.names]
        if extra:
            raise ValidationFailed(f"pairwise matrices given for unknown criteria: {extra}")
        columns: dict[str, tuple[float, ...]] = {}
        for name in criteria.names:
            matrix = matrices[name]
            if matrix.n != len(alternatives):
                raise ValidationFailed(
                    f"matrix for {name!r} is {matrix.n}x{matrix.n}; expected one row per catalog scenario "
                    f"({len(alternatives)})"
                )
            vector = mcdm.priority_vector(matrix)
            if vector.method != "power_iteration":
                warnings.append(f"criterion {name!r}: eigenvector iteration did not converge; used {vector.method}")
            try:
                cr = mcdm.consistency_ratio(matrix)
                if cr > mcdm.CR_WARNING_LIMIT:
                    warnings.append(
                        f"criterion {name!r}: consistency ratio {cr:.3f} exceeds {mcdm.CR_WARNING_LIMIT}"
                    )
            except Exception:
                warnings.append(f"criterion {name!r}: consistency ratio unavailable for n={matrix.n}")
            for i, j, value in mcdm.saaty_scale_violations(matrix):
                warnings.append(f"criterion {name!r}: entry ({i},{j})={value!r} is outside the 1/9..9 scale")
            columns[name] = vector.weights
        rows = tuple(
            tuple(columns[name][k] for name in criteria.names) for k in range(len(alternatives))
        )
        return EvaluationTable(criteria=criteria, alternatives=tuple(alternatives), rows=rows)

    def confirm_selection(self, session_id: int, scenario_id: str) -> DecisionSession:
        session = self.session(session_id)
        self._guard(session, "confirm a selection", SessionState.MANUAL_EVALUATED)
        scenario = self.state.scenario(scenario_id)

        def run():
            session.selected_scenario = scenario.id
            session.selection_source = "manual"
            events = [self._step(session, SessionState.SCENARIO_SELECTED, "confirm_selection", scenario=scenario.id)]
            return session, events

        return self._mutate(run)

    def apply_scenario(self, session_id: int, period_t: Mapping[str, Any] | None = None) -> DecisionSession:
        """Mark the selected scenario as applied in the process.

        ``period_t`` is opaque metadata (a duration and a free-text basis);
        the engine never schedules anything, results arrive explicitly.
        """
        session = self.session(session_id)
        self._guard(session, "apply the scenario", SessionState.SCENARIO_SELECTED)

        def run():
            session.period_t = dict(period_t) if period_t is not None else None
            events = [
                self._step(session, SessionState.APPLIED, "apply", scenario=session.selected_scenario,
                           period_t=session.period_t)
            ]
            return session, events

        return self._mutate(run)

    def record_results(self, session_id: int, observed: QualitySituation) -> DecisionSession:
        session = self.session(session_id)
        self._guard(session, "record results", SessionState.APPLIED)

        def run():
            session.observed = observed
            events = [self._step(session, SessionState.RESULTS_RECORDED, "record_results", recorded_at=self.clock())]
            return session, events

        return self._mutate(run)

    def close_session(self, session_id: int) -> CloseReport:
        """Evaluate the outcome, revise, retain the case and freeze the session."""
        session = self.session(session_id)
        self._guard(session, "close the session", SessionState.RESULTS_RECORDED)

        def run():
            outcome = cbr.evaluate_outcome(session.observed, session.objectives)
            origin = CaseOrigin.AUTOMATIC if session.selection_source == "automatic" else CaseOrigin.MANUAL
            status = CaseStatus.SATISFACTORY if outcome is Outcome.SATISFACTORY else CaseStatus.FAILED
            now = self.clock()
            case = Case(
                id=None,
                operation=session.operation,
                characteristic=session.characteristic,
                situation=session.situation,
                scenario_id=session.selected_scenario,
                objectives=session.objectives,
                observed=session.observed,
                origin=origin,
                status=status,
                retrieval_distance=session.recommendation.distance if origin is CaseOrigin.AUTOMATIC else None,
                created_at=now,
                closed_at=now,
            )
            action = cbr.revise(case, outcome, self.state.config)

            events: list[dict[str, Any]] = []
            threshold_change: tuple[float, float] | None = None
            successor_id: int | None = None
            if action.kind is RevisionKind.REPAIR_THRESHOLD:
                old = self.state.config.threshold
                self.state.config = replace(self.state.config, threshold=action.new_threshold)
                threshold_change = (old, action.new_threshold)
                events.append(
                    self._event(
                        "threshold-change",
                        session.id,
                        old,
                        action.new_threshold,
                        failed_distance=case.retrieval_distance,
                        delta=self.state.config.repair_delta,
                    )
                )
            elif action.kind is RevisionKind.REPAIR_MANUAL:
                successor = DecisionSession(
                    id=self.state.next_session_id,
                    operation=session.operation,
                    characteristic=session.characteristic,
                    situation=session.situation,
                    objectives=session.objectives,
                    manual=copy.deepcopy(session.manual),
                    predecessor_id=session.id,
                    created_at=now,
                )
                self.state.sessions[successor.id] = successor
                self.state.next_session_id += 1
                events.append(
                    self._event("transition", successor.id, None, SessionState.CREATED.value, op="open_repair_session")
                )
                events.append(self._step(successor, SessionState.SITUATION_ENTERED, "inherit_situation"))
                events.append(
                    self._step(successor, SessionState.MANUAL_REQUIRED, "manual_repair", predecessor=session.id)
                )
                session.successor_id = successor.id
                successor_id = successor.id

            retained = self.state.case_base.retain(case)
            session.case_id = retained.id
            events.append(self._step(session, SessionState.CLOSED, "close_session", case=retained.id))
            session.closed_at = now
            events.append(
                self._event(
                    "revision",
                    session.id,
                    None,
                    action.kind.value,
                    outcome=outcome.value,
                    case=retained.id,
                    threshold_change=list(threshold_change) if threshold_change else None,
                    successor=successor_id,
                )
            )
            report = CloseReport(
                session_id=session.id,
                outcome=outcome,
                case_id=retained.id,
                case_status=status,
                threshold_change=threshold_change,
                successor_id=successor_id,
            )
            return report, events

        return self._mutate(run)

    # -- catalog, configuration, cases --------------------------------------

    def recommend_once(self, situation: QualitySituation, threshold: float | None = None) -> Recommendation | None:
        """One-shot retrieval outside any session (read-only)."""
        cfg = self.state.config if threshold is None else replace(self.state.config, threshold=threshold)
        hit = cbr.retrieve(situation, self.state.case_base, cfg)
        if hit is None:
            return None
        return cbr.adapt(hit, self.state.case_base)

    def import_case(self, case: Case) -> Case:
        """Retain an externally supplied case (seeding, migration)."""

        def run():
            retained = self.state.case_base.retain(case)
            events = [
                self._event("revision", None, None, "import_case", case=retained.id, status=retained.status.value)
            ]
            return retained, events

        return self._mutate(run)

    def set_config(self, config: RetrievalConfig) -> RetrievalConfig:
        def run():
            old = self.state.config
            self.state.config = config
            events = []
            if old != config:
                events.append(
                    self._event(
                        "threshold-change",
                        None,
                        {"threshold": old.threshold, "order_p": old.order_p,
                         "attribute_weights": list(old.attribute_weights), "repair_delta": old.repair_delta},
                        {"threshold": config.threshold, "order_p": config.order_p,
                         "attribute_weights": list(config.attribute_weights), "repair_delta": config.repair_delta},
                        op="set_config",
                    )
                )
            return config, events

        return self._mutate(run)

    def add_scenario(self, scenario: ControlScenario) -> ControlScenario:
        def run():
            if self.state.has_scenario(scenario.id):
                raise IntegrityError(f"scenario {scenario.id!r} already exists")
            self.state.catalog.append(scenario)
            return scenario, []

        return self._mutate(run)

    def replace_catalog(self, scenarios: Sequence[ControlScenario]) -> list[ControlScenario]:
        def run():
            items = list(scenarios)
            if not items:
                raise ValidationFailed("catalog must contain at least one scenario")
            ids = [sc.id for sc in items]
            if len(set(ids)) != len(ids):
                raise ValidationFailed("scenario ids must be unique")
            self.state.catalog = items
            return items, []

        return self._mutate(run)

    def import_cases(self, cases: Iterable[Case]) -> list[Case]:
        def run():
            retained = [self.state.case_base.retain(c) for c in cases]
            events = [
                self._event("revision", None, None, "import_case", case=c.id, status=c.status.value)
                for c in retained
            ]
            return retained, events

        return self._mutate(run)
