"""File-backed persistence: four JSON documents plus an append-only audit log.

Layout under the data directory (env ``CPLAN_DATA_DIR``, flag ``--data-dir``;
the flag wins):

    cases.json      retained cases
    scenarios.json  control-scenario catalog
    config.json     retrieval configuration and the criteria set
    sessions.json   decision sessions (full audit trail per session)
    audit.ndjson    append-only audit events, one JSON object per line

Every ``*.json`` document is wrapped in an envelope ``{"schema_version": 1,
"payload": ...}``; unknown versions refuse to load. Writes go to a temporary
file followed by an atomic rename; leftover temporaries from interrupted
writes are ignored and reported. Audit lines are made durable before state
files are rewritten; on recovery the state files are authoritative and the
audit log is advisory.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping

from .cbr import Case, CaseBase, Objectives, QualitySituation, Recommendation, RetrievalConfig
from .errors import StoreError, UnsupportedVersion, ValidationFailed
from .mcdm import (
    Capacity,
    CriteriaSet,
    EvaluationTable,
    MobiusRepresentation,
    PairwiseMatrix,
    ScoredAlternative,
    zeta,
)
from .workflow import (
    AppState,
    ControlScenario,
    DecisionSession,
    ManualEvaluation,
    SessionState,
    TransitionRecord,
    fresh_state,
)

SCHEMA_VERSION = 1

CASES_FILE = "cases.json"
SCENARIOS_FILE = "scenarios.json"
CONFIG_FILE = "config.json"
SESSIONS_FILE = "sessions.json"
AUDIT_FILE = "audit.ndjson"
LOCK_FILE = ".lock"

DEFAULT_DATA_DIR = "data"


def resolve_data_dir(flag_value: str | os.PathLike | None = None) -> Path:
    """Data directory from the flag, else ``CPLAN_DATA_DIR``, else ``./data``."""
    if flag_value:
        return Path(flag_value)
    env = os.environ.get("CPLAN_DATA_DIR")
    if env:
        return Path(env)
    return Path(DEFAULT_DATA_DIR)


# -- document serializers ----------------------------------------------------


def situation_doc(s: QualitySituation | None) -> dict[str, float] | None:
    if s is None:
        return None
    return {"cp": s.cp, "cpk": s.cpk, "ncr": s.ncr, "encr": s.encr}


def situation_from(doc: Mapping[str, Any], what: str = "quality situation") -> QualitySituation:
    try:
        return QualitySituation(cp=doc["cp"], cpk=doc["cpk"], ncr=doc["ncr"], encr=doc["encr"])
    except (KeyError, TypeError) as exc:
        raise ValidationFailed(f"{what} requires numeric cp, cpk, ncr, encr fields: {exc!r}") from exc


def objectives_doc(o: Objectives | None) -> dict[str, float] | None:
    if o is None:
        return None
    return {"cp": o.cp, "cpk": o.cpk, "ncr": o.ncr, "encr": o.encr}


def objectives_from(doc: Mapping[str, Any]) -> Objectives:
    try:
        return Objectives(cp=doc["cp"], cpk=doc["cpk"], ncr=doc["ncr"], encr=doc["encr"])
    except (KeyError, TypeError) as exc:
        raise ValidationFailed(f"objectives require numeric cp, cpk, ncr, encr fields: {exc!r}") from exc


def case_doc(c: Case) -> dict[str, Any]:
    return {
        "id": c.id,
        "operation": c.operation,
        "characteristic": c.characteristic,
        "situation": situation_doc(c.situation),
        "scenario_id": c.scenario_id,
        "objectives": objectives_doc(c.objectives),
        "observed": situation_doc(c.observed),
        "origin": c.origin.value,
        "status": c.status.value,
        "retrieval_distance": c.retrieval_distance,
        "created_at": c.created_at,
        "closed_at": c.closed_at,
    }


def case_from(doc: Mapping[str, Any]) -> Case:
    return Case(
        id=doc.get("id"),
        operation=str(doc.get("operation", "")),
        characteristic=str(doc.get("characteristic", "")),
        situation=situation_from(doc["situation"]),
        scenario_id=str(doc["scenario_id"]),
        objectives=objectives_from(doc["objectives"]),
        observed=situation_from(doc["observed"], "observed results") if doc.get("observed") is not None else None,
        origin=doc.get("origin", "manual"),
        status=doc.get("status", "provisional"),
        retrieval_distance=doc.get("retrieval_distance"),
        created_at=str(doc.get("created_at", "")),
        closed_at=doc.get("closed_at"),
    )


def config_doc(cfg: RetrievalConfig) -> dict[str, Any]:
    return {
        "threshold": cfg.threshold,
        "order_p": cfg.order_p,
        "attribute_weights": list(cfg.attribute_weights),
        "repair_delta": cfg.repair_delta,
    }


def config_from(doc: Mapping[str, Any]) -> RetrievalConfig:
    base = RetrievalConfig()
    return RetrievalConfig(
        threshold=doc.get("threshold", base.threshold),
        order_p=doc.get("order_p", base.order_p),
        attribute_weights=tuple(doc.get("attribute_weights", base.attribute_weights)),
        repair_delta=doc.get("repair_delta", base.repair_delta),
    )


def scenario_doc(sc: ControlScenario) -> dict[str, Any]:
    return {"id": sc.id, "name": sc.name, "description": sc.description, "parameters": dict(sc.parameters)}


def scenario_from(doc: Mapping[str, Any]) -> ControlScenario:
    try:
        return ControlScenario(
            id=str(doc["id"]),
            name=str(doc["name"]),
            description=str(doc.get("description", "")),
            parameters={str(k): str(v) for k, v in dict(doc.get("parameters", {})).items()},
        )
    except KeyError as exc:
        raise ValidationFailed(f"scenario requires id and name fields: missing {exc}") from exc


def matrix_doc(m: PairwiseMatrix) -> dict[str, Any]:
    return {"label": m.label, "values": [list(row) for row in m.values]}


def matrix_from(doc: Mapping[str, Any] | Iterable) -> PairwiseMatrix:
    if isinstance(doc, Mapping):
        return PairwiseMatrix(tuple(tuple(row) for row in doc["values"]), label=str(doc.get("label", "")))
    return PairwiseMatrix(tuple(tuple(row) for row in doc))


def capacity_doc(cap: Capacity) -> dict[str, Any]:
    return {"criteria": list(cap.criteria.names), "values": cap.to_mapping()}


def capacity_from(doc: Mapping[str, Any], criteria: CriteriaSet | None = None) -> Capacity:
    """Read a capacity given either directly (``values``) or in Moebius form.

    The document may name its own ``criteria``; otherwise ``criteria`` is
    required. ``{"mobius": {...}}`` is accepted wherever a capacity is.
    """
    doc_criteria = doc.get("criteria")
    if doc_criteria is not None:
        criteria = CriteriaSet(tuple(str(x) for x in doc_criteria))
    if criteria is None:
        raise ValidationFailed("capacity document must name its criteria")
    if "mobius" in doc and "values" in doc:
        raise ValidationFailed("capacity document must give either values or mobius, not both")
    if "mobius" in doc:
        return zeta(MobiusRepresentation.from_mapping(criteria, doc["mobius"]))
    if "values" not in doc:
        raise ValidationFailed("capacity document must contain values or mobius")
    return Capacity.from_mapping(criteria, doc["values"])


def table_doc(t: EvaluationTable) -> dict[str, Any]:
    return {
        "criteria": list(t.criteria.names),
        "alternatives": list(t.alternatives),
        "rows": [list(row) for row in t.rows],
    }


def table_from(doc: Mapping[str, Any], criteria: CriteriaSet | None = None) -> EvaluationTable:
    doc_criteria = doc.get("criteria")
    if doc_criteria is not None:
        criteria = CriteriaSet(tuple(str(x) for x in doc_criteria))
    if criteria is None:
        raise ValidationFailed("evaluation table document must name its criteria")
    try:
        alternatives = tuple(str(a) for a in doc["alternatives"])
        rows = tuple(tuple(row) for row in doc["rows"])
    except KeyError as exc:
        raise ValidationFailed(f"evaluation table requires alternatives and rows: missing {exc}") from exc
    return EvaluationTable(criteria=criteria, alternatives=alternatives, rows=rows)


def ranking_doc(ranking: Iterable[ScoredAlternative]) -> list[dict[str, Any]]:
    return [{"alternative": r.alternative, "score": r.score, "rank": r.rank} for r in ranking]


def ranking_from(docs: Iterable[Mapping[str, Any]]) -> list[ScoredAlternative]:
    return [
        ScoredAlternative(alternative=str(d["alternative"]), score=float(d["score"]), rank=int(d["rank"]))
        for d in docs
    ]


def recommendation_doc(r: Recommendation | None) -> dict[str, Any] | None:
    if r is None:
        return None
    return {"scenario": r.scenario_id, "distance": r.distance, "source_case": r.source_case_id}


def recommendation_from(doc: Mapping[str, Any]) -> Recommendation:
    return Recommendation(
        scenario_id=str(doc["scenario"]),
        distance=float(doc["distance"]),
        source_case_id=int(doc["source_case"]),
    )


def manual_doc(m: ManualEvaluation | None) -> dict[str, Any] | None:
    if m is None:
        return None
    return {
        "capacity": capacity_doc(m.capacity),
        "table": table_doc(m.table),
        "ranking": ranking_doc(m.ranking),
        "best": m.best,
        "matrices": {name: matrix_doc(mx) for name, mx in m.matrices.items()} if m.matrices is not None else None,
        "warnings": list(m.warnings),
    }


def manual_from(doc: Mapping[str, Any]) -> ManualEvaluation:
    matrices_doc = doc.get("matrices")
    return ManualEvaluation(
        capacity=capacity_from(doc["capacity"]),
        table=table_from(doc["table"]),
        ranking=ranking_from(doc["ranking"]),
        matrices=(
            {str(name): matrix_from(mx) for name, mx in matrices_doc.items()} if matrices_doc is not None else None
        ),
        warnings=[str(w) for w in doc.get("warnings", [])],
    )


def transition_doc(t: TransitionRecord) -> dict[str, Any]:
    return {"from": t.from_state.value, "to": t.to_state.value, "op": t.op, "at": t.at, "details": t.details}


def transition_from(doc: Mapping[str, Any]) -> TransitionRecord:
    return TransitionRecord(
        from_state=SessionState(doc["from"]),
        to_state=SessionState(doc["to"]),
        op=str(doc["op"]),
        at=str(doc["at"]),
        details=dict(doc.get("details", {})),
    )


def session_doc(s: DecisionSession) -> dict[str, Any]:
    return {
        "id": s.id,
        "context": {"operation": s.operation, "characteristic": s.characteristic},
        "state": s.state.value,
        "situation": situation_doc(s.situation),
        "objectives": objectives_doc(s.objectives),
        "recommendation": recommendation_doc(s.recommendation),
        "manual": manual_doc(s.manual),
        "selected_scenario": s.selected_scenario,
        "selection_source": s.selection_source,
        "observed": situation_doc(s.observed),
        "period_t": s.period_t,
        "predecessor_id": s.predecessor_id,
        "successor_id": s.successor_id,
        "case_id": s.case_id,
        "audit_trail": [transition_doc(t) for t in s.transitions],
        "created_at": s.created_at,
        "closed_at": s.closed_at,
    }


def session_from(doc: Mapping[str, Any]) -> DecisionSession:
    context = dict(doc.get("context", {}))
    try:
        state = SessionState(doc["state"])
    except ValueError as exc:
        raise ValidationFailed(f"unknown session state {doc.get('state')!r}") from exc
    return DecisionSession(
        id=int(doc["id"]),
        operation=str(context.get("operation", "")),
        characteristic=str(context.get("characteristic", "")),
        state=state,
        situation=situation_from(doc["situation"]) if doc.get("situation") is not None else None,
        objectives=objectives_from(doc["objectives"]) if doc.get("objectives") is not None else None,
        recommendation=recommendation_from(doc["recommendation"]) if doc.get("recommendation") is not None else None,
        manual=manual_from(doc["manual"]) if doc.get("manual") is not None else None,
        selected_scenario=doc.get("selected_scenario"),
        selection_source=doc.get("selection_source"),
        observed=situation_from(doc["observed"], "observed results") if doc.get("observed") is not None else None,
        period_t=dict(doc["period_t"]) if doc.get("period_t") is not None else None,
        predecessor_id=doc.get("predecessor_id"),
        successor_id=doc.get("successor_id"),
        case_id=doc.get("case_id"),
        transitions=[transition_from(t) for t in doc.get("audit_trail", [])],
        created_at=str(doc.get("created_at", "")),
        closed_at=doc.get("closed_at"),
    )


# -- audit events -------------------------------------------------------------

AUDIT_KINDS = ("transition", "recommendation", "revision", "threshold-change")


@dataclass(frozen=True)
class AuditEvent:
    """One append-only audit record; events are totally ordered per session."""

    at: str
    session_id: int | None
    kind: str
    before: Any
    after: Any
    details: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.kind not in AUDIT_KINDS:
            raise ValidationFailed(f"unknown audit event kind {self.kind!r}; expected one of {list(AUDIT_KINDS)}")


def audit_event_doc(e: AuditEvent) -> dict[str, Any]:
    return {
        "at": e.at,
        "session_id": e.session_id,
        "kind": e.kind,
        "before": e.before,
        "after": e.after,
        "details": e.details,
    }


def audit_event_from(doc: Mapping[str, Any]) -> AuditEvent:
    return AuditEvent(
        at=str(doc.get("at", "")),
        session_id=doc.get("session_id"),
        kind=str(doc.get("kind", "")),
        before=doc.get("before"),
        after=doc.get("after"),
        details=dict(doc.get("details", {})),
    )


# -- the file store -----------------------------------------------------------


def _atomic_write(path: Path, text: str) -> None:
    tmp = path.with_name(path.name + ".tmp")
    with open(tmp, "w", encoding="utf-8") as handle:
        handle.write(text)
        handle.flush()
        os.fsync(handle.fileno())
    os.replace(tmp, path)


class FileStore:
    """Durable JSON persistence for one data directory.

    One mutator at a time (the caller serializes); readers may use the
    in-memory state concurrently. An advisory ``.lock`` file marks the
    directory as in use; it is not enforced.
    """

    def __init__(self, data_dir: str | os.PathLike, *, create: bool = True):
        self.data_dir = Path(data_dir)
        if create:
            self.data_dir.mkdir(parents=True, exist_ok=True)
        if not self.data_dir.is_dir():
            raise StoreError(f"data directory {self.data_dir} does not exist")
        self.load_warnings: list[str] = []
        try:
            (self.data_dir / LOCK_FILE).write_text(f"{os.getpid()}\n", encoding="utf-8")
        except OSError:
            pass  # advisory only

    def _path(self, name: str) -> Path:
        return self.data_dir / name

    def _read_payload(self, name: str) -> Any | None:
        path = self._path(name)
        if not path.exists():
            return None
        try:
            doc = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise StoreError(f"{name}: cannot read document: {exc}") from exc
        if not isinstance(doc, dict) or "schema_version" not in doc or "payload" not in doc:
            raise StoreError(f"{name}: missing envelope (schema_version, payload)")
        version = doc["schema_version"]
        if not isinstance(version, int):
            raise StoreError(f"{name}: schema_version must be an integer, got {version!r}")
        if version != SCHEMA_VERSION:
            raise UnsupportedVersion(f"{name}: schema version {version} is unsupported; this build reads version {SCHEMA_VERSION}")
        return doc["payload"]

    def load(self) -> AppState:
        """Read and validate the full state; missing documents use defaults.

        All type invariants (capacity monotonicity, case id ordering, state
        names) are re-checked during deserialization; the first violation
        aborts the load naming the file, so no partial state escapes.
        """
        self.load_warnings = []
        for leftover in sorted(self.data_dir.glob("*.tmp")):
            self.load_warnings.append(f"ignoring partial write leftover {leftover.name}")

        state = fresh_state()
        try:
            payload = self._read_payload(CASES_FILE)
            if payload is not None:
                state.case_base = CaseBase(case_from(d) for d in payload.get("cases", []))
        except Exception as exc:
            raise _wrap(CASES_FILE, exc) from exc
        try:
            payload = self._read_payload(SCENARIOS_FILE)
            if payload is not None:
                state.catalog = [scenario_from(d) for d in payload.get("scenarios", [])]
        except Exception as exc:
            raise _wrap(SCENARIOS_FILE, exc) from exc
        try:
            payload = self._read_payload(CONFIG_FILE)
            if payload is not None:
                state.config = config_from(payload.get("retrieval", {}))
                if "criteria" in payload:
                    state.criteria = CriteriaSet(tuple(str(x) for x in payload["criteria"]))
        except Exception as exc:
            raise _wrap(CONFIG_FILE, exc) from exc
        try:
            payload = self._read_payload(SESSIONS_FILE)
            if payload is not None:
                sessions = [session_from(d) for d in payload.get("sessions", [])]
                state.sessions = {s.id: s for s in sessions}
                state.next_session_id = int(payload.get("next_session_id", 1))
                if state.sessions and state.next_session_id <= max(state.sessions):
                    raise StoreError(
                        f"next_session_id {state.next_session_id} collides with existing session ids"
                    )
        except Exception as exc:
            raise _wrap(SESSIONS_FILE, exc) from exc
        return state

    def save(self, state: AppState) -> None:
        """Write all four documents, each with a temp-file + atomic rename."""
        documents = {
            CASES_FILE: {"cases": [case_doc(c) for c in state.case_base]},
            SCENARIOS_FILE: {"scenarios": [scenario_doc(sc) for sc in state.catalog]},
            CONFIG_FILE: {"retrieval": config_doc(state.config), "criteria": list(state.criteria.names)},
            SESSIONS_FILE: {
                "sessions": [session_doc(s) for s in sorted(state.sessions.values(), key=lambda s: s.id)],
                "next_session_id": state.next_session_id,
            },
        }
        for name, payload in documents.items():
            envelope = {"schema_version": SCHEMA_VERSION, "payload": payload}
            try:
                _atomic_write(self._path(name), json.dumps(envelope, indent=2) + "\n")
            except OSError as exc:
                raise StoreError(f"{name}: write failed: {exc}") from exc

    def append_audit(self, events: Iterable[AuditEvent | Mapping[str, Any]]) -> None:
        """Append events as NDJSON; durable (flushed and fsynced) on return."""
        lines = []
        for event in events:
            if not isinstance(event, AuditEvent):
                event = audit_event_from(event)
            lines.append(json.dumps(audit_event_doc(event), separators=(",", ":")))
        if not lines:
            return
        try:
            with open(self._path(AUDIT_FILE), "a", encoding="utf-8") as handle:
                handle.write("\n".join(lines) + "\n")
                handle.flush()
                os.fsync(handle.fileno())
        except OSError as exc:
            raise StoreError(f"{AUDIT_FILE}: append failed: {exc}") from exc

    def commit(self, state: AppState, events: Iterable[AuditEvent | Mapping[str, Any]]) -> None:
        """Audit first, then state; callers report success only after both."""
        self.append_audit(events)
        self.save(state)

    def read_audit(self, session_id: int | None = None) -> list[AuditEvent]:
        """Events in insertion order, optionally filtered to one session.

        The audit log is advisory: unparseable lines are skipped and reported
        via ``load_warnings`` rather than failing the read.
        """
        path = self._path(AUDIT_FILE)
        if not path.exists():
            return []
        events: list[AuditEvent] = []
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), start=1):
            if not line.strip():
                continue
            try:
                event = audit_event_from(json.loads(line))
            except (json.JSONDecodeError, ValidationFailed) as exc:
                self.load_warnings.append(f"{AUDIT_FILE}:{lineno}: skipping unreadable audit line ({exc})")
                continue
            if session_id is None or event.session_id == session_id:
                events.append(event)
        return events


def _wrap(name: str, exc: Exception) -> StoreError:
    if isinstance(exc, StoreError):
        return exc
    message = getattr(exc, "message", str(exc))
    details = getattr(exc, "details", None)
    if details:
        message = f"{message} ({details[0]})"
    return StoreError(f"{name}: first violated invariant: {message}", details=details or [])
