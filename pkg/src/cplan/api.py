"""HTTP JSON service exposing the decision workflow.

Every non-2xx response body has the shape ``{"code", "message", "details"}``
with codes from a closed set (``validation_failed``, ``not_found``,
``illegal_transition``, ``domain_error``, ``integrity_error``,
``store_error``, ``unsupported_version``, ``unauthorized``,
``internal_error``). All state mutations are funneled through one lock, per
the store's single-writer contract.
"""

from __future__ import annotations

import threading
from pathlib import Path
from typing import Any, Literal, Mapping

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, ConfigDict

from . import mcdm, store
from .cbr import RetrievalConfig
from .errors import (
    CplanError,
    DomainError,
    IllegalTransition,
    IntegrityError,
    NotFoundError,
    StoreError,
    UnsupportedVersion,
    ValidationFailed,
)
from .workflow import DecisionEngine, SessionState

__version__ = "0.1.0"

STATUS_BY_CODE = {
    ValidationFailed.code: 400,
    NotFoundError.code: 404,
    IllegalTransition.code: 409,
    DomainError.code: 422,
    IntegrityError.code: 422,
    StoreError.code: 500,
    UnsupportedVersion.code: 500,
}


class SituationBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    cp: float
    cpk: float
    ncr: float
    encr: float
    objectives: dict[str, float]
    context: dict[str, str] | None = None


class DecisionBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    action: Literal["accept", "reject"]


class ManualBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    matrices: dict[str, Any] | None = None
    table: dict[str, Any] | None = None
    capacity: dict[str, Any] | None = None
    mobius: dict[str, float] | None = None


class SelectionBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    scenario_id: str


class ApplyBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    period_t: dict[str, Any] | None = None


class ResultsBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    cp: float
    cpk: float
    ncr: float
    encr: float


class ConfigBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    threshold: float | None = None
    order_p: float | None = None
    attribute_weights: list[float] | None = None
    repair_delta: float | None = None


class ScenarioBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    id: str
    name: str
    description: str = ""
    parameters: dict[str, str] = {}


class MatrixBody(BaseModel):
    model_config = ConfigDict(extra="forbid")
    values: list[list[float]]
    label: str = ""


def manual_response(session) -> dict[str, Any]:
    evaluation = session.manual
    return {
        "state": session.state.value,
        "criteria": list(evaluation.table.criteria.names),
        "alternatives": list(evaluation.table.alternatives),
        "table": [list(row) for row in evaluation.table.rows],
        "ranking": store.ranking_doc(evaluation.ranking),
        "best": evaluation.best,
        "warnings": list(evaluation.warnings),
    }


def close_response(report) -> dict[str, Any]:
    doc: dict[str, Any] = {
        "state": SessionState.CLOSED.value,
        "status": report.case_status.value,
        "outcome": report.outcome.value,
        "case_id": report.case_id,
    }
    if report.threshold_change is not None:
        doc["threshold_change"] = {"from": report.threshold_change[0], "to": report.threshold_change[1]}
    if report.successor_id is not None:
        doc["successor_id"] = report.successor_id
    return doc


def situation_response(session) -> dict[str, Any]:
    doc: dict[str, Any] = {"state": session.state.value}
    if session.recommendation is not None:
        doc["recommendation"] = store.recommendation_doc(session.recommendation)
    warnings = session.situation.warnings() if session.situation is not None else []
    if warnings:
        doc["warnings"] = warnings
    return doc


def parse_capacity(body: ManualBody | Mapping[str, Any], criteria: mcdm.CriteriaSet) -> mcdm.Capacity:
    capacity_doc = body.capacity if isinstance(body, ManualBody) else body.get("capacity")
    mobius_doc = body.mobius if isinstance(body, ManualBody) else body.get("mobius")
    if (capacity_doc is None) == (mobius_doc is None):
        raise ValidationFailed("provide exactly one of capacity or mobius")
    if mobius_doc is not None:
        return mcdm.zeta(mcdm.MobiusRepresentation.from_mapping(criteria, mobius_doc))
    return store.capacity_from(capacity_doc, criteria)


def create_app(
    engine: DecisionEngine,
    *,
    token: str | None = None,
    ui_dir: str | Path | None = None,
) -> FastAPI:
    app = FastAPI(title="cplan", version=__version__, docs_url=None, redoc_url=None, openapi_url=None)
    lock = threading.RLock()

    @app.exception_handler(CplanError)
    async def handle_domain_error(_request: Request, exc: CplanError) -> JSONResponse:
        status = STATUS_BY_CODE.get(exc.code, 500)
        return JSONResponse(status_code=status, content=exc.as_dict())

    @app.exception_handler(RequestValidationError)
    async def handle_request_validation(_request: Request, exc: RequestValidationError) -> JSONResponse:
        details = [
            f"{'.'.join(str(p) for p in err.get('loc', ()))}: {err.get('msg', 'invalid')}" for err in exc.errors()
        ]
        body = {"code": "validation_failed", "message": "request body is invalid", "details": details}
        return JSONResponse(status_code=400, content=body)

    if token:

        @app.middleware("http")
        async def check_token(request: Request, call_next):
            path = request.url.path
            if path.startswith("/api/") and path != "/api/health":
                header = request.headers.get("authorization", "")
                if header != f"Bearer {token}":
                    return JSONResponse(
                        status_code=401,
                        content={"code": "unauthorized", "message": "missing or invalid bearer token", "details": []},
                    )
            return await call_next(request)

    @app.get("/api/health")
    def health() -> dict[str, str]:
        return {"status": "ok", "version": __version__}

    # -- sessions ---------------------------------------------------------

    @app.post("/api/sessions", status_code=201)
    def create_session(body: dict[str, str] | None = None) -> dict[str, Any]:
        body = body or {}
        with lock:
            session = engine.create_session(body.get("operation", ""), body.get("characteristic", ""))
            return store.session_doc(session)

    @app.get("/api/sessions")
    def list_sessions() -> dict[str, Any]:
        with lock:
            sessions = sorted(engine.state.sessions.values(), key=lambda s: s.id)
            return {"sessions": [store.session_doc(s) for s in sessions]}

    @app.get("/api/sessions/{session_id}")
    def get_session(session_id: int) -> dict[str, Any]:
        with lock:
            return store.session_doc(engine.session(session_id))

    @app.post("/api/sessions/{session_id}/situation")
    def submit_situation(session_id: int, body: SituationBody) -> dict[str, Any]:
        situation = store.situation_from({"cp": body.cp, "cpk": body.cpk, "ncr": body.ncr, "encr": body.encr})
        objectives = store.objectives_from(body.objectives)
        context = body.context or {}
        with lock:
            session = engine.submit_situation(
                session_id,
                situation,
                objectives,
                operation=context.get("operation"),
                characteristic=context.get("characteristic"),
            )
            return situation_response(session)

    @app.post("/api/sessions/{session_id}/decision")
    def decide(session_id: int, body: DecisionBody) -> dict[str, Any]:
        with lock:
            if body.action == "accept":
                session = engine.accept_recommendation(session_id)
                return {"state": session.state.value, "selected_scenario": session.selected_scenario}
            session = engine.reject_recommendation(session_id)
            return {"state": session.state.value}

    @app.post("/api/sessions/{session_id}/manual")
    def manual(session_id: int, body: ManualBody) -> dict[str, Any]:
        with lock:
            criteria = engine.state.criteria
            capacity = parse_capacity(body, criteria)
            if (body.matrices is None) == (body.table is None):
                raise ValidationFailed("provide either matrices or a table")
            if body.matrices is not None:
                matrices = {str(name): store.matrix_from(doc) for name, doc in body.matrices.items()}
                engine.manual_evaluate(session_id, capacity, matrices=matrices)
            else:
                table = store.table_from(body.table, criteria)
                engine.manual_evaluate(session_id, capacity, table=table)
            return manual_response(engine.session(session_id))

    @app.post("/api/sessions/{session_id}/selection")
    def selection(session_id: int, body: SelectionBody) -> dict[str, Any]:
        with lock:
            session = engine.confirm_selection(session_id, body.scenario_id)
            return {"state": session.state.value, "selected_scenario": session.selected_scenario}

    @app.post("/api/sessions/{session_id}/apply")
    def apply(session_id: int, body: ApplyBody | None = None) -> dict[str, Any]:
        with lock:
            session = engine.apply_scenario(session_id, body.period_t if body else None)
            return {"state": session.state.value}

    @app.post("/api/sessions/{session_id}/results")
    def results(session_id: int, body: ResultsBody) -> dict[str, Any]:
        observed = store.situation_from(body.model_dump(), "observed results")
        with lock:
            session = engine.record_results(session_id, observed)
            return {"state": session.state.value}

    @app.post("/api/sessions/{session_id}/close")
    def close(session_id: int) -> dict[str, Any]:
        with lock:
            return close_response(engine.close_session(session_id))

    # -- cases, config, scenarios ------------------------------------------

    @app.get("/api/cases")
    def list_cases(
        cp: float | None = None, cpk: float | None = None, ncr: float | None = None, encr: float | None = None
    ) -> dict[str, Any]:
        query_values = (cp, cpk, ncr, encr)
        with lock:
            docs = []
            target = None
            if any(v is not None for v in query_values):
                if any(v is None for v in query_values):
                    raise ValidationFailed("distance queries need all of cp, cpk, ncr, encr")
                target = store.situation_from({"cp": cp, "cpk": cpk, "ncr": ncr, "encr": encr})
            for case in engine.state.case_base:
                doc = store.case_doc(case)
                if target is not None:
                    from .cbr import distance as case_distance

                    doc["distance"] = case_distance(target, case.situation, engine.state.config)
                docs.append(doc)
            return {"cases": docs, "threshold": engine.state.config.threshold}

    @app.post("/api/cases", status_code=201)
    def import_case(body: dict[str, Any]) -> dict[str, Any]:
        case = store.case_from(body)
        with lock:
            return store.case_doc(engine.import_case(case))

    @app.get("/api/config")
    def get_config() -> dict[str, Any]:
        with lock:
            doc = store.config_doc(engine.state.config)
            doc["criteria"] = list(engine.state.criteria.names)
            return doc

    @app.put("/api/config")
    def put_config(body: ConfigBody) -> dict[str, Any]:
        with lock:
            current = engine.state.config
            merged = store.config_from(
                {
                    "threshold": body.threshold if body.threshold is not None else current.threshold,
                    "order_p": body.order_p if body.order_p is not None else current.order_p,
                    "attribute_weights": (
                        body.attribute_weights if body.attribute_weights is not None else current.attribute_weights
                    ),
                    "repair_delta": body.repair_delta if body.repair_delta is not None else current.repair_delta,
                }
            )
            engine.set_config(merged)
            doc = store.config_doc(engine.state.config)
            doc["criteria"] = list(engine.state.criteria.names)
            return doc

    @app.get("/api/scenarios")
    def list_scenarios() -> dict[str, Any]:
        with lock:
            return {"scenarios": [store.scenario_doc(sc) for sc in engine.state.catalog]}

    @app.post("/api/scenarios", status_code=201)
    def add_scenario(body: ScenarioBody) -> dict[str, Any]:
        with lock:
            scenario = engine.add_scenario(store.scenario_from(body.model_dump()))
            return store.scenario_doc(scenario)

    @app.put("/api/scenarios")
    def replace_scenarios(body: list[ScenarioBody]) -> dict[str, Any]:
        with lock:
            catalog = engine.replace_catalog([store.scenario_from(item.model_dump()) for item in body])
            return {"scenarios": [store.scenario_doc(sc) for sc in catalog]}

    # -- stateless helpers --------------------------------------------------

    @app.post("/api/mcdm/matrix")
    def evaluate_matrix(body: MatrixBody) -> dict[str, Any]:
        """Weights and consistency for one pairwise matrix (feeds the live
        editor badge; no session state is touched)."""
        matrix = store.matrix_from({"values": body.values, "label": body.label})
        issues = mcdm.validate_pairwise(matrix)
        if issues:
            return {
                "valid": False,
                "issues": [f"{it.kind} at ({it.row},{it.col}): {it.message}" for it in issues],
                "warnings": [],
            }
        vector = mcdm.priority_vector(matrix)
        warnings = [
            f"entry ({i},{j})={value!r} is outside the 1/9..9 scale"
            for i, j, value in mcdm.saaty_scale_violations(matrix)
        ]
        doc: dict[str, Any] = {
            "valid": True,
            "issues": [],
            "weights": list(vector.weights),
            "method": vector.method,
            "warnings": warnings,
        }
        try:
            cr = mcdm.consistency_ratio(matrix)
        except DomainError as exc:
            doc["consistency_ratio"] = None
            doc["warnings"] = warnings + [exc.message]
        else:
            doc["consistency_ratio"] = cr
            if cr > mcdm.CR_WARNING_LIMIT:
                doc["warnings"] = warnings + [f"consistency ratio {cr:.3f} exceeds {mcdm.CR_WARNING_LIMIT}"]
        return doc

    if ui_dir is not None and Path(ui_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(ui_dir), html=True), name="ui")

    return app
