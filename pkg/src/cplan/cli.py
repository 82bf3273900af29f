"""Command-line interface.

Subcommands: ``serve`` (HTTP service), ``recommend`` (one-shot retrieval),
``evaluate`` (rank a table file under a capacity file), ``case
list|import|export``, ``config get|set``, and ``replay`` (scripted session
sequences for acceptance runs). Errors print as JSON ``{"code", "message",
"details"}`` on stderr with a non-zero exit code.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path
from typing import Any

import click

from . import api as api_module
from . import store as store_module
from .errors import CplanError, ValidationFailed
from .mcdm import rank_alternatives
from .workflow import DecisionEngine

_CONFIG_KEYS = ("threshold", "order_p", "attribute_weights", "repair_delta")


def _fail(exc: CplanError) -> None:
    click.echo(json.dumps(exc.as_dict()), err=True)
    sys.exit(1)


def _engine(data_dir: str | None) -> DecisionEngine:
    return DecisionEngine(store_module.FileStore(store_module.resolve_data_dir(data_dir)))


data_dir_option = click.option(
    "--data-dir",
    default=None,
    envvar="CPLAN_DATA_DIR",
    help="Data directory (default ./data; the flag wins over CPLAN_DATA_DIR).",
)


@click.group()
def main() -> None:
    """Quality-control planning: case-based recommendations with a
    multi-criteria manual fallback."""


@main.command()
@click.option("--listen", default=None, envvar="CPLAN_LISTEN", help="host:port to bind (default 127.0.0.1:8642).")
@data_dir_option
@click.option("--ui-dir", default=None, envvar="CPLAN_UI_DIR", help="Directory of built UI assets to serve at /.")
@click.option("--token", default=None, envvar="CPLAN_TOKEN", help="Require this bearer token on /api/* requests.")
def serve(listen: str | None, data_dir: str | None, ui_dir: str | None, token: str | None) -> None:
    """Run the HTTP JSON service."""
    import uvicorn

    listen = listen or "127.0.0.1:8642"
    host, _, port_text = listen.rpartition(":")
    if not host or not port_text.isdigit():
        _fail(ValidationFailed(f"--listen must look like host:port, got {listen!r}"))
    try:
        engine = _engine(data_dir)
    except CplanError as exc:
        _fail(exc)
    app = api_module.create_app(engine, token=token, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=int(port_text), log_level="warning")


@main.command()
@click.option("--cp", type=float, required=True)
@click.option("--cpk", type=float, required=True)
@click.option("--ncr", type=float, required=True)
@click.option("--encr", type=float, required=True)
@click.option("--threshold", type=float, default=None, help="Override the configured similarity threshold.")
@data_dir_option
def recommend(cp: float, cpk: float, ncr: float, encr: float, threshold: float | None, data_dir: str | None) -> None:
    """One-shot retrieval: print the recommended scenario and its distance."""
    try:
        engine = _engine(data_dir)
        situation = store_module.situation_from({"cp": cp, "cpk": cpk, "ncr": ncr, "encr": encr})
        rec = engine.recommend_once(situation, threshold)
    except CplanError as exc:
        _fail(exc)
    if rec is None:
        click.echo("no similar case")
    else:
        click.echo(f"{rec.scenario_id}\tdistance={rec.distance}\tsource_case={rec.source_case_id}")


@main.command()
@click.option("--table", "table_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--capacity", "capacity_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--json", "as_json", is_flag=True, help="Print the ranking as JSON instead of a TSV table.")
def evaluate(table_path: str, capacity_path: str, as_json: bool) -> None:
    """Rank the alternatives of a table file under a capacity file."""
    try:
        table_doc = json.loads(Path(table_path).read_text(encoding="utf-8"))
        capacity_doc = json.loads(Path(capacity_path).read_text(encoding="utf-8"))
        table = store_module.table_from(table_doc)
        capacity = store_module.capacity_from(capacity_doc, table.criteria)
        ranking = rank_alternatives(table, capacity)
    except json.JSONDecodeError as exc:
        _fail(ValidationFailed(f"input file is not valid JSON: {exc}"))
    except CplanError as exc:
        _fail(exc)
    if as_json:
        click.echo(json.dumps({"ranking": store_module.ranking_doc(ranking)}, indent=2))
        return
    header = ["alternative", *table.criteria.names, "score", "rank"]
    click.echo("\t".join(header))
    for alt, row, scored in zip(table.alternatives, table.rows, ranking):
        cells = [alt, *(repr(x) if isinstance(x, float) else str(x) for x in row), repr(scored.score), str(scored.rank)]
        click.echo("\t".join(cells))
    best = next(r.alternative for r in ranking if r.rank == 1)
    click.echo(f"best\t{best}")


@main.group()
def case() -> None:
    """Inspect, import or export the case base."""


@case.command("list")
@data_dir_option
def case_list(data_dir: str | None) -> None:
    try:
        engine = _engine(data_dir)
    except CplanError as exc:
        _fail(exc)
    click.echo("\t".join(["id", "status", "origin", "scenario", "cp", "cpk", "ncr", "encr", "operation", "characteristic"]))
    for c in engine.state.case_base:
        s = c.situation
        click.echo(
            "\t".join(
                [
                    str(c.id), c.status.value, c.origin.value, c.scenario_id,
                    repr(s.cp), repr(s.cpk), repr(s.ncr), repr(s.encr),
                    c.operation, c.characteristic,
                ]
            )
        )


@case.command("export")
@click.argument("target", type=click.Path(dir_okay=False, allow_dash=True))
@data_dir_option
def case_export(target: str, data_dir: str | None) -> None:
    try:
        engine = _engine(data_dir)
    except CplanError as exc:
        _fail(exc)
    doc = {
        "schema_version": store_module.SCHEMA_VERSION,
        "payload": {"cases": [store_module.case_doc(c) for c in engine.state.case_base]},
    }
    text = json.dumps(doc, indent=2) + "\n"
    if target == "-":
        click.echo(text, nl=False)
    else:
        Path(target).write_text(text, encoding="utf-8")
        click.echo(f"exported {len(engine.state.case_base)} cases to {target}")


@case.command("import")
@click.argument("source", type=click.Path(exists=True, dir_okay=False))
@data_dir_option
def case_import(source: str, data_dir: str | None) -> None:
    try:
        doc = json.loads(Path(source).read_text(encoding="utf-8"))
        if isinstance(doc, dict):
            items = doc.get("payload", doc).get("cases", [])
        else:
            items = doc
        cases = [store_module.case_from(item) for item in items]
        engine = _engine(data_dir)
        retained = engine.import_cases(cases)
    except json.JSONDecodeError as exc:
        _fail(ValidationFailed(f"{source} is not valid JSON: {exc}"))
    except CplanError as exc:
        _fail(exc)
    click.echo(f"imported {len(retained)} cases")


@main.group()
def config() -> None:
    """Read or update the retrieval configuration."""


@config.command("get")
@click.argument("key", required=False)
@data_dir_option
def config_get(key: str | None, data_dir: str | None) -> None:
    try:
        engine = _engine(data_dir)
    except CplanError as exc:
        _fail(exc)
    doc = store_module.config_doc(engine.state.config)
    doc["criteria"] = list(engine.state.criteria.names)
    if key is None:
        click.echo(json.dumps(doc, indent=2))
        return
    if key not in doc:
        _fail(ValidationFailed(f"unknown config key {key!r}; expected one of {sorted(doc)}"))
    click.echo(json.dumps(doc[key]))


@config.command("set")
@click.argument("key")
@click.argument("value")
@data_dir_option
def config_set(key: str, value: str, data_dir: str | None) -> None:
    if key not in _CONFIG_KEYS:
        _fail(ValidationFailed(f"unknown config key {key!r}; expected one of {list(_CONFIG_KEYS)}"))
    try:
        parsed = json.loads(value)
    except json.JSONDecodeError:
        _fail(ValidationFailed(f"value for {key!r} must be JSON (e.g. 7.5 or [1,1,1,1]), got {value!r}"))
    try:
        engine = _engine(data_dir)
        doc = store_module.config_doc(engine.state.config)
        doc[key] = parsed
        engine.set_config(store_module.config_from(doc))
    except CplanError as exc:
        _fail(exc)
    click.echo(json.dumps(store_module.config_doc(engine.state.config), indent=2))


@main.command()
@click.argument("script", type=click.Path(exists=True, dir_okay=False))
@data_dir_option
def replay(script: str, data_dir: str | None) -> None:
    """Drive a scripted session sequence; exit 0 iff every expectation holds.

    The script is NDJSON: one step per line with fields ``op``, ``args``,
    optional ``session`` (an alias bound by ``save_as``) and ``expect`` (a
    subset that must match the step's response; numbers compare within 1e-9).
    """
    try:
        engine = _engine(data_dir)
    except CplanError as exc:
        _fail(exc)
    runner = ReplayRunner(engine)
    failures = 0
    for lineno, line in enumerate(Path(script).read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        try:
            step = json.loads(line)
        except json.JSONDecodeError as exc:
            click.echo(f"step {lineno}: invalid JSON: {exc}", err=True)
            failures += 1
            continue
        try:
            response = runner.run(step)
        except CplanError as exc:
            click.echo(f"step {lineno}: {step.get('op')} failed: {json.dumps(exc.as_dict())}", err=True)
            failures += 1
            continue
        expect = step.get("expect")
        if expect is not None:
            problems = match_subset(expect, response, path=step.get("op", "response"))
            for problem in problems:
                click.echo(f"step {lineno}: {problem}", err=True)
            failures += len(problems)
    if failures:
        click.echo(f"replay finished with {failures} failed expectation(s)", err=True)
        sys.exit(1)
    click.echo("replay ok")


def match_subset(expected: Any, actual: Any, path: str) -> list[str]:
    """Expected must be contained in actual; numbers compare within 1e-9."""
    if isinstance(expected, dict):
        if not isinstance(actual, dict):
            return [f"{path}: expected an object, got {actual!r}"]
        problems = []
        for key, value in expected.items():
            if key not in actual:
                problems.append(f"{path}.{key}: missing (expected {value!r})")
            else:
                problems.extend(match_subset(value, actual[key], f"{path}.{key}"))
        return problems
    if isinstance(expected, list):
        if not isinstance(actual, list) or len(actual) != len(expected):
            return [f"{path}: expected a list of {len(expected)} items, got {actual!r}"]
        problems = []
        for i, (e, a) in enumerate(zip(expected, actual)):
            problems.extend(match_subset(e, a, f"{path}[{i}]"))
        return problems
    if isinstance(expected, bool) or expected is None or isinstance(expected, str):
        return [] if expected == actual else [f"{path}: expected {expected!r}, got {actual!r}"]
    if isinstance(expected, (int, float)):
        if isinstance(actual, (int, float)) and not isinstance(actual, bool) and abs(expected - actual) <= 1e-9:
            return []
        return [f"{path}: expected {expected!r}, got {actual!r}"]
    return [] if expected == actual else [f"{path}: expected {expected!r}, got {actual!r}"]


class ReplayRunner:
    """Executes replay steps against an engine, mirroring the API responses."""

    def __init__(self, engine: DecisionEngine):
        self.engine = engine
        self.aliases: dict[str, int] = {}

    def _session_id(self, step: dict[str, Any]) -> int:
        ref = step.get("session")
        if ref is None:
            raise ValidationFailed(f"step {step.get('op')!r} needs a session reference")
        if isinstance(ref, str) and ref in self.aliases:
            return self.aliases[ref]
        if isinstance(ref, int):
            return ref
        raise ValidationFailed(f"unknown session alias {ref!r}")

    def run(self, step: dict[str, Any]) -> Any:
        op = step.get("op")
        args = dict(step.get("args", {}))
        engine = self.engine
        if op == "create_session":
            session = engine.create_session(args.get("operation", ""), args.get("characteristic", ""))
            alias = step.get("save_as")
            if alias:
                self.aliases[str(alias)] = session.id
            return store_module.session_doc(session)
        if op == "situation":
            objectives = store_module.objectives_from(args.pop("objectives"))
            context = args.pop("context", {}) or {}
            situation = store_module.situation_from(args)
            session = engine.submit_situation(
                self._session_id(step),
                situation,
                objectives,
                operation=context.get("operation"),
                characteristic=context.get("characteristic"),
            )
            return api_module.situation_response(session)
        if op == "decision":
            if args.get("action") == "accept":
                session = engine.accept_recommendation(self._session_id(step))
                return {"state": session.state.value, "selected_scenario": session.selected_scenario}
            if args.get("action") == "reject":
                session = engine.reject_recommendation(self._session_id(step))
                return {"state": session.state.value}
            raise ValidationFailed(f"decision action must be accept or reject, got {args.get('action')!r}")
        if op == "manual":
            criteria = engine.state.criteria
            capacity = api_module.parse_capacity(args, criteria)
            session_id = self._session_id(step)
            if "table" in args:
                table = store_module.table_from(args["table"], criteria)
                engine.manual_evaluate(session_id, capacity, table=table)
            elif "matrices" in args:
                matrices = {str(k): store_module.matrix_from(v) for k, v in args["matrices"].items()}
                engine.manual_evaluate(session_id, capacity, matrices=matrices)
            else:
                raise ValidationFailed("manual step needs a table or matrices")
            return api_module.manual_response(engine.session(session_id))
        if op == "selection":
            session = engine.confirm_selection(self._session_id(step), args["scenario_id"])
            return {"state": session.state.value, "selected_scenario": session.selected_scenario}
        if op == "apply":
            session = engine.apply_scenario(self._session_id(step), args.get("period_t"))
            return {"state": session.state.value}
        if op == "results":
            observed = store_module.situation_from(args, "observed results")
            session = engine.record_results(self._session_id(step), observed)
            return {"state": session.state.value}
        if op == "close":
            return api_module.close_response(engine.close_session(self._session_id(step)))
        if op == "recommend":
            threshold = args.pop("threshold", None)
            situation = store_module.situation_from(args)
            rec = engine.recommend_once(situation, threshold)
            if rec is None:
                return {"found": False}
            return {"found": True, **store_module.recommendation_doc(rec)}
        if op == "import_case":
            return store_module.case_doc(engine.import_case(store_module.case_from(args)))
        if op == "config_get":
            return store_module.config_doc(engine.state.config)
        if op == "config_set":
            doc = store_module.config_doc(engine.state.config)
            doc.update(args)
            engine.set_config(store_module.config_from(doc))
            return store_module.config_doc(engine.state.config)
        raise ValidationFailed(f"unknown replay op {op!r}")


if __name__ == "__main__":
    main()
