"""Command-line surface: recommend, evaluate, case, config, replay."""

import json
from pathlib import Path

import pytest
from click.testing import CliRunner

from cplan.cli import main
from cplan.mcdm import fit_capacity
from cplan.store import FileStore, capacity_doc, case_doc
from cplan.workflow import DecisionEngine

from .fixtures import TARGET_SCORES, REFERENCE_ROWS, reference_table
from .test_workflow import seed_auto_source

WALKTHROUGH = Path(__file__).resolve().parents[1] / "docs" / "examples" / "walkthrough.ndjson"


@pytest.fixture
def runner():
    return CliRunner()


def table_file(tmp_path) -> Path:
    path = tmp_path / "table.json"
    path.write_text(
        json.dumps(
            {
                "criteria": ["Risk", "Cost", "Time"],
                "alternatives": ["S1", "S2", "S3", "S4"],
                "rows": [list(row) for row in REFERENCE_ROWS],
            }
        )
    )
    return path


def capacity_file(tmp_path) -> Path:
    path = tmp_path / "capacity.json"
    path.write_text(json.dumps(capacity_doc(fit_capacity(reference_table(), TARGET_SCORES).capacity)))
    return path


class TestRecommend:
    def test_empty_base_prints_no_similar_case(self, runner, tmp_path):
        result = runner.invoke(
            main, ["recommend", "--cp", "1.2", "--cpk", "1.2", "--ncr", "10", "--encr", "3",
                   "--data-dir", str(tmp_path / "d")],
        )
        assert result.exit_code == 0
        assert "no similar case" in result.output

    def test_seeded_base_prints_scenario_and_distance(self, runner, tmp_path):
        data_dir = tmp_path / "d"
        DecisionEngine(FileStore(data_dir)).import_case(seed_auto_source(DecisionEngine()))
        result = runner.invoke(
            main, ["recommend", "--cp", "0.9", "--cpk", "1", "--ncr", "47", "--encr", "10",
                   "--data-dir", str(data_dir)],
        )
        assert result.exit_code == 0
        assert result.output.startswith("S3\t")
        assert "distance=8.25" in result.output

    def test_threshold_override(self, runner, tmp_path):
        data_dir = tmp_path / "d"
        DecisionEngine(FileStore(data_dir)).import_case(seed_auto_source(DecisionEngine()))
        result = runner.invoke(
            main, ["recommend", "--cp", "0.9", "--cpk", "1", "--ncr", "47", "--encr", "10",
                   "--threshold", "5", "--data-dir", str(data_dir)],
        )
        assert result.exit_code == 0
        assert "no similar case" in result.output

    def test_invalid_bounds_fail_with_api_error_shape(self, runner, tmp_path):
        result = runner.invoke(
            main, ["recommend", "--cp", "1", "--cpk", "1", "--ncr", "500", "--encr", "3",
                   "--data-dir", str(tmp_path / "d")],
        )
        assert result.exit_code == 1
        err = json.loads(result.stderr)
        assert err["code"] == "validation_failed"


class TestEvaluate:
    def test_prints_the_reference_ranks_in_row_order(self, runner, tmp_path):
        result = runner.invoke(
            main, ["evaluate", "--table", str(table_file(tmp_path)), "--capacity", str(capacity_file(tmp_path))],
        )
        assert result.exit_code == 0
        lines = result.output.strip().splitlines()
        assert lines[0].split("\t") == ["alternative", "Risk", "Cost", "Time", "score", "rank"]
        ranks = [line.split("\t")[-1] for line in lines[1:5]]
        assert ranks == ["2", "1", "3", "4"]
        assert lines[5] == "best\tS2"

    def test_json_output(self, runner, tmp_path):
        result = runner.invoke(
            main, ["evaluate", "--table", str(table_file(tmp_path)), "--capacity", str(capacity_file(tmp_path)),
                   "--json"],
        )
        doc = json.loads(result.output)
        assert [r["rank"] for r in doc["ranking"]] == [2, 1, 3, 4]

    def test_invalid_capacity_file_fails(self, runner, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        result = runner.invoke(main, ["evaluate", "--table", str(table_file(tmp_path)), "--capacity", str(bad)])
        assert result.exit_code == 1


class TestCaseCommands:
    def test_list_export_import_roundtrip(self, runner, tmp_path):
        data_dir = tmp_path / "d1"
        DecisionEngine(FileStore(data_dir)).import_case(seed_auto_source(DecisionEngine()))
        listed = runner.invoke(main, ["case", "list", "--data-dir", str(data_dir)])
        assert listed.exit_code == 0
        assert "satisfactory" in listed.output and "S3" in listed.output

        export_path = tmp_path / "cases.json"
        exported = runner.invoke(main, ["case", "export", str(export_path), "--data-dir", str(data_dir)])
        assert exported.exit_code == 0
        other_dir = tmp_path / "d2"
        imported = runner.invoke(main, ["case", "import", str(export_path), "--data-dir", str(other_dir)])
        assert imported.exit_code == 0 and "imported 1 cases" in imported.output
        engine = DecisionEngine(FileStore(other_dir))
        assert len(engine.state.case_base) == 1

    def test_export_to_stdout(self, runner, tmp_path):
        data_dir = tmp_path / "d"
        DecisionEngine(FileStore(data_dir)).import_case(seed_auto_source(DecisionEngine()))
        result = runner.invoke(main, ["case", "export", "-", "--data-dir", str(data_dir)])
        doc = json.loads(result.output)
        assert doc["payload"]["cases"][0]["scenario_id"] == "S3"


class TestConfigCommands:
    def test_get_and_set(self, runner, tmp_path):
        data_dir = str(tmp_path / "d")
        got = runner.invoke(main, ["config", "get", "--data-dir", data_dir])
        assert json.loads(got.output)["threshold"] == 10.0
        single = runner.invoke(main, ["config", "get", "threshold", "--data-dir", data_dir])
        assert json.loads(single.output) == 10.0
        set_result = runner.invoke(main, ["config", "set", "threshold", "7.5", "--data-dir", data_dir])
        assert set_result.exit_code == 0
        assert json.loads(runner.invoke(main, ["config", "get", "threshold", "--data-dir", data_dir]).output) == 7.5
        weights = runner.invoke(main, ["config", "set", "attribute_weights", "[1,2,1,1]", "--data-dir", data_dir])
        assert weights.exit_code == 0

    def test_unknown_key_fails(self, runner, tmp_path):
        result = runner.invoke(main, ["config", "set", "nope", "1", "--data-dir", str(tmp_path / "d")])
        assert result.exit_code == 1

    def test_invalid_value_fails(self, runner, tmp_path):
        result = runner.invoke(main, ["config", "set", "order_p", "0.5", "--data-dir", str(tmp_path / "d")])
        assert result.exit_code == 1
        assert json.loads(result.stderr)["code"] == "validation_failed"


class TestReplay:
    def test_walkthrough_script_exits_zero(self, runner, tmp_path):
        result = runner.invoke(main, ["replay", str(WALKTHROUGH), "--data-dir", str(tmp_path / "d")])
        assert result.exit_code == 0, result.output + result.stderr
        assert "replay ok" in result.output

    def test_failed_expectation_exits_nonzero(self, runner, tmp_path):
        script = tmp_path / "script.ndjson"
        script.write_text('{"op": "config_get", "expect": {"threshold": 42.0}}\n')
        result = runner.invoke(main, ["replay", str(script), "--data-dir", str(tmp_path / "d")])
        assert result.exit_code == 1
        assert "expected 42.0" in result.stderr

    def test_unknown_op_exits_nonzero(self, runner, tmp_path):
        script = tmp_path / "script.ndjson"
        script.write_text('{"op": "launch"}\n')
        result = runner.invoke(main, ["replay", str(script), "--data-dir", str(tmp_path / "d")])
        assert result.exit_code == 1
