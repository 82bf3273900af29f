"""Decision-session state machine and the engine's orchestration."""

import pytest

from cplan.cbr import CaseStatus, Objectives, Outcome, QualitySituation
from cplan.errors import IllegalTransition, NotFoundError, ValidationFailed
from cplan.mcdm import Capacity, PairwiseMatrix
from cplan.workflow import (
    ALLOWED_EDGES,
    DecisionEngine,
    SessionState,
    default_catalog,
)

from .fixtures import (
    AUTO_DISTANCE,
    AUTO_QUERY,
    AUTO_SOURCE,
    ENTRY_SITUATION,
    EXPECTED_OBJECTIVES,
    RCT,
    reference_table,
)

GOOD_RESULTS = QualitySituation(1.3, 1.25, 8, 2)
BAD_RESULTS = QualitySituation(0.8, 0.7, 20, 6)
OBJECTIVES = Objectives(1.0, 1.0, 10, 3)

UNIFORM_CAPACITY = Capacity.additive(RCT, (1 / 3, 1 / 3, 1 / 3))


def fitted_capacity():
    from cplan.mcdm import fit_capacity

    return fit_capacity(reference_table(), (0.291, 0.329, 0.17, 0.155)).capacity


def run_manual_to_closed(engine, situation=ENTRY_SITUATION, objectives=OBJECTIVES, scenario="S2", observed=GOOD_RESULTS):
    session = engine.create_session("Splitting/Crimping", "crimping height")
    engine.submit_situation(session.id, situation, objectives)
    assert engine.session(session.id).state is SessionState.MANUAL_REQUIRED
    engine.manual_evaluate(session.id, fitted_capacity(), table=reference_table())
    engine.confirm_selection(session.id, scenario)
    engine.apply_scenario(session.id, {"duration": "2 weeks", "basis": "production batches"})
    engine.record_results(session.id, observed)
    return engine.close_session(session.id)


class TestSubmitSituation:
    def test_empty_base_routes_to_manual(self):
        engine = DecisionEngine()
        session = engine.create_session()
        engine.submit_situation(session.id, ENTRY_SITUATION, OBJECTIVES)
        assert session.state is SessionState.MANUAL_REQUIRED
        assert [t.to_state for t in session.transitions] == [
            SessionState.SITUATION_ENTERED,
            SessionState.MANUAL_REQUIRED,
        ]

    def test_seeded_base_routes_to_auto(self):
        engine = DecisionEngine()
        seed_auto_source(engine)
        session = engine.create_session()
        engine.submit_situation(session.id, AUTO_QUERY, EXPECTED_OBJECTIVES)
        assert session.state is SessionState.AUTO_RECOMMENDED
        assert session.recommendation.scenario_id == "S3"
        assert session.recommendation.distance == AUTO_DISTANCE

    def test_submitting_twice_is_illegal(self):
        engine = DecisionEngine()
        session = engine.create_session()
        engine.submit_situation(session.id, ENTRY_SITUATION, OBJECTIVES)
        with pytest.raises(IllegalTransition):
            engine.submit_situation(session.id, ENTRY_SITUATION, OBJECTIVES)


def seed_auto_source(engine, scenario="S3"):
    from cplan.cbr import Case

    return engine.import_case(
        Case(
            id=None,
            operation="Splitting/Crimping",
            characteristic="crimping height",
            situation=AUTO_SOURCE,
            scenario_id=scenario,
            objectives=EXPECTED_OBJECTIVES,
            observed=QualitySituation(1.1, 1.25, 12, 2.5),
            origin="manual",
            status="satisfactory",
        )
    )


class TestRecommendationDecision:
    def make_auto_session(self):
        engine = DecisionEngine()
        seed_auto_source(engine)
        session = engine.create_session()
        engine.submit_situation(session.id, AUTO_QUERY, EXPECTED_OBJECTIVES)
        return engine, session

    def test_accept_selects_the_recommended_scenario(self):
        engine, session = self.make_auto_session()
        engine.accept_recommendation(session.id)
        assert session.state is SessionState.SCENARIO_SELECTED
        assert session.selected_scenario == "S3"
        assert session.selection_source == "automatic"

    def test_reject_falls_back_to_manual_and_keeps_the_recommendation(self):
        engine, session = self.make_auto_session()
        engine.reject_recommendation(session.id)
        assert session.state is SessionState.MANUAL_REQUIRED
        assert session.recommendation is not None
        assert any(t.op == "reject_recommendation" for t in session.transitions)

    def test_accept_twice_is_rejected(self):
        engine, session = self.make_auto_session()
        engine.accept_recommendation(session.id)
        with pytest.raises(IllegalTransition):
            engine.accept_recommendation(session.id)


class TestManualEvaluate:
    def test_reference_table_selects_s2(self):
        engine = DecisionEngine()
        session = engine.create_session()
        engine.submit_situation(session.id, ENTRY_SITUATION, OBJECTIVES)
        evaluation = engine.manual_evaluate(session.id, fitted_capacity(), table=reference_table())
        assert evaluation.best == "S2"
        assert [r.rank for r in evaluation.ranking] == [2, 1, 3, 4]
        assert session.state is SessionState.MANUAL_EVALUATED

    def test_all_ones_matrices_tie_in_id_order(self):
        engine = DecisionEngine()
        session = engine.create_session()
        engine.submit_situation(session.id, ENTRY_SITUATION, OBJECTIVES)
        ones = PairwiseMatrix(tuple(tuple(1.0 for _ in range(4)) for _ in range(4)))
        evaluation = engine.manual_evaluate(
            session.id, UNIFORM_CAPACITY, matrices={"Risk": ones, "Cost": ones, "Time": ones}
        )
        assert [r.rank for r in evaluation.ranking] == [1, 2, 3, 4]  # S1..S4 in id order

    def test_inconsistent_matrix_attaches_a_warning(self):
        engine = DecisionEngine()
        session = engine.create_session()
        engine.submit_situation(session.id, ENTRY_SITUATION, OBJECTIVES)
        # Strongly intransitive judgments: consistency ratio far above 0.10.
        bad = PairwiseMatrix(
            (
                (1, 9, 1 / 9, 9),
                (1 / 9, 1, 9, 1 / 9),
                (9, 1 / 9, 1, 9),
                (1 / 9, 9, 1 / 9, 1),
            )
        )
        evaluation = engine.manual_evaluate(
            session.id, UNIFORM_CAPACITY, matrices={"Risk": bad, "Cost": bad, "Time": bad}
        )
        assert any("consistency ratio" in w for w in evaluation.warnings)

    def test_reevaluation_passes_back_through_manual_required(self):
        engine = DecisionEngine()
        session = engine.create_session()
        engine.submit_situation(session.id, ENTRY_SITUATION, OBJECTIVES)
        engine.manual_evaluate(session.id, fitted_capacity(), table=reference_table())
        engine.manual_evaluate(session.id, UNIFORM_CAPACITY, table=reference_table())
        ops = [t.op for t in session.transitions]
        assert ops == ["submit_situation", "route_manual", "manual_evaluate", "reopen_manual", "manual_evaluate"]
        assert session.state is SessionState.MANUAL_EVALUATED

    def test_unknown_table_alternative_is_a_catalog_error(self):
        from cplan.mcdm import EvaluationTable

        engine = DecisionEngine()
        session = engine.create_session()
        engine.submit_situation(session.id, ENTRY_SITUATION, OBJECTIVES)
        table = EvaluationTable(RCT, ("S9",), ((1.0, 1.0, 1.0),))
        with pytest.raises(NotFoundError):
            engine.manual_evaluate(session.id, UNIFORM_CAPACITY, table=table)

    def test_requires_exactly_one_input_form(self):
        engine = DecisionEngine()
        session = engine.create_session()
        engine.submit_situation(session.id, ENTRY_SITUATION, OBJECTIVES)
        with pytest.raises(ValidationFailed):
            engine.manual_evaluate(session.id, UNIFORM_CAPACITY)


class TestSelectionApplyResults:
    def prepared(self):
        engine = DecisionEngine()
        session = engine.create_session()
        engine.submit_situation(session.id, ENTRY_SITUATION, OBJECTIVES)
        engine.manual_evaluate(session.id, fitted_capacity(), table=reference_table())
        return engine, session

    def test_happy_path_to_results(self):
        engine, session = self.prepared()
        engine.confirm_selection(session.id, "S2")
        engine.apply_scenario(session.id)
        engine.record_results(session.id, GOOD_RESULTS)
        assert session.state is SessionState.RESULTS_RECORDED
        assert session.observed == GOOD_RESULTS

    def test_unknown_scenario_is_a_catalog_error(self):
        engine, session = self.prepared()
        with pytest.raises(NotFoundError):
            engine.confirm_selection(session.id, "S9")

    def test_record_before_apply_is_illegal(self):
        engine, session = self.prepared()
        engine.confirm_selection(session.id, "S2")
        with pytest.raises(IllegalTransition):
            engine.record_results(session.id, GOOD_RESULTS)


class TestClose:
    def test_satisfactory_manual_case_is_retained(self):
        engine = DecisionEngine()
        report = run_manual_to_closed(engine)
        assert report.outcome is Outcome.SATISFACTORY
        assert report.case_status is CaseStatus.SATISFACTORY
        assert len(engine.state.case_base) == 1
        assert engine.state.case_base.get(report.case_id).scenario_id == "S2"

    def test_closed_sessions_are_immutable(self):
        engine = DecisionEngine()
        report = run_manual_to_closed(engine)
        session = engine.session(report.session_id)
        for op in (
            lambda: engine.submit_situation(session.id, ENTRY_SITUATION, OBJECTIVES),
            lambda: engine.accept_recommendation(session.id),
            lambda: engine.manual_evaluate(session.id, UNIFORM_CAPACITY, table=reference_table()),
            lambda: engine.confirm_selection(session.id, "S2"),
            lambda: engine.apply_scenario(session.id),
            lambda: engine.record_results(session.id, GOOD_RESULTS),
            lambda: engine.close_session(session.id),
        ):
            with pytest.raises(IllegalTransition):
                op()

    def test_identical_situation_is_recommended_after_retention(self):
        from cplan.cbr import RetrievalConfig

        engine = DecisionEngine()
        run_manual_to_closed(engine)
        # A zero-distance hit is reused under any positive threshold.
        for threshold in (1e-9, 0.5, 10.0, 1000.0):
            engine.set_config(RetrievalConfig(threshold=threshold))
            session = engine.create_session()
            engine.submit_situation(session.id, ENTRY_SITUATION, OBJECTIVES)
            assert session.state is SessionState.AUTO_RECOMMENDED
            assert session.recommendation.scenario_id == "S2"
            assert session.recommendation.distance == 0.0

    def test_failed_automatic_case_lowers_the_threshold(self):
        engine = DecisionEngine()
        seed_auto_source(engine)
        session = engine.create_session()
        engine.submit_situation(session.id, AUTO_QUERY, EXPECTED_OBJECTIVES)
        engine.accept_recommendation(session.id)
        engine.apply_scenario(session.id)
        engine.record_results(session.id, BAD_RESULTS)
        report = engine.close_session(session.id)
        assert report.outcome is Outcome.UNSATISFACTORY
        assert report.case_status is CaseStatus.FAILED
        assert report.threshold_change == (10.0, pytest.approx(0.95 * AUTO_DISTANCE))
        assert engine.state.config.threshold == pytest.approx(0.95 * AUTO_DISTANCE)
        retained = engine.state.case_base.get(report.case_id)
        assert retained.status is CaseStatus.FAILED
        assert retained.retrieval_distance == AUTO_DISTANCE

    def test_failed_manual_case_opens_a_repair_session(self):
        engine = DecisionEngine()
        report = run_manual_to_closed(engine, observed=BAD_RESULTS)
        assert report.outcome is Outcome.UNSATISFACTORY
        assert report.successor_id is not None
        successor = engine.session(report.successor_id)
        assert successor.state is SessionState.MANUAL_REQUIRED
        assert successor.predecessor_id == report.session_id
        assert successor.situation == ENTRY_SITUATION
        assert successor.manual is not None  # prior artifacts pre-loaded
        assert engine.state.config.threshold == 10.0  # unchanged
        # The repaired session can be driven to completion.
        engine.manual_evaluate(successor.id, UNIFORM_CAPACITY, table=reference_table())
        engine.confirm_selection(successor.id, "S1")
        engine.apply_scenario(successor.id)
        engine.record_results(successor.id, GOOD_RESULTS)
        second = engine.close_session(successor.id)
        assert second.case_status is CaseStatus.SATISFACTORY


class TestGraphDiscipline:
    def test_every_recorded_transition_is_an_allowed_edge(self):
        engine = DecisionEngine()
        run_manual_to_closed(engine)
        seed_auto_source(engine)
        session = engine.create_session()
        engine.submit_situation(session.id, AUTO_QUERY, EXPECTED_OBJECTIVES)
        engine.reject_recommendation(session.id)
        engine.manual_evaluate(session.id, fitted_capacity(), table=reference_table())
        engine.manual_evaluate(session.id, UNIFORM_CAPACITY, table=reference_table())
        engine.confirm_selection(session.id, "S1")
        engine.apply_scenario(session.id)
        engine.record_results(session.id, BAD_RESULTS)
        engine.close_session(session.id)
        for s in engine.state.sessions.values():
            previous = SessionState.CREATED
            for t in s.transitions:
                assert t.from_state == previous
                assert t.to_state in ALLOWED_EDGES[t.from_state]
                if t.op == "recommend":  # every recommendation carries provenance
                    assert "source_case" in t.details and "distance" in t.details
                previous = t.to_state

    def test_audit_trail_length_equals_transition_count(self):
        engine = DecisionEngine()
        report = run_manual_to_closed(engine)
        session = engine.session(report.session_id)
        # submit(2) + manual(1) + selection(1) + apply(1) + results(1) + close(1)
        assert len(session.transitions) == 7


class TestStateGuards:
    def test_bad_situation_bounds_leave_the_state_unchanged(self):
        engine = DecisionEngine()
        session = engine.create_session()
        with pytest.raises(ValidationFailed):
            engine.submit_situation(session.id, QualitySituation(1.2, 1.2, 150, 3), OBJECTIVES)
        assert session.state is SessionState.CREATED

    def test_unknown_session_is_not_found(self):
        engine = DecisionEngine()
        with pytest.raises(NotFoundError):
            engine.accept_recommendation(99)


class TestRecommendOnce:
    def test_empty_base_returns_none(self):
        engine = DecisionEngine()
        assert engine.recommend_once(ENTRY_SITUATION) is None

    def test_threshold_override(self):
        engine = DecisionEngine()
        seed_auto_source(engine)
        assert engine.recommend_once(AUTO_QUERY, threshold=5.0) is None
        rec = engine.recommend_once(AUTO_QUERY, threshold=9.0)
        assert rec.scenario_id == "S3" and rec.distance == AUTO_DISTANCE


class TestCatalog:
    def test_default_catalog_names(self):
        catalog = default_catalog()
        assert [sc.id for sc in catalog] == ["S1", "S2", "S3", "S4"]
        names = {sc.id: sc.name for sc in catalog}
        assert names["S2"] == "Sampling control by measure (simple plan)"
        assert names["S3"] == "Sampling control by measure (double plan)"

    def test_validation_constraints(self):
        from cplan.workflow import ControlScenario

        engine = DecisionEngine()
        engine.add_scenario(ControlScenario("S5", "100% control"))
        assert engine.state.has_scenario("S5")
        with pytest.raises(Exception):
            engine.add_scenario(ControlScenario("S5", "duplicate"))
        with pytest.raises(ValidationFailed):
            engine.replace_catalog([])
