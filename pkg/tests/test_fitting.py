"""Capacity identification against target scores."""

import numpy as np
import pytest

from cplan.mcdm import Capacity, EvaluationTable, choquet, fit_capacity, rank_alternatives, shapley

from .fixtures import ALTERNATIVES, EXPECTED_RANKS, TARGET_SCORES, RCT, reference_table
from .oracles import choquet_by_hand, solve_three_criteria_capacity


class TestAdditiveGroundTruth:
    def test_recovers_a_weighted_sum_exactly(self):
        rng = np.random.default_rng(31)
        cols = rng.dirichlet(np.ones(5), size=3)
        rows = tuple(tuple(float(cols[j][k]) for j in range(3)) for k in range(5))
        table = EvaluationTable(RCT, ("A1", "A2", "A3", "A4", "A5"), rows)
        weights = (0.5, 0.3, 0.2)
        targets = [sum(w * x for w, x in zip(weights, row)) for row in rows]
        fit = fit_capacity(table, targets)
        assert fit.max_deviation <= 0.001
        assert fit.feasible(0.001)


class TestReferenceTable:
    def test_equation_oracle_finds_a_monotone_capacity(self):
        rows = [dict(zip(RCT.names, row)) for row in reference_table().rows]
        solutions = solve_three_criteria_capacity(rows, list(TARGET_SCORES))
        assert solutions, "the sorted-order equations admit no monotone capacity"
        indicative = solutions[0]
        # Every solution reproduces the targets through independent arithmetic.
        for row, target in zip(rows, TARGET_SCORES):
            assert choquet_by_hand(row, indicative) == pytest.approx(target, abs=1e-9)

    def test_fit_reaches_reporting_tolerance(self):
        fit = fit_capacity(reference_table(), TARGET_SCORES)
        assert fit.max_deviation <= 0.005

    def test_fitted_capacity_reproduces_the_ranks(self):
        fit = fit_capacity(reference_table(), TARGET_SCORES)
        ranked = rank_alternatives(reference_table(), fit.capacity)
        assert tuple(r.rank for r in ranked) == EXPECTED_RANKS

    def test_fitted_second_row_score(self):
        fit = fit_capacity(reference_table(), TARGET_SCORES)
        assert choquet((0.043, 0.592, 0.627), fit.capacity) == pytest.approx(0.329, abs=0.005)

    def test_fitted_shapley_sums_to_one(self):
        assert sum(shapley(fit_capacity(reference_table(), TARGET_SCORES).capacity).weights) == pytest.approx(
            1.0, abs=1e-9
        )

    def test_fit_values_sit_near_the_equation_solution(self):
        fit = fit_capacity(reference_table(), TARGET_SCORES)
        cap = fit.capacity
        assert cap.value(("Risk",)) == pytest.approx(0.41, abs=0.05)
        assert cap.value(("Cost", "Time")) == pytest.approx(0.51, abs=0.05)
        assert cap.value(("Risk", "Time")) == pytest.approx(0.92, abs=0.07)


class TestInfeasibleTargets:
    def test_targets_outside_row_bounds_cannot_be_met(self):
        table = EvaluationTable(
            RCT,
            ("A", "B"),
            ((0.6, 0.5, 0.4), (0.4, 0.5, 0.6)),
        )
        # Choquet scores are bounded by each row's min and max (0.4 and 0.6).
        targets = (0.9, 0.1)
        fit = fit_capacity(table, targets)
        assert fit.max_deviation >= 0.3 - 1e-9
        assert not fit.feasible(0.25)

    def test_targets_must_be_in_unit_interval(self):
        with pytest.raises(Exception):
            fit_capacity(reference_table(), (1.2, 0.3, 0.2, 0.1))


class TestResolution:
    def test_returned_values_are_quantized(self):
        fit = fit_capacity(reference_table(), TARGET_SCORES, resolution=0.001)
        for mask in range(1, 7):
            v = fit.capacity.values[mask]
            assert round(v * 1000) == pytest.approx(v * 1000, abs=1e-6)
