"""Choquet aggregation, evaluation tables and ranking."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cplan.errors import DomainError, ValidationFailed
from cplan.mcdm import Capacity, CriteriaSet, EvaluationTable, choquet, rank_alternatives

from .fixtures import EXPECTED_RANKS, TARGET_SCORES, REFERENCE_ROWS, RCT, reference_table
from .oracles import choquet_by_hand
from .test_capacity import random_capacity


def random_profile(rng: np.random.Generator, n: int) -> list[float]:
    return [float(x) for x in rng.uniform(0, 1, n)]


class TestChoquet:
    def test_constant_profile_is_idempotent(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            cap = random_capacity(rng, RCT)
            assert choquet((0.4, 0.4, 0.4), cap) == pytest.approx(0.4, abs=1e-12)

    def test_min_capacity_takes_the_minimum_of_the_first_table_row(self):
        assert choquet((0.664, 0.042, 0.036), Capacity.minimum(RCT)) == pytest.approx(0.036, abs=1e-12)

    def test_additive_capacity_reduces_to_weighted_sum(self):
        cap = Capacity.additive(RCT, (0.5, 0.3, 0.2))
        assert choquet((1, 0, 0), cap) == pytest.approx(0.5, abs=1e-12)

    def test_mapping_input_is_keyed_by_criterion(self):
        cap = Capacity.additive(RCT, (0.5, 0.3, 0.2))
        assert choquet({"Time": 0.0, "Risk": 1.0, "Cost": 0.0}, cap) == pytest.approx(0.5, abs=1e-12)

    def test_values_outside_unit_interval_rejected(self):
        cap = Capacity.minimum(RCT)
        with pytest.raises(DomainError):
            choquet((1.2, 0.5, 0.5), cap)
        with pytest.raises(DomainError):
            choquet((-0.1, 0.5, 0.5), cap)

    def test_matches_hand_arithmetic_on_random_inputs(self):
        rng = np.random.default_rng(17)
        for _ in range(200):
            cap = random_capacity(rng, RCT)
            xs = random_profile(rng, 3)
            by_hand = choquet_by_hand(
                dict(zip(RCT.names, xs)),
                {frozenset(RCT.subset_of(mask)): cap.values[mask] for mask in range(8)},
            )
            assert choquet(xs, cap) == pytest.approx(by_hand, abs=1e-12)

    def test_bounded_by_min_and_max_of_inputs(self):
        rng = np.random.default_rng(19)
        for _ in range(300):
            cap = random_capacity(rng, RCT)
            xs = random_profile(rng, 3)
            score = choquet(xs, cap)
            assert min(xs) - 1e-12 <= score <= max(xs) + 1e-12
        xs = (0.8, 0.2, 0.5)
        assert choquet(xs, Capacity.minimum(RCT)) == pytest.approx(min(xs), abs=1e-12)
        assert choquet(xs, Capacity.maximum(RCT)) == pytest.approx(max(xs), abs=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(min_value=0, max_value=2**31 - 1), st.integers(min_value=0, max_value=2))
    def test_monotone_in_every_coordinate(self, seed, index):
        rng = np.random.default_rng(seed)
        cap = random_capacity(rng, RCT)
        xs = random_profile(rng, 3)
        bumped = list(xs)
        bumped[index] = min(1.0, bumped[index] + float(rng.uniform(0, 1 - bumped[index] + 1e-9)))
        assert choquet(bumped, cap) >= choquet(xs, cap) - 1e-12

    def test_tied_values_contribute_independently_of_tie_order(self):
        rng = np.random.default_rng(47)
        for _ in range(50):
            cap = random_capacity(rng, RCT)
            # With Risk and Cost tied the score reduces to a closed form in
            # which the tie resolution cancels out.
            expected = 0.2 * 1.0 + 0.3 * cap.value(("Risk", "Cost"))
            assert choquet((0.5, 0.5, 0.2), cap) == pytest.approx(expected, abs=1e-12)

    def test_comonotonic_additivity(self):
        rng = np.random.default_rng(23)
        for _ in range(200):
            cap = random_capacity(rng, RCT)
            base = np.sort(rng.uniform(0, 0.5, 3))
            order = rng.permutation(3)
            f = np.empty(3)
            g = np.empty(3)
            f[order] = base
            g[order] = np.sort(rng.uniform(0, 0.5, 3))  # same sort order as f
            total = choquet((f + g).tolist(), cap)
            assert total == pytest.approx(choquet(f.tolist(), cap) + choquet(g.tolist(), cap), abs=1e-12)


class TestEvaluationTable:
    def test_reference_columns_are_stochastic(self):
        table = reference_table()
        for j in range(3):
            assert sum(row[j] for row in table.rows) == pytest.approx(1.0, abs=1e-6)

    def test_column_sum_violation_rejected(self):
        with pytest.raises(ValidationFailed, match="sums to"):
            EvaluationTable(RCT, ("A", "B"), ((0.7, 0.5, 0.5), (0.2, 0.5, 0.5)))

    def test_values_outside_unit_interval_rejected(self):
        with pytest.raises(ValidationFailed):
            EvaluationTable(RCT, ("A", "B"), ((1.2, 0.5, 0.5), (-0.2, 0.5, 0.5)))

    def test_duplicate_alternatives_rejected(self):
        with pytest.raises(ValidationFailed):
            EvaluationTable(RCT, ("A", "A"), ((0.5, 0.5, 0.5), (0.5, 0.5, 0.5)))


class TestRanking:
    def test_identical_rows_tie_break_by_alternative_id(self):
        table = EvaluationTable(RCT, ("S2", "S1", "S3"), (((1 / 3),) * 3,) * 3)
        ranked = rank_alternatives(table, Capacity.minimum(RCT))
        by_alt = {r.alternative: r.rank for r in ranked}
        assert by_alt == {"S1": 1, "S2": 2, "S3": 3}

    def test_single_alternative_gets_rank_one(self):
        table = EvaluationTable(RCT, ("S1",), ((1.0, 1.0, 1.0),))
        ranked = rank_alternatives(table, Capacity.minimum(RCT))
        assert ranked[0].rank == 1

    def test_target_scores_give_expected_ranks(self):
        # Rank the known scores directly through an additive capacity by
        # using the scores themselves as a single synthetic criterion setup:
        # here we simply check the ordering contract on the fixture scores.
        order = sorted(range(4), key=lambda i: (-TARGET_SCORES[i], f"S{i + 1}"))
        ranks = [0] * 4
        for pos, i in enumerate(order):
            ranks[i] = pos + 1
        assert ranks == list(EXPECTED_RANKS)

    def test_criteria_mismatch_rejected(self):
        other = CriteriaSet(("a", "b", "c"))
        table = EvaluationTable(other, ("S1",), ((1.0, 1.0, 1.0),))
        with pytest.raises(ValidationFailed, match="mismatch"):
            rank_alternatives(table, Capacity.minimum(RCT))

    def test_relabeling_that_preserves_id_order_preserves_ranks(self):
        rng = np.random.default_rng(31)
        cap = random_capacity(rng, RCT)
        cols = rng.dirichlet(np.ones(4), size=3)
        rows = tuple(tuple(float(cols[j][k]) for j in range(3)) for k in range(4))
        original = rank_alternatives(EvaluationTable(RCT, ("S1", "S2", "S3", "S4"), rows), cap)
        relabeled = rank_alternatives(EvaluationTable(RCT, ("A1", "A2", "A3", "A4"), rows), cap)
        assert [r.rank for r in original] == [r.rank for r in relabeled]
        assert [r.score for r in original] == [r.score for r in relabeled]

    def test_ranks_are_a_permutation_and_nonincreasing_in_score(self):
        rng = np.random.default_rng(29)
        for _ in range(50):
            cap = random_capacity(rng, RCT)
            cols = rng.dirichlet(np.ones(4), size=3)  # 3 criteria columns over 4 alternatives
            rows = tuple(tuple(float(cols[j][k]) for j in range(3)) for k in range(4))
            table = EvaluationTable(RCT, ("S1", "S2", "S3", "S4"), rows)
            ranked = rank_alternatives(table, cap)
            assert sorted(r.rank for r in ranked) == [1, 2, 3, 4]
            by_rank = sorted(ranked, key=lambda r: r.rank)
            for first, second in zip(by_rank, by_rank[1:]):
                assert first.score >= second.score - 1e-12
