import math

import pytest

from dacsearch.metrics import (
    best_as,
    coverage,
    domain_score,
    guidance_score,
    quality_score,
    speed_score,
    switch_frequency,
    usage_quarters,
)


class TestGuidance:
    def test_anchors(self):
        assert guidance_score(1, solved=True) == 1.0
        assert guidance_score(10**6, solved=True) == 0.0
        assert guidance_score(10**3, solved=True) == pytest.approx(0.5)

    def test_unsolved_and_over_budget(self):
        assert guidance_score(5, solved=False) == 0.0
        assert guidance_score(10**6 + 1, solved=True) == 0.0

    def test_zero_expansions_counts_as_immediate(self):
        assert guidance_score(0, solved=True) == 1.0

    def test_monotone_in_expansions(self):
        values = [guidance_score(e) for e in (1, 10, 100, 10**4, 10**6)]
        assert all(a >= b for a, b in zip(values, values[1:]))


class TestSpeed:
    def test_anchors(self):
        assert speed_score(1.0, solved=True) == 1.0
        assert speed_score(300.0, solved=True) == 0.0
        assert speed_score(math.sqrt(300.0), solved=True) == pytest.approx(0.5)

    def test_unsolved(self):
        assert speed_score(0.5, solved=False) == 0.0

    def test_monotone_in_time(self):
        values = [speed_score(s) for s in (0.1, 1.0, 5.0, 60.0, 299.0)]
        assert all(a >= b for a, b in zip(values, values[1:]))


class TestQuality:
    def test_ratio(self):
        assert quality_score(10, 10) == 1.0
        assert quality_score(20, 10) == 0.5

    def test_zero_cost_plans(self):
        assert quality_score(0, 0) == 1.0

    def test_unsolved(self):
        assert quality_score(5, 5, solved=False) == 0.0

    def test_monotone_in_cost(self):
        values = [quality_score(c, 10) for c in (10, 12, 20, 50)]
        assert all(a >= b for a, b in zip(values, values[1:]))

    def test_inconsistent_baseline_rejected(self):
        with pytest.raises(ValueError):
            quality_score(5, 10)


class TestCoverage:
    def test_fractions(self):
        cov = coverage({"a": [True, True], "b": [False, False], "c": [True, False]})
        assert cov == {"a": 1.0, "b": 0.0, "c": 0.5}

    def test_domain_score_sums(self):
        assert domain_score({"a": 1.0, "b": 0.5}) == 1.5

    def test_no_runs_rejected(self):
        with pytest.raises(ValueError):
            coverage({"a": []})


class TestBestAs:
    def test_family_of_one_equals_member(self):
        scores = {"alt:01": {"x": 0.25, "y": 1.0}}
        assert best_as(scores) == scores["alt:01"]

    def test_oracle_takes_best_per_instance(self):
        scores = {
            "m1": {"x": 0.0, "y": 1.0},
            "m2": {"x": 1.0, "y": 0.0},
        }
        assert best_as(scores) == {"x": 1.0, "y": 1.0}

    def test_dominates_members_pointwise(self):
        scores = {
            "m1": {"x": 0.3, "y": 0.9, "z": 0.1},
            "m2": {"x": 0.8, "y": 0.2, "z": 0.1},
            "m3": {"x": 0.1, "y": 0.4, "z": 0.7},
        }
        oracle = best_as(scores)
        for member in scores.values():
            assert all(oracle[i] >= member[i] for i in member)

    def test_empty_family_rejected(self):
        with pytest.raises(ValueError):
            best_as({})

    def test_mismatched_instances_rejected(self):
        with pytest.raises(ValueError):
            best_as({"m1": {"x": 1.0}, "m2": {"y": 1.0}})


class TestUsageQuarters:
    def test_constant_trace(self):
        quarters = usage_quarters([1] * 8, 2)
        assert quarters == [[0.0, 1.0]] * 4

    def test_strict_alternation_of_two(self):
        quarters = usage_quarters([0, 1] * 4, 2)
        assert quarters == [[0.5, 0.5]] * 4

    def test_rows_sum_to_one(self):
        import random

        rng = random.Random(1)
        trace = [rng.randrange(3) for _ in range(17)]
        for row in usage_quarters(trace, 3):
            assert sum(row) == pytest.approx(1.0)

    def test_remainder_assigned_to_earlier_quarters(self):
        # length 6 -> quarter sizes 2, 2, 1, 1
        quarters = usage_quarters([0, 0, 1, 1, 0, 1], 2)
        assert quarters[0] == [1.0, 0.0]
        assert quarters[1] == [0.0, 1.0]
        assert quarters[2] == [1.0, 0.0]
        assert quarters[3] == [0.0, 1.0]

    def test_too_short_rejected(self):
        with pytest.raises(ValueError):
            usage_quarters([0, 1, 0], 2)


class TestSwitchFrequency:
    def test_strict_alternation_is_immediate(self):
        masses = switch_frequency([0, 1] * 50)
        assert masses["immediate"] == pytest.approx(1.0)

    def test_constant_long_trace_is_low(self):
        masses = switch_frequency([2] * 1500)
        assert masses["low"] == pytest.approx(1.0)

    def test_mixed_run_lengths(self):
        trace = [0] + [1] * 2 + [0] * 1500
        masses = switch_frequency(trace)
        total = 1503
        assert masses["immediate"] == pytest.approx(1 / total)
        assert masses["high"] == pytest.approx(2 / total)
        assert masses["low"] == pytest.approx(1500 / total)
        assert masses["medium"] == 0.0

    def test_class_boundaries(self):
        assert switch_frequency([0] * 100)["high"] == 1.0
        assert switch_frequency([0] * 101)["medium"] == 1.0
        assert switch_frequency([0] * 1000)["medium"] == 1.0
        assert switch_frequency([0] * 1001)["low"] == 1.0

    def test_empty_trace(self):
        masses = switch_frequency([])
        assert all(v == 0.0 for v in masses.values())

    def test_masses_sum_to_one(self):
        import random

        rng = random.Random(2)
        trace = [rng.randrange(2) for _ in range(997)]
        assert sum(switch_frequency(trace).values()) == pytest.approx(1.0)
