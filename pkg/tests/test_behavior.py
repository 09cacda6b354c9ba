import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from antstream.behavior import (
    NeighborhoodAssessment,
    ThresholdParams,
    assess_neighborhood,
    count_factor,
    drop_factor,
    drop_probability,
    pick_factor,
    pick_probability,
    response_threshold,
)
from antstream.habitat import Grid, Position

P = ThresholdParams()


class TestResponseThreshold:
    def test_half_response_at_threshold(self):
        assert response_threshold(5.0, 5.0, 2.0) == pytest.approx(0.5, abs=1e-12)

    def test_zero_stimulus(self):
        assert response_threshold(0.0, 5.0, 2.0) == 0.0

    def test_hand_value(self):
        assert response_threshold(10.0, 5.0, 2.0) == pytest.approx(0.8, abs=1e-12)

    def test_negative_stimulus_rejected(self):
        with pytest.raises(ValueError):
            response_threshold(-1.0, 5.0, 2.0)

    @given(st.floats(0, 1e6, allow_nan=False))
    def test_range_is_unit_interval(self, s):
        v = response_threshold(s, 5.0, 2.0)
        assert 0.0 <= v < 1.0

    def test_strictly_increasing(self):
        values = [response_threshold(s, 5.0, 2.0) for s in np.linspace(0, 50, 200)]
        assert all(b > a for a, b in zip(values, values[1:]))


class TestCountFactor:
    def test_half_at_five(self):
        assert count_factor(5, P) == pytest.approx(0.5, abs=1e-12)

    def test_zero_at_zero(self):
        assert count_factor(0, P) == 0.0

    def test_nine_items(self):
        assert count_factor(9, P) == pytest.approx(81.0 / 106.0, abs=1e-9)


class TestSimilarityFactors:
    def test_drop_factor_identical_items(self):
        assert drop_factor(0.0, 0.1) == pytest.approx(1.0, abs=1e-12)

    def test_drop_factor_at_scale(self):
        assert drop_factor(0.1, 0.1) == pytest.approx(0.25, abs=1e-12)

    def test_drop_factor_max_distance(self):
        assert drop_factor(1.0, 0.1) == pytest.approx((0.1 / 1.1) ** 2, abs=1e-9)

    def test_pick_factor_perfectly_placed(self):
        assert pick_factor(0.0, 0.15) == 0.0

    def test_pick_factor_at_scale(self):
        assert pick_factor(0.15, 0.15) == pytest.approx(0.25, abs=1e-12)

    def test_pick_factor_max_distance(self):
        assert pick_factor(1.0, 0.15) == pytest.approx((1.0 / 1.15) ** 2, abs=1e-9)

    @given(st.floats(0.0, 1.0, allow_nan=False))
    def test_factors_stay_in_unit_interval(self, d):
        assert 0.0 <= drop_factor(d, 0.1) <= 1.0
        assert 0.0 <= pick_factor(d, 0.15) <= 1.0

    def test_monotonicity(self):
        ds = np.linspace(0, 1, 100)
        drops = [drop_factor(d, 0.1) for d in ds]
        picks = [pick_factor(d, 0.15) for d in ds]
        assert all(b < a for a, b in zip(drops, drops[1:]))
        assert all(b > a for a, b in zip(picks, picks[1:]))


class TestCompositions:
    def test_pick_lone_dissimilar_item(self):
        a = NeighborhoodAssessment(0, 1.0)
        assert pick_probability(a, P) == pytest.approx((1.0 / 1.15) ** 2, abs=1e-6)

    def test_pick_zero_distance_is_never(self):
        for count in range(10):
            assert pick_probability(NeighborhoodAssessment(count, 0.0), P) == 0.0

    def test_pick_product_composition(self):
        # chi = 0.5 at count 5; choose d so pick_factor = 0.5
        d = 0.15 / (math.sqrt(2.0) - 1.0)
        a = NeighborhoodAssessment(5, d)
        assert pick_probability(a, P) == pytest.approx(0.25, abs=1e-6)

    def test_drop_in_a_void_is_never(self):
        assert drop_probability(NeighborhoodAssessment(0, 1.0), P) == 0.0

    def test_drop_at_threshold_identical(self):
        assert drop_probability(NeighborhoodAssessment(5, 0.0), P) == pytest.approx(0.5, abs=1e-6)

    def test_drop_crowded_dissimilar(self):
        a = NeighborhoodAssessment(9, 1.0)
        expected = (81.0 / 106.0) * (0.1 / 1.1) ** 2
        assert drop_probability(a, P) == pytest.approx(expected, abs=1e-6)

    @given(st.integers(0, 9), st.floats(0, 1, allow_nan=False))
    def test_probabilities_in_unit_interval(self, count, d):
        a = NeighborhoodAssessment(count, d)
        assert 0.0 <= pick_probability(a, P) <= 1.0
        assert 0.0 <= drop_probability(a, P) <= 1.0


class TestAssessNeighborhood:
    def make_features(self):
        return np.array(
            [
                [0.0, 0.0],
                [0.0, 0.0],
                [1.0, 1.0],
                [0.5, 0.0],
                [0.0, 0.0],
            ]
        )

    def test_empty_region_convention(self):
        grid = Grid(9, 9)
        grid.place(0, Position(4, 4))
        a = assess_neighborhood(Position(4, 4), 0, grid, self.make_features())
        assert a == NeighborhoodAssessment(0, 1.0)

    def test_identical_copies(self):
        grid = Grid(9, 9)
        feats = self.make_features()
        grid.place(0, Position(4, 4))
        grid.place(1, Position(3, 4))
        grid.place(4, Position(5, 4))
        a = assess_neighborhood(Position(4, 4), 0, grid, feats)
        assert a.object_count == 2
        assert a.pair_distance == 0.0

    def test_focal_item_excluded_from_count(self):
        grid = Grid(9, 9)
        grid.place(0, Position(4, 4))
        grid.place(2, Position(4, 3))
        a = assess_neighborhood(Position(4, 4), 0, grid, self.make_features())
        assert a.object_count == 1

    @pytest.mark.parametrize("rule", ["max", "min", "mean"])
    def test_four_item_fixture_against_brute_force(self, rule):
        grid = Grid(9, 9)
        feats = self.make_features()
        positions = {0: (4, 4), 1: (3, 3), 2: (5, 5), 3: (4, 5)}
        for item, (x, y) in positions.items():
            grid.place(item, Position(x, y))
        a = assess_neighborhood(Position(4, 4), 0, grid, feats, rule)

        # brute force: all focal-relative normalized distances in the region
        dists = []
        for other in (1, 2, 3):
            s = sum((feats[0][i] - feats[other][i]) ** 2 for i in range(2))
            dists.append(math.sqrt(s / 2))
        expected = {"max": max(dists), "min": min(dists), "mean": sum(dists) / 3}[rule]
        assert a.object_count == 3
        assert a.pair_distance == pytest.approx(expected, abs=1e-12)

    def test_unknown_rule_rejected(self):
        grid = Grid(9, 9)
        with pytest.raises(ValueError):
            assess_neighborhood(Position(4, 4), 0, grid, self.make_features(), "median")


def test_threshold_params_validation():
    with pytest.raises(ValueError):
        ThresholdParams(theta_count=0)
    with pytest.raises(ValueError):
        ThresholdParams(steepness=1.0)
    with pytest.raises(ValueError):
        ThresholdParams(k1=0.0)
