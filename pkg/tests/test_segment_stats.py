"""Exact combinatorial model versus brute-force placement enumeration."""

import random
from fractions import Fraction
from math import comb

import pytest

from gridscroll.errors import DomainError
from gridscroll.segment_stats import (
    SegmentModel,
    interpolate_key,
    interpolate_position,
)

from oracle_helpers import (
    enumerate_placements,
    exact_mean_and_variance,
    rows_below,
)


class TestTotalPlacements:
    def test_small_case_against_enumeration(self):
        model = SegmentModel(0, 6, 3)
        placements = list(enumerate_placements(6, 3))
        assert model.total_placements() == len(placements) == comb(5, 2) == 10

    def test_single_interior_position(self):
        assert SegmentModel(0, 9, 1).total_placements() == 1

    def test_wide_segment(self):
        assert SegmentModel(0, 60, 6).total_placements() == comb(59, 5)

    def test_translation_invariance(self):
        assert (
            SegmentModel(100, 160, 6).total_placements()
            == SegmentModel(0, 60, 6).total_placements()
        )

    def test_invalid_models(self):
        with pytest.raises(DomainError):
            SegmentModel(5, 5, 1)
        with pytest.raises(DomainError):
            SegmentModel(0, 3, 4)
        with pytest.raises(DomainError):
            SegmentModel(0, 3, 0)


class TestPlacementsThrough:
    def test_sum_identity_per_key(self):
        model = SegmentModel(0, 6, 3)
        for key in range(1, 7):
            total = sum(
                model.placements_through(key, position) for position in range(1, 4)
            )
            assert total == model.total_placements()

    def test_counts_match_enumeration(self):
        for span, max_position in ((6, 3), (7, 2), (5, 4)):
            model = SegmentModel(0, span, max_position)
            placements = list(enumerate_placements(span, max_position))
            for key in range(1, span + 1):
                for position in range(1, max_position + 1):
                    expected = sum(
                        1 for p in placements if rows_below(p, key) == position
                    )
                    assert model.placements_through(key, position) == expected

    def test_first_interior_key_pins_row_one(self):
        model = SegmentModel(0, 6, 3)
        assert model.placements_through(1, 1) == model.total_placements()

    def test_unreachable_position_counts_zero(self):
        model = SegmentModel(0, 10, 4)
        assert model.placements_through(2, 3) == 0  # 3 rows cannot fit below key 2


class TestExpectedPosition:
    def test_worked_example(self):
        model = SegmentModel(0, 60, 6)
        assert model.expected_position(31) == Fraction(209, 59)
        assert float(model.expected_position(31)) == pytest.approx(3.542, abs=1e-3)

    def test_segment_ends(self):
        model = SegmentModel(0, 60, 6)
        assert model.expected_position(0) == 0
        assert model.expected_position(60) == 6

    def test_matches_enumeration_mean(self):
        for span, max_position in ((6, 3), (9, 2), (8, 4)):
            model = SegmentModel(0, span, max_position)
            placements = list(enumerate_placements(span, max_position))
            for key in range(1, span + 1):
                mean, _ = exact_mean_and_variance(placements, key)
                assert model.expected_position(key) == mean


class TestPositionVariance:
    def test_zero_at_both_ends(self):
        model = SegmentModel(0, 60, 6)
        assert model.position_variance(1) == 0
        assert model.position_variance(60) == 0

    def test_matches_enumeration_exactly(self):
        model = SegmentModel(0, 12, 4)
        placements = list(enumerate_placements(12, 4))
        for key in range(1, 13):
            _, variance = exact_mean_and_variance(placements, key)
            assert model.position_variance(key) == variance

    def test_full_segment_has_no_freedom(self):
        model = SegmentModel(0, 4, 4)
        for key in range(1, 5):
            assert model.position_variance(key) == 0


class TestExpectedKey:
    def test_formula_endpoints(self):
        model = SegmentModel(10, 70, 6)
        assert model.expected_key(1) == 11
        assert model.expected_key(6) == 70
        assert model.expected_key(0) == 10

    def test_degenerate_single_position(self):
        assert SegmentModel(0, 9, 1).expected_key(1) == 9

    def test_mutual_inverse_on_rational_grid(self):
        model = SegmentModel(0, 60, 6)
        for numerator in range(8, 48):
            position = Fraction(numerator, 8)  # 1.0 .. 6.0 in eighths
            key = model.expected_key(position)
            assert model.expected_position(key) == position


class TestParallelogramContainment:
    def test_every_placement_stays_inside_the_bounds(self):
        for span, max_position in ((10, 4), (7, 3)):
            for placement in enumerate_placements(span, max_position):
                for key in range(1, span + 1):
                    rows = rows_below(placement, key)
                    assert rows >= max(1, max_position - (span - key))
                    assert rows <= min(max_position, key)


class TestRoundedInterpolants:
    def test_worked_key_example(self):
        assert interpolate_key(0, 60, 6, 3) == 25  # round(24.6)
        assert interpolate_key(0, 60, 6, 1) == 1
        assert interpolate_key(0, 60, 6, 0) == 0
        assert interpolate_key(0, 60, 6, 6) == 60

    def test_worked_position_example(self):
        assert interpolate_position(0, 60, 6, 31) == 4  # round(209/59)
        assert interpolate_position(0, 60, 6, 0) == 0
        assert interpolate_position(0, 60, 6, 60) == 6

    def test_rounding_is_half_up_of_exact_value(self):
        rng = random.Random(5)
        for _ in range(500):
            span = rng.randint(2, 10**6)
            max_position = rng.randint(1, span)
            model = SegmentModel(0, span, max_position)
            position = rng.randint(1, max_position)
            exact = model.expected_key(position)
            half_up = (2 * exact.numerator + exact.denominator) // (
                2 * exact.denominator
            )
            assert interpolate_key(0, span, max_position, position) == min(
                max(half_up, 1), span
            )
            key = rng.randint(1, span)
            exact = model.expected_position(key)
            half_up = (2 * exact.numerator + exact.denominator) // (
                2 * exact.denominator
            )
            assert interpolate_position(0, span, max_position, key) == min(
                max(half_up, 0), max_position
            )
