from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ietlab.errors import IdocFailure, InvalidIetError
from ietlab.iet import (
    Iet,
    Permutation,
    build_iet,
    check_idoc,
    golden_rotation,
    iet_from_text,
    iet_to_text,
    recurrence_constants,
    refined_partition,
)
from ietlab.scalar import ExactScalar

SQ5 = ExactScalar.sqrt(5)

ROT_THIRD = Iet([2, 1], ["2/3", "1/3"])
ROT_QUARTER = Iet([2, 1], ["3/4", "1/4"])
REVERSAL3 = Iet([3, 2, 1], ["1/2", "1/4", "1/4"])


def unit_points(denom_bits=16):
    return st.integers(0, 2**denom_bits - 1).map(lambda k: Fraction(k, 2**denom_bits))


class TestBuild:
    def test_rotation_by_third(self):
        assert ROT_THIRD.b == 2
        assert ROT_THIRD.betas[1] == Fraction(2, 3)

    def test_reducible_rejected(self):
        with pytest.raises(InvalidIetError, match="reducible"):
            build_iet([1, 2], ["1/2", "1/2"])
        with pytest.raises(InvalidIetError, match="reducible"):
            build_iet([2, 1, 3], ["1/3", "1/3", "1/3"])

    def test_bad_lengths_rejected(self):
        with pytest.raises(InvalidIetError, match="sum"):
            build_iet([2, 1], ["1/2", "1/3"])
        with pytest.raises(InvalidIetError, match="nonpositive"):
            build_iet([2, 1], ["3/2", "-1/2"])

    def test_three_interval_reversal(self):
        # Image intervals tile [0, 1): the slot starts are strictly increasing
        # and end at 1 exactly.
        starts = REVERSAL3._image_starts
        assert starts[0] == 0 and starts[-1] == 1
        assert all(starts[i] < starts[i + 1] for i in range(len(starts) - 1))

    def test_permutation_validation(self):
        with pytest.raises(InvalidIetError):
            Permutation([1, 1])
        assert Permutation([3, 1, 2]).inverse() == Permutation([2, 3, 1])


class TestEvaluate:
    def test_rotation_cases(self):
        assert ROT_THIRD.apply(0) == Fraction(1, 3)
        assert ROT_THIRD.apply("2/3") == 0

    def test_reversal_case(self):
        assert REVERSAL3.apply("1/2") == Fraction(1, 4)

    def test_out_of_range(self):
        with pytest.raises(ValueError):
            ROT_THIRD.apply(1)
        with pytest.raises(ValueError):
            ROT_THIRD.apply("-1/8")

    def test_inverse_cases(self):
        assert ROT_THIRD.invert(0) == Fraction(2, 3)
        assert REVERSAL3.invert("1/4") == Fraction(1, 2)

    @settings(max_examples=150)
    @given(unit_points())
    def test_round_trip(self, x):
        for t in (ROT_THIRD, REVERSAL3, golden_rotation()):
            y = t.apply(x)
            assert t.invert(y) == x
            assert t.apply(t.invert(x)) == x

    @settings(max_examples=100)
    @given(unit_points())
    def test_piecewise_translation_preserves_piece_length(self, x):
        t = REVERSAL3
        i = t.piece_index(ExactScalar(x))
        lo, hi = t.betas[i - 1], t.betas[i]
        assert lo + t.offsets[i - 1] == t.apply(lo)
        assert t.apply(x) - t.apply(lo) == ExactScalar(x) - lo
        assert hi - lo == t.lengths[i - 1]


class TestOrbit:
    def test_rotation_orbit(self):
        assert ROT_THIRD.orbit(0, 3) == [0, Fraction(1, 3), Fraction(2, 3)]

    def test_single_point(self):
        assert REVERSAL3.orbit("1/8", 1) == [Fraction(1, 8)]

    def test_golden_orbit(self):
        g = golden_rotation()
        expected = [
            ExactScalar(0),
            (SQ5 - 1) / 2,
            SQ5 - 2,
            (3 * SQ5 - 5) / 2,
        ]
        assert g.orbit(0, 4) == expected


class TestRefinedPartition:
    def test_golden_depth_one(self):
        points, eta, kappa = refined_partition(golden_rotation(), 1)
        assert points == [ExactScalar(0), (3 - SQ5) / 2, 3 - SQ5]
        assert eta == SQ5 - 2
        assert kappa == (3 - SQ5) / 2

    def test_rotation_third_depth_one(self):
        points, eta, kappa = refined_partition(ROT_THIRD, 1)
        assert points == [0, Fraction(1, 3), Fraction(2, 3)]
        assert eta == kappa == Fraction(1, 3)

    def test_monotone_refinement(self):
        g = golden_rotation()
        prev_eta = prev_kappa = None
        for n in range(1, 12):
            _, eta, kappa = refined_partition(g, n)
            if prev_eta is not None:
                assert eta <= prev_eta
                assert kappa <= prev_kappa
            prev_eta, prev_kappa = eta, kappa


class TestIdoc:
    def test_quarter_rotation_fails_at_four(self):
        assert check_idoc(ROT_QUARTER, 10) == 4

    def test_golden_passes(self):
        assert check_idoc(golden_rotation(), 2000) is None

    def test_shallow_depth_misses_failure(self):
        assert check_idoc(ROT_THIRD, 2) is None
        assert check_idoc(ROT_THIRD, 5) == 3


class TestRecurrenceConstants:
    def test_golden_constants_positive(self):
        rc = recurrence_constants(golden_rotation(), 100)
        assert rc.c3_est.sign() > 0
        assert rc.c2_est == rc.c3_est
        assert rc.c1_est >= rc.c2_est
        assert rc.delta * 4 == rc.c2_est

    def test_idoc_failure_propagates(self):
        with pytest.raises(IdocFailure):
            recurrence_constants(ROT_QUARTER, 10)

    @settings(max_examples=30, deadline=None)
    @given(unit_points(12), st.integers(2, 24))
    def test_orbit_separation(self, x, n):
        g = golden_rotation()
        _, eta, _ = refined_partition(g, n)
        pts = sorted(g.orbit(x, n))
        for a, b in zip(pts, pts[1:]):
            assert b - a >= eta


class TestSerialization:
    def test_round_trip(self):
        g = golden_rotation()
        assert iet_from_text(iet_to_text(g)) == g

    def test_canonical_bytes(self):
        text = iet_to_text(REVERSAL3)
        assert text == iet_to_text(iet_from_text(text))
        assert "permutation" in text and text.endswith("\n")
