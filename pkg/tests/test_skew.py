from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ietlab.errors import WindowEscape
from ietlab.iet import Iet, golden_rotation
from ietlab.lowering import OrbitKernel
from ietlab.scalar import ExactScalar
from ietlab.skew import (
    SkewState,
    Window,
    birkhoff_sums,
    collar_mass,
    empirical_measure,
    induced_step,
    measure_convergence,
    skew_step,
    visit_count,
)
from ietlab.stepfn import StepFunction

ROT_THIRD = Iet([2, 1], ["2/3", "1/3"])
F_HALF = StepFunction(["1/2", "1/2"], [1, -1])


def dyadics(bits=10):
    return st.integers(0, 2**bits - 1).map(lambda k: ExactScalar(Fraction(k, 2**bits)))


class TestSkewStep:
    def test_single_step(self):
        s = skew_step(ROT_THIRD, F_HALF, SkewState(0, 0))
        assert s == SkewState(Fraction(1, 3), 1)

    def test_three_steps(self):
        s = SkewState(0, 0)
        seen = []
        for _ in range(3):
            s = skew_step(ROT_THIRD, F_HALF, s)
            seen.append(s)
        assert seen == [
            SkewState(Fraction(1, 3), 1),
            SkewState(Fraction(2, 3), 2),
            SkewState(0, 1),
        ]

    @settings(max_examples=50)
    @given(dyadics(), st.integers(-5, 5))
    def test_vertical_equivariance(self, x, v):
        a = skew_step(ROT_THIRD, F_HALF, SkewState(x, 0))
        b = skew_step(ROT_THIRD, F_HALF, SkewState(x, v))
        assert b.x == a.x
        assert b.t - a.t == v


class TestBirkhoff:
    def test_rotation_sums(self):
        assert birkhoff_sums(ROT_THIRD, F_HALF, 0, 3) == [0, 1, 2, 1]

    def test_single(self):
        assert birkhoff_sums(ROT_THIRD, F_HALF, "1/8", 1)[1] == F_HALF.value_at("1/8")

    def test_cocycle_identity(self):
        g = golden_rotation()
        sums = birkhoff_sums(g, F_HALF, "1/8", 40)
        s = SkewState("1/8", "1/4")
        for n in range(1, 41):
            s = skew_step(g, F_HALF, s)
            assert s.t == ExactScalar("1/4") + sums[n]

    def test_golden_pilot_bound(self):
        # Desk-scale bound used by downstream experiment expectations.
        g = golden_rotation()
        x0 = ExactScalar("1/10")
        kern = OrbitKernel(g, F_HALF, extra_x=[x0])
        sums = kern.sums_at_checkpoints(kern.lower_x(x0), list(range(1, 100001)))
        assert max(abs(p) for p, _ in sums) <= 40 * kern.t_den


class TestVisitCount:
    def test_rotation_window(self):
        # Sums along 0 -> 1/3 -> 2/3 -> .. are 0,1,2,1,2,3; five of the six
        # stay within [-2, 2].
        assert visit_count(ROT_THIRD, F_HALF, 0, 0, 2, 6) == 5

    def test_brute_force_agreement(self):
        sums = birkhoff_sums(ROT_THIRD, F_HALF, 0, 5)
        brute = sum(1 for s in sums[:6] if abs(s) <= 2)
        assert visit_count(ROT_THIRD, F_HALF, 0, 0, 2, 6) == brute

    def test_window_never_exited(self):
        assert visit_count(golden_rotation(), F_HALF, "1/8", 0, 1000, 50) == 50

    def test_window_unreachable(self):
        assert visit_count(golden_rotation(), F_HALF, "1/8", 100, 10, 50) == 0


class TestInducedStep:
    def test_immediate_return(self):
        state, n = induced_step(ROT_THIRD, F_HALF, 1, SkewState("2/3", 0))
        assert (state, n) == (SkewState(0, -1), 1)

    def test_boundary_counts_as_inside(self):
        # The closed window keeps t = 1 inside, so the return is immediate.
        state, n = induced_step(ROT_THIRD, F_HALF, 1, SkewState(0, 0))
        assert (state, n) == (SkewState(Fraction(1, 3), 1), 1)

    def test_excursion(self):
        # From (0, 1) with B = 2 the path 2, 3, 2 re-enters at n = 3.
        state, n = induced_step(ROT_THIRD, F_HALF, 2, SkewState(0, 1))
        assert n == 1 and state.t == 2
        state, n = induced_step(ROT_THIRD, F_HALF, 2, state)
        assert n == 2 and state == SkewState(0, 3 - 1)

    def test_outside_window_rejected(self):
        with pytest.raises(ValueError):
            induced_step(ROT_THIRD, F_HALF, 1, SkewState(0, 5))

    def test_drift_escapes(self):
        # Mean-zero violation (bypassing validation) gives linear drift and
        # a cap hit instead of a return.
        bad = StepFunction.__new__(StepFunction)
        bad.widths = (ExactScalar("1/2"), ExactScalar("1/2"))
        bad.values = (ExactScalar(2), ExactScalar(1))
        bad.discontinuities = (ExactScalar("1/2"),)
        bad.min_width = ExactScalar("1/2")
        with pytest.raises(WindowEscape):
            # Starting at the window top, the positive drift never re-enters.
            induced_step(golden_rotation(), bad, 5, SkewState("1/8", 5), cap=200)
        s = SkewState("1/8", 0)
        for _ in range(100):
            s = skew_step(golden_rotation(), bad, s)
        assert s.t > 100  # |t| drifts linearly

    def test_vertical_shift_same_x(self):
        a, na = induced_step(golden_rotation(), F_HALF, 50, SkewState("1/8", 0))
        b, nb = induced_step(golden_rotation(), F_HALF, 50, SkewState("1/8", 3))
        assert na == nb and a.x == b.x and b.t - a.t == 3


class TestEmpiricalMeasure:
    def test_total_count(self):
        m = empirical_measure(golden_rotation(), F_HALF, 2, SkewState(0, 0), 120, grid=(3, 4))
        assert sum(map(sum, m.counts)) == 120

    def test_integer_sums_land_in_integer_rows(self):
        # Vertical values are integers, so rows not containing an integer
        # stay empty (B = 1, six rows of height 1/3).
        m = empirical_measure(golden_rotation(), F_HALF, 1, SkewState(0, 0), 300, grid=(3, 6))
        rows = m.t_row_masses()
        assert rows[1] == rows[2] == rows[4] == 0
        assert sum(rows) == 1

    def test_bad_n_rejected(self):
        with pytest.raises(ValueError):
            empirical_measure(golden_rotation(), F_HALF, 1, SkewState(0, 0), 0)


class TestCollar:
    def test_full_collar_is_everything(self):
        m = empirical_measure(golden_rotation(), F_HALF, 2, SkewState(0, 0), 60, grid=(2, 4))
        assert collar_mass(m, 2) == 1

    def test_interior_mass_gives_zero(self):
        m = empirical_measure(golden_rotation(), F_HALF, 10, SkewState(0, 0), 60, grid=(2, 10))
        assert collar_mass(m, 1) == 0

    def test_range_validation(self):
        m = empirical_measure(golden_rotation(), F_HALF, 2, SkewState(0, 0), 10)
        with pytest.raises(ValueError):
            collar_mass(m, 3)
        with pytest.raises(ValueError):
            collar_mass(m, 0)


def test_measure_convergence_diagnostic():
    diags = measure_convergence(
        golden_rotation(), F_HALF, 2, SkewState(0, 0), [50, 100, 200], grid=(2, 4)
    )
    assert [n for n, _ in diags] == [100, 200]
    assert all(0 <= gap <= 1 for _, gap in diags)


def test_window_contains():
    w = Window(ExactScalar(2))
    assert w.contains(SkewState(0, 2)) and w.contains(SkewState(0, -2))
    assert not w.contains(SkewState(0, "5/2"))
