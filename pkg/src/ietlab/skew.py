"""The skew product (x, t) -> (Tx, t + f(x)) and its window dynamics.

The vertical window [-B, B] is closed: boundary states count as inside.
First returns to the window are computed by direct iteration with a cap,
since recurrence is an almost-everywhere statement; hitting the cap is a
distinguishable outcome (``WindowEscape``), not a crash.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .errors import WindowEscape
from .iet import Iet
from .lowering import OrbitKernel
from .scalar import ExactScalar, scalar
from .stepfn import StepFunction

ScalarLike = Union[ExactScalar, int, Fraction, str]


@dataclass(frozen=True)
class SkewState:
    """A point of [0, 1) x R carried by the skew product."""

    x: ExactScalar
    t: ExactScalar

    def __post_init__(self):
        object.__setattr__(self, "x", scalar(self.x))
        object.__setattr__(self, "t", scalar(self.t))
        if self.x.sign() < 0 or self.x >= 1:
            raise ValueError(f"horizontal coordinate {self.x} outside [0, 1)")


@dataclass(frozen=True)
class Window:
    """The box [0, 1) x [-radius, radius]."""

    radius: ExactScalar

    def __post_init__(self):
        object.__setattr__(self, "radius", scalar(self.radius))
        if self.radius.sign() <= 0:
            raise ValueError("window radius must be positive")

    def contains(self, s: SkewState) -> bool:
        return abs(s.t) <= self.radius


def skew_step(iet: Iet, f: StepFunction, s: SkewState) -> SkewState:
    """One application: (x, t) -> (Tx, t + f(x)), exact."""
    return SkewState(iet.apply(s.x), s.t + f.value_at(s.x))


def birkhoff_sums(iet: Iet, f: StepFunction, x: ScalarLike, n: int) -> list[ExactScalar]:
    """Partial sums S_0 = 0, S_1, .., S_n of f along the orbit of x."""
    if n < 1:
        raise ValueError("need n >= 1")
    x = scalar(x)
    sums = [ExactScalar(0)]
    acc = ExactScalar(0)
    for _ in range(n):
        acc = acc + f.value_at(x)
        sums.append(acc)
        x = iet.apply(x)
    return sums


def visit_count(
    iet: Iet,
    f: StepFunction,
    x: ScalarLike,
    t: ScalarLike,
    radius: ScalarLike,
    n: int,
) -> int:
    """Number of 0 <= m < n with t + S_m in the closed window [-radius, radius]."""
    if n < 1:
        raise ValueError("need n >= 1")
    x, t, radius = scalar(x), scalar(t), scalar(radius)
    kern = OrbitKernel(iet, f, extra_x=[x], extra_t=[t, radius])
    return kern.window_visit_count(kern.lower_x(x), kern.lower_t(t), kern.lower_t(radius), n)


def induced_step(
    iet: Iet,
    f: StepFunction,
    radius: ScalarLike,
    s: SkewState,
    cap: int = 10**6,
) -> tuple[SkewState, int]:
    """First return of the skew product to the window, with its return time.

    Raises ``WindowEscape`` when no return happens within cap iterations.
    """
    window = Window(scalar(radius))
    if not window.contains(s):
        raise ValueError(f"state with t = {s.t} starts outside the window")
    current = s
    for n in range(1, cap + 1):
        current = skew_step(iet, f, current)
        if window.contains(current):
            return current, n
    raise WindowEscape(cap)


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Box-count histogram of induced-orbit states over the window."""

    radius: ExactScalar
    nx: int
    nt: int
    counts: tuple[tuple[int, ...], ...]  # counts[ix][it]
    total: int

    def t_row_masses(self) -> list[Fraction]:
        return [
            Fraction(sum(self.counts[ix][it] for ix in range(self.nx)), self.total)
            for it in range(self.nt)
        ]


def empirical_measure(
    iet: Iet,
    f: StepFunction,
    radius: ScalarLike,
    s: SkewState,
    n: int,
    grid: tuple[int, int] = (10, 10),
    cap: int = 10**6,
) -> EmpiricalMeasure:
    """Histogram of the first n induced-orbit states on an nx-by-nt grid.

    Boxes are half-open except the top vertical row, which is closed at the
    window boundary.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    radius = scalar(radius)
    nx, nt = grid
    counts = [[0] * nt for _ in range(nx)]
    state = s
    for i in range(n):
        if i:
            state, _ = induced_step(iet, f, radius, state, cap)
        ix = (state.x * nx).floor()
        it = ((state.t + radius) * nt / (2 * radius)).floor()
        if it == nt:  # t == radius lands in the closed top row
            it = nt - 1
        counts[ix][it] += 1
    return EmpiricalMeasure(
        radius=radius,
        nx=nx,
        nt=nt,
        counts=tuple(tuple(row) for row in counts),
        total=n,
    )


def collar_mass(measure: EmpiricalMeasure, b: ScalarLike) -> Fraction:
    """Empirical fraction of mass in the top and bottom bands of height b.

    Counts every grid box whose vertical range meets the closed collar
    [-B, -B+b] union [B-b, B]; requires 0 < b <= B.
    """
    b = scalar(b)
    B = measure.radius
    if b.sign() <= 0 or b > B:
        raise ValueError("collar height must satisfy 0 < b <= B")
    nt = measure.nt
    hits = 0
    for it in range(nt):
        lo = B * Fraction(2 * it, nt)  # box bottom, measured from -B
        hi = B * Fraction(2 * (it + 1), nt)
        in_bottom = lo <= b
        in_top = hi > 2 * B - b
        if in_bottom or in_top:
            hits += sum(measure.counts[ix][it] for ix in range(measure.nx))
    return Fraction(hits, measure.total)


def measure_convergence(
    iet: Iet,
    f: StepFunction,
    radius: ScalarLike,
    s: SkewState,
    checkpoints: Sequence[int],
    grid: tuple[int, int] = (10, 10),
    cap: int = 10**6,
) -> list[tuple[int, Fraction]]:
    """Sup-norm gaps between successive normalized histograms.

    Reported per checkpoint as a uniformity diagnostic for the induced
    orbit; no genericity claim is attached.
    """
    checkpoints = sorted(set(checkpoints))
    radius = scalar(radius)
    nx, nt = grid
    counts = [[0] * nt for _ in range(nx)]
    state = s
    seen = 0
    prev = None
    out = []
    marks = list(checkpoints)
    for i in range(checkpoints[-1]):
        if i:
            state, _ = induced_step(iet, f, radius, state, cap)
        ix = (state.x * nx).floor()
        it = ((state.t + radius) * nt / (2 * radius)).floor()
        if it == nt:
            it = nt - 1
        counts[ix][it] += 1
        seen += 1
        if seen == marks[0]:
            marks.pop(0)
            freq = {
                (a, b2): Fraction(counts[a][b2], seen)
                for a in range(nx)
                for b2 in range(nt)
            }
            if prev is not None:
                sup = max(abs(freq[key] - prev[key]) for key in freq)
                out.append((seen, sup))
            prev = freq
            if not marks:
                break
    return out
