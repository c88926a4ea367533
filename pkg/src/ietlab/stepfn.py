"""Mean-zero step functions on [0, 1) in width/value coordinates.

A function with d discontinuities is stored as widths x_1..x_{d+1} summing
to 1 and values y_1..y_{d+1} with sum(x_i * y_i) = 0 and no equal adjacent
values.  The nudge perturbation moves one discontinuity and rebalances a
single value so the mean stays exactly zero.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .errors import (
    InvalidStepFunctionError,
    NudgeCollisionError,
    NudgeTooLargeError,
    SamplingCapExceeded,
)
from .scalar import ExactScalar, scalar

ScalarLike = Union[ExactScalar, int, Fraction, str]


class StepFunction:
    """Piecewise-constant, mean-zero function on [0, 1); immutable."""

    def __init__(self, widths: Sequence[ScalarLike], values: Sequence[ScalarLike]):
        widths = tuple(scalar(x) for x in widths)
        values = tuple(scalar(y) for y in values)
        if len(widths) != len(values):
            raise InvalidStepFunctionError("widths and values have different counts")
        if len(widths) < 2:
            raise InvalidStepFunctionError("need at least one discontinuity")
        for w in widths:
            if w.sign() <= 0:
                raise InvalidStepFunctionError(f"nonpositive width {w}")
        total = sum(widths, ExactScalar(0))
        if total != 1:
            raise InvalidStepFunctionError(f"widths sum to {total}, not 1")
        for i in range(len(values) - 1):
            if values[i] == values[i + 1]:
                raise InvalidStepFunctionError(f"equal adjacent values at pieces {i + 1}, {i + 2}")
        mean = sum((w * y for w, y in zip(widths, values)), ExactScalar(0))
        if mean != 0:
            raise InvalidStepFunctionError(f"mean is {mean}, not 0")
        self.widths = widths
        self.values = values
        cuts = []
        acc = ExactScalar(0)
        for w in widths[:-1]:
            acc = acc + w
            cuts.append(acc)
        self.discontinuities = tuple(cuts)
        self.min_width = min(widths)

    @property
    def d(self) -> int:
        return len(self.widths) - 1

    def piece_index(self, x: ScalarLike) -> int:
        """1-based index of the half-open piece containing x."""
        x = scalar(x)
        if x.sign() < 0 or x >= 1:
            raise ValueError(f"point {x} outside [0, 1)")
        i = 0
        while i < self.d and x >= self.discontinuities[i]:
            i += 1
        return i + 1

    def value_at(self, x: ScalarLike) -> ExactScalar:
        """Value on the half-open piece containing x."""
        return self.values[self.piece_index(x) - 1]

    def jumps(self) -> list[tuple[ExactScalar, ExactScalar]]:
        """Pairs (location, value change) at each discontinuity."""
        return [
            (self.discontinuities[i], self.values[i + 1] - self.values[i])
            for i in range(self.d)
        ]

    def value_bound(self) -> ExactScalar:
        return max(abs(y) for y in self.values)

    def __eq__(self, other):
        return (
            isinstance(other, StepFunction)
            and self.widths == other.widths
            and self.values == other.values
        )

    def __hash__(self):
        return hash((self.widths, self.values))

    def __repr__(self):
        ws = ", ".join(str(w) for w in self.widths)
        ys = ", ".join(str(y) for y in self.values)
        return f"StepFunction([{ws}]; [{ys}])"


def build_step(widths: Sequence[ScalarLike], values: Sequence[ScalarLike]) -> StepFunction:
    return StepFunction(widths, values)


def distance(f: StepFunction, g: StepFunction) -> ExactScalar:
    """Sup metric over the 2d+2 width/value coordinates."""
    if f.d != g.d:
        raise InvalidStepFunctionError("discontinuity counts differ")
    best = ExactScalar(0)
    for a, b in zip(f.widths + f.values, g.widths + g.values):
        gap = abs(a - b)
        if gap > best:
            best = gap
    return best


def nudge(f: StepFunction, i: int, zeta: ScalarLike) -> StepFunction:
    """Move the i-th discontinuity by zeta, rebalancing the next value.

    Requires |zeta| < min_width / 2.  Only widths i, i+1 and value i+1
    change; the mean stays exactly zero.  A result with equal adjacent
    values raises ``NudgeCollisionError`` (the caller may retry with a
    different zeta).
    """
    if not 1 <= i <= f.d:
        raise ValueError(f"discontinuity index {i} outside 1..{f.d}")
    zeta = scalar(zeta)
    if abs(zeta) * 2 >= f.min_width:
        raise NudgeTooLargeError(f"|zeta| = {abs(zeta)} is not below half of {f.min_width}")
    if not zeta:
        return f
    widths = list(f.widths)
    values = list(f.values)
    xi1 = widths[i]  # width i+1, zero-based slot i
    widths[i - 1] = widths[i - 1] + zeta
    widths[i] = xi1 - zeta
    values[i] = (values[i] * xi1 - zeta * values[i - 1]) / (xi1 - zeta)
    try:
        return StepFunction(widths, values)
    except InvalidStepFunctionError as exc:
        raise NudgeCollisionError(str(exc)) from exc


@dataclass(frozen=True)
class BoundedFamily:
    """Mean-zero step functions with d discontinuities and |values| <= bound."""

    d: int
    bound: ExactScalar

    def __post_init__(self):
        if self.d < 1:
            raise InvalidStepFunctionError("need d >= 1")
        object.__setattr__(self, "bound", scalar(self.bound))
        if self.bound.sign() <= 0:
            raise InvalidStepFunctionError("value bound must be positive")


def sample_step(
    family: BoundedFamily,
    seed: int,
    grain_bits: int = 16,
    min_jump: ScalarLike = 0,
    max_attempts: int = 1000,
) -> StepFunction:
    """Seeded random member of the family, with dyadic-rational coordinates.

    Widths come from normalized positive dyadics; values are uniform dyadics
    in [-bound, bound], shifted by the exact weighted mean so the result has
    mean zero.  Draws violating the value bound, an adjacent-value tie, or a
    configured minimum jump size are rejected and retried.
    """
    rng = random.Random(seed)
    n = family.d + 1
    grain = 2**grain_bits
    bound = family.bound
    min_jump = scalar(min_jump)
    for _ in range(max_attempts):
        raw_widths = [Fraction(rng.randrange(1, grain), grain) for _ in range(n)]
        total = sum(raw_widths)
        widths = [ExactScalar(w / total) for w in raw_widths]
        raw_values = [
            bound * Fraction(rng.randrange(-grain, grain + 1), grain) for _ in range(n)
        ]
        mean = sum((w * y for w, y in zip(widths, raw_values)), ExactScalar(0))
        values = [y - mean for y in raw_values]
        if any(abs(y) > bound for y in values):
            continue
        if any(
            abs(values[i + 1] - values[i]) <= min_jump if min_jump else values[i + 1] == values[i]
            for i in range(n - 1)
        ):
            continue
        return StepFunction(widths, values)
    raise SamplingCapExceeded(f"no admissible draw in {max_attempts} attempts (seed {seed})")


def step_to_text(f: StepFunction) -> str:
    """Canonical JSON text with exact width and value strings."""
    payload = {
        "widths": [str(w) for w in f.widths],
        "values": [str(y) for y in f.values],
    }
    return json.dumps(payload, sort_keys=True, separators=(", ", ": ")) + "\n"


def step_from_text(text: str) -> StepFunction:
    payload = json.loads(text)
    return StepFunction(payload["widths"], payload["values"])
