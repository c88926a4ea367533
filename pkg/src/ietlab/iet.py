"""Interval exchange transformations over exact scalars.

An exchange of b intervals is given by an irreducible permutation of
{1, .., b} and positive exact lengths summing to 1.  All intervals are
half-open [a, b); membership tests are exact comparisons.
"""

from __future__ import annotations

import bisect
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence, Union

from .errors import IdocFailure, InvalidIetError
from .scalar import ExactScalar, scalar

ScalarLike = Union[ExactScalar, int, Fraction, str]


class Permutation:
    """Bijection of {1, .., b} given by its sequence of images."""

    __slots__ = ("images",)

    def __init__(self, images: Iterable[int]):
        images = tuple(images)
        b = len(images)
        if b == 0 or sorted(images) != list(range(1, b + 1)):
            raise InvalidIetError(f"not a bijection of 1..{b}: {images}")
        object.__setattr__(self, "images", images)

    def __setattr__(self, name, value):
        raise AttributeError("Permutation is immutable")

    def __len__(self):
        return len(self.images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __eq__(self, other):
        return isinstance(other, Permutation) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __repr__(self):
        return f"Permutation({list(self.images)})"

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.images)
        for i, image in enumerate(self.images, start=1):
            inv[image - 1] = i
        return Permutation(inv)

    def is_irreducible(self) -> bool:
        running_max = 0
        for k, image in enumerate(self.images[:-1], start=1):
            running_max = max(running_max, image)
            if running_max == k:
                return False
        return True


class Iet:
    """An exchange of b half-open intervals of [0, 1), acting exactly."""

    def __init__(self, perm: Union[Permutation, Iterable[int]], lengths: Sequence[ScalarLike]):
        if not isinstance(perm, Permutation):
            perm = Permutation(perm)
        lengths = tuple(scalar(x) for x in lengths)
        if len(lengths) != len(perm):
            raise InvalidIetError("permutation size and length count differ")
        for lam in lengths:
            if lam.sign() <= 0:
                raise InvalidIetError(f"nonpositive length {lam}")
        total = sum(lengths, ExactScalar(0))
        if total != 1:
            raise InvalidIetError(f"lengths sum to {total}, not 1")
        if not perm.is_irreducible():
            raise InvalidIetError(f"reducible permutation {list(perm.images)}")

        self.perm = perm
        self.lengths = lengths
        b = len(lengths)
        # Left endpoints beta_0 = 0 < beta_1 < ... < beta_{b-1}, and beta_b = 1.
        betas = [ExactScalar(0)]
        for lam in lengths:
            betas.append(betas[-1] + lam)
        self.betas = tuple(betas)
        # Translation offset of interval i, and image slot bookkeeping.
        inv = perm.inverse()
        image_starts = [ExactScalar(0)]
        for s in range(1, b + 1):
            image_starts.append(image_starts[-1] + lengths[inv(s) - 1])
        offsets = []
        for i in range(1, b + 1):
            offsets.append(image_starts[perm(i) - 1] - betas[i - 1])
        self.offsets = tuple(offsets)
        self._image_starts = tuple(image_starts)
        self._slot_interval = tuple(inv(s) for s in range(1, b + 1))

    @property
    def b(self) -> int:
        return len(self.lengths)

    def discontinuities(self) -> tuple[ExactScalar, ...]:
        """Interior breakpoints beta_1 .. beta_{b-1}."""
        return self.betas[1:-1]

    def piece_index(self, x: ExactScalar) -> int:
        """1-based index i with x in [beta_{i-1}, beta_i)."""
        if x.sign() < 0 or x >= 1:
            raise ValueError(f"point {x} outside [0, 1)")
        i = 1
        while i < self.b and x >= self.betas[i]:
            i += 1
        return i

    def apply(self, x: ScalarLike) -> ExactScalar:
        """Image of x; a translation on each continuity piece."""
        x = scalar(x)
        return x + self.offsets[self.piece_index(x) - 1]

    def invert(self, y: ScalarLike) -> ExactScalar:
        """Unique preimage of y; apply(invert(y)) == y exactly."""
        y = scalar(y)
        if y.sign() < 0 or y >= 1:
            raise ValueError(f"point {y} outside [0, 1)")
        s = 1
        while s < self.b and y >= self._image_starts[s]:
            s += 1
        return y - self.offsets[self._slot_interval[s - 1] - 1]

    def orbit(self, x: ScalarLike, n: int) -> list[ExactScalar]:
        """The points x, Tx, .., T^(n-1)x."""
        if n < 1:
            raise ValueError("orbit length must be at least 1")
        x = scalar(x)
        out = [x]
        for _ in range(n - 1):
            x = self.apply(x)
            out.append(x)
        return out

    def __eq__(self, other):
        return (
            isinstance(other, Iet)
            and self.perm == other.perm
            and self.lengths == other.lengths
        )

    def __repr__(self):
        lens = ", ".join(str(x) for x in self.lengths)
        return f"Iet({list(self.perm.images)}; {lens})"


def build_iet(perm: Union[Permutation, Iterable[int]], lengths: Sequence[ScalarLike]) -> Iet:
    return Iet(perm, lengths)


def refined_partition(
    iet: Iet, n: int
) -> tuple[list[ExactScalar], ExactScalar, ExactScalar]:
    """Endpoints of {0} union D union T^-1 D union .. union T^-n D, with gaps.

    Returns (sorted endpoints, smallest gap, largest gap); the final gap runs
    from the last endpoint to 1.
    """
    if n < 1:
        raise ValueError("depth must be at least 1")
    points = _refinement_points(iet, n)
    return points, *_gap_extremes(points)


def _refinement_points(iet: Iet, n: int) -> list[ExactScalar]:
    points = {ExactScalar(0)}
    for beta in iet.discontinuities():
        z = beta
        points.add(z)
        for _ in range(n):
            z = iet.invert(z)
            points.add(z)
    return sorted(points)


def _gap_extremes(points: list[ExactScalar]) -> tuple[ExactScalar, ExactScalar]:
    gaps = [points[i + 1] - points[i] for i in range(len(points) - 1)]
    gaps.append(ExactScalar(1) - points[-1])
    eta = kappa = gaps[0]
    for g in gaps[1:]:
        if g < eta:
            eta = g
        if g > kappa:
            kappa = g
    return eta, kappa


def check_idoc(iet: Iet, n_max: int) -> Optional[int]:
    """Smallest n <= n_max with T^n beta in D for some discontinuity beta.

    Returns None when no discontinuity orbit returns to a discontinuity up to
    the requested depth.  A None is always "pass to depth n_max", never a
    certificate for all n.
    """
    if n_max < 1:
        raise ValueError("depth must be at least 1")
    disc = set(iet.discontinuities())
    zs = list(disc)
    for n in range(1, n_max + 1):
        zs = [iet.apply(z) for z in zs]
        if any(z in disc for z in zs):
            return n
    return None


@dataclass(frozen=True)
class RecurrenceConstants:
    """Finite-depth density/separation surrogates for a recurrent exchange.

    c3_est = min over n <= n_max of n * eta(n) (eta = smallest refined gap),
    c1_est = max of n * kappa(n) (kappa = largest gap), c2_est = c3_est, and
    delta = c2_est / 4.  All exact, always reported with their depth.
    """

    n_max: int
    c1_est: ExactScalar
    c2_est: ExactScalar
    c3_est: ExactScalar
    delta: ExactScalar

    def __post_init__(self):
        assert self.delta * 4 == self.c2_est


def recurrence_constants(iet: Iet, n_max: int) -> RecurrenceConstants:
    """Scan refined partitions up to depth n_max for the orbit constants."""
    failing = check_idoc(iet, n_max)
    if failing is not None:
        raise IdocFailure(failing)
    points = _refinement_points(iet, 1)
    backward = list(iet.discontinuities())
    backward = [iet.invert(z) for z in backward]
    eta, kappa = _gap_extremes(points)
    c3 = eta
    c1 = kappa
    for n in range(2, n_max + 1):
        backward = [iet.invert(z) for z in backward]
        for z in backward:
            pos = bisect.bisect_left(points, z)
            if pos >= len(points) or points[pos] != z:
                points.insert(pos, z)
        eta, kappa = _gap_extremes(points)
        n_eta = eta * n
        n_kappa = kappa * n
        if n_eta < c3:
            c3 = n_eta
        if n_kappa > c1:
            c1 = n_kappa
    return RecurrenceConstants(n_max=n_max, c1_est=c1, c2_est=c3, c3_est=c3, delta=c3 / 4)


def iet_to_text(iet: Iet) -> str:
    """Canonical JSON text: permutation as integers, lengths as exact strings."""
    payload = {
        "permutation": list(iet.perm.images),
        "lengths": [str(x) for x in iet.lengths],
    }
    return json.dumps(payload, sort_keys=True, separators=(", ", ": ")) + "\n"


def iet_from_text(text: str) -> Iet:
    payload = json.loads(text)
    return Iet(payload["permutation"], payload["lengths"])


def golden_rotation() -> Iet:
    """Rotation by (sqrt(5)-1)/2 as a 2-interval exchange."""
    s5 = ExactScalar.sqrt(5)
    return Iet([2, 1], [(3 - s5) / 2, (s5 - 1) / 2])
