"""Nested first-return maps and their integer visit matrices.

Starting from an exchange T of b intervals, repeatedly induce on the first
piece: stage k holds an exchange of b subintervals of a shrinking interval,
and the b-by-b matrix attached to stage k counts how often each next-stage
piece visits each current piece before its first return.  Column sums of the
matrices (and of their products) are exactly the composed return times, which
is the cross-check the brute-force oracle exercises.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import mpmath

from .errors import InductionCapExceeded, InductionDegeneration
from .iet import Iet
from .lowering import common_base, common_denominator, lower_pair, sgn
from .scalar import ExactScalar

Matrix = tuple[tuple[int, ...], ...]


@dataclass
class InductionStage:
    """One stage: an interval, the induced exchange on it, and (once the
    next stage exists) the per-piece return times and visit matrix."""

    k: int
    lo: ExactScalar
    hi: ExactScalar
    cuts: tuple[ExactScalar, ...]  # piece left endpoints; cuts[0] == lo
    offsets: tuple[ExactScalar, ...]  # translation per piece
    return_times: Optional[tuple[int, ...]] = field(default=None)
    visit_matrix: Optional[Matrix] = field(default=None)

    @property
    def b(self) -> int:
        return len(self.cuts)

    def length(self) -> ExactScalar:
        return self.hi - self.lo

    def piece_bounds(self, j: int) -> tuple[ExactScalar, ExactScalar]:
        """Endpoints of the j-th piece (1-based)."""
        hi = self.cuts[j] if j < self.b else self.hi
        return self.cuts[j - 1], hi

    def piece_lengths(self) -> list[ExactScalar]:
        return [self.piece_bounds(j)[1] - self.piece_bounds(j)[0] for j in range(1, self.b + 1)]

    def piece_of(self, z: ExactScalar) -> int:
        if z < self.lo or z >= self.hi:
            raise ValueError(f"point {z} outside stage interval")
        j = 1
        while j < self.b and z >= self.cuts[j]:
            j += 1
        return j

    def apply(self, z: ExactScalar) -> ExactScalar:
        return z + self.offsets[self.piece_of(z) - 1]


def base_stage(iet: Iet) -> InductionStage:
    return InductionStage(
        k=0,
        lo=ExactScalar(0),
        hi=ExactScalar(1),
        cuts=iet.betas[:-1],
        offsets=iet.offsets,
    )


def induce_once(stage: InductionStage, cap: int = 100_000) -> InductionStage:
    """First-return map of the stage exchange on its first piece.

    Forward piece-iteration with splitting: each candidate subinterval of the
    first piece is pushed forward, split wherever it straddles a stage cut,
    and retired once its image lies back inside the first piece.  Fills the
    stage's return times and visit matrix, and returns the next stage.

    Raises ``InductionDegeneration`` when the return pieces do not come back
    as exactly b intervals (a periodicity/Keane failure at this depth) and
    ``InductionCapExceeded`` when cap translations are not enough.
    """
    b = stage.b
    next_lo = stage.lo
    next_hi = stage.cuts[1] if b > 1 else stage.hi
    # Active piece: (dom_lo, dom_hi, img_lo, img_hi, steps, visits).
    active = [(next_lo, next_hi, next_lo, next_hi, 0, [0] * b)]
    final = []
    budget = cap
    while active:
        dom_lo, dom_hi, img_lo, img_hi, steps, visits = active.pop()
        # Split the image at interior stage cuts so it sits in one piece.
        for c in stage.cuts[1:]:
            if img_lo < c < img_hi:
                mid = dom_lo + (c - img_lo)
                active.append((dom_lo, mid, img_lo, c, steps, list(visits)))
                dom_lo, img_lo = mid, c
        j = stage.piece_of(img_lo)
        visits = list(visits)
        visits[j - 1] += 1
        if budget <= 0:
            raise InductionCapExceeded(f"cap {cap} hit while inducing stage {stage.k}")
        budget -= 1
        off = stage.offsets[j - 1]
        img_lo = img_lo + off
        img_hi = img_hi + off
        steps += 1
        if img_hi <= next_hi:
            final.append((dom_lo, dom_hi, img_lo, img_hi, steps, visits))
        elif img_lo >= next_hi:
            active.append((dom_lo, dom_hi, img_lo, img_hi, steps, visits))
        else:
            mid = dom_lo + (next_hi - img_lo)
            final.append((dom_lo, mid, img_lo, next_hi, steps, visits))
            active.append((mid, dom_hi, next_hi, img_hi, steps, visits))

    final.sort(key=lambda piece: piece[0])
    if len(final) != b:
        raise InductionDegeneration(
            f"stage {stage.k}: first return has {len(final)} pieces, expected {b}"
        )
    for (_, prev_hi, *_), (cur_lo, *_) in zip(final, final[1:]):
        if prev_hi != cur_lo:
            raise InductionDegeneration(f"stage {stage.k}: return pieces do not tile")
    if final[0][0] != next_lo or final[-1][1] != next_hi:
        raise InductionDegeneration(f"stage {stage.k}: return pieces do not tile")

    stage.return_times = tuple(piece[4] for piece in final)
    stage.visit_matrix = tuple(
        tuple(final[j][5][i] for j in range(b)) for i in range(b)
    )
    return InductionStage(
        k=stage.k + 1,
        lo=next_lo,
        hi=next_hi,
        cuts=tuple(piece[0] for piece in final),
        offsets=tuple(piece[2] - piece[0] for piece in final),
    )


def run_induction(iet: Iet, depth: int, cap: int = 100_000) -> list[InductionStage]:
    """Stages 0..depth; stages 0..depth-1 carry matrices and return times."""
    if depth < 0:
        raise ValueError("depth must be nonnegative")
    stages = [base_stage(iet)]
    for _ in range(depth):
        stages.append(induce_once(stages[-1], cap))
    return stages


def _matmul(a: Matrix, b: Matrix) -> Matrix:
    n = len(a)
    return tuple(
        tuple(sum(a[i][m] * b[m][j] for m in range(n)) for j in range(n)) for i in range(n)
    )


def matrix_product(stages: Sequence[InductionStage], k: int, r: int) -> Matrix:
    """The product of the stage matrices k, k+1, .., k+r."""
    if r < 0 or k < 0 or k + r >= len(stages) or stages[k + r].visit_matrix is None:
        raise ValueError(f"stages {k}..{k + r} do not all carry matrices")
    out = stages[k].visit_matrix
    for m in range(k + 1, k + r + 1):
        out = _matmul(out, stages[m].visit_matrix)
    return out


def column_sums(matrix: Matrix) -> tuple[int, ...]:
    return tuple(sum(col) for col in zip(*matrix))


def return_time_oracle(
    stages: Sequence[InductionStage], k: int, l: int, j: int, cap: int = 10**8
) -> int:
    """Brute-force first-return time of the j-th stage-l piece to stage l,
    iterating the stage-k exchange from the piece midpoint.

    Independent of the visit-matrix bookkeeping: the only shared machinery
    is the stage map itself, applied in lowered integer coordinates.
    """
    if not 0 <= k < l < len(stages):
        raise ValueError("need 0 <= k < l within the available stages")
    lo, hi = stages[l].piece_bounds(j)
    z = (lo + hi) / 2
    mover = stages[k]
    involved = list(mover.cuts) + [mover.hi, stages[l].lo, stages[l].hi, z]
    involved += list(mover.offsets)
    d = common_base(involved)
    den = common_denominator(involved)
    breaks = [lower_pair(c, den) for c in mover.cuts[1:]]
    offs = [lower_pair(o, den) for o in mover.offsets]
    nb = len(breaks)
    zP, zR = lower_pair(z, den)
    loP, loR = lower_pair(stages[l].lo, den)
    hiP, hiR = lower_pair(stages[l].hi, den)
    for n in range(1, cap + 1):
        piece = 0
        while piece < nb:
            bP, bR = breaks[piece]
            dP = bP - zP
            dR = bR - zR
            if dR == 0:
                pos = dP > 0
            elif dP == 0:
                pos = dR > 0
            elif dP > 0:
                pos = dR > 0 or dP * dP > d * dR * dR
            else:
                pos = dR > 0 and d * dR * dR > dP * dP
            if pos:
                break
            piece += 1
        oP, oR = offs[piece]
        zP += oP
        zR += oR
        if sgn(zP - loP, zR - loR, d) >= 0 and sgn(hiP - zP, hiR - zR, d) > 0:
            return n
    raise InductionCapExceeded(f"no return within {cap} iterations")


@dataclass(frozen=True)
class FactsReport:
    """Empirical counterparts of the uniform induction bounds.

    Ratios are exact; the angle decay rate and its prefactor are fitted from
    128-bit evaluations of exact integer columns (reported, not asserted,
    beyond the contraction requirement gamma_emp < 1).
    """

    depth: int
    return_ratio_max: Fraction  # over all stage gaps and piece pairs
    piece_ratio_max: ExactScalar  # sibling piece length ratios
    shrink_min: ExactScalar  # min over (k, j) of |I_k| / |I_{k,j}|
    shrink_max: ExactScalar
    norm_max: int  # largest matrix column sum at a single stage
    positivity_lag: Optional[int]
    max_angles: tuple[float, ...]  # max column angle of the product, per r
    gamma_emp: float
    angle_prefactor: float


def check_facts(stages: Sequence[InductionStage], angle_precision: int = 128) -> FactsReport:
    """Scan a stage chain for the empirical induction constants."""
    matrices = [s.visit_matrix for s in stages if s.visit_matrix is not None]
    depth = len(matrices)
    if depth < 3:
        raise ValueError("need at least 3 stages with matrices")
    b = stages[0].b

    return_ratio = Fraction(1)
    for k in range(depth):
        prod = stages[k].visit_matrix
        sums = column_sums(prod)
        ratio = Fraction(max(sums), min(sums))
        if ratio > return_ratio:
            return_ratio = ratio
        for m in range(k + 1, depth):
            prod = _matmul(prod, stages[m].visit_matrix)
            sums = column_sums(prod)
            ratio = Fraction(max(sums), min(sums))
            if ratio > return_ratio:
                return_ratio = ratio

    piece_ratio = ExactScalar(1)
    shrink_min = shrink_max = None
    for stage in stages:
        lengths = stage.piece_lengths()
        total = stage.length()
        smallest, largest = min(lengths), max(lengths)
        ratio = largest / smallest
        if ratio > piece_ratio:
            piece_ratio = ratio
        for piece_len in lengths:
            shrink = total / piece_len
            if shrink_min is None or shrink < shrink_min:
                shrink_min = shrink
            if shrink_max is None or shrink > shrink_max:
                shrink_max = shrink

    norm_max = max(max(column_sums(m)) for m in matrices)

    positivity_lag = None
    for r in range(depth):
        if all(
            all(x > 0 for row in matrix_product(stages, k, r) for x in row)
            for k in range(depth - r)
        ):
            positivity_lag = r
            break

    max_angles = _max_angle_profile(stages, depth, angle_precision)
    gamma, prefactor = _fit_geometric(max_angles)
    return FactsReport(
        depth=depth,
        return_ratio_max=return_ratio,
        piece_ratio_max=piece_ratio,
        shrink_min=shrink_min,
        shrink_max=shrink_max,
        norm_max=norm_max,
        positivity_lag=positivity_lag,
        max_angles=tuple(max_angles),
        gamma_emp=gamma,
        angle_prefactor=prefactor,
    )


def _max_angle_profile(stages, depth, precision):
    """Largest pairwise column angle of the products starting at stage 0."""
    out = []
    with mpmath.workprec(precision):
        prod = stages[0].visit_matrix
        for r in range(depth):
            if r:
                prod = _matmul(prod, stages[r].visit_matrix)
            cols = list(zip(*prod))
            worst = mpmath.mpf(0)
            for i in range(len(cols)):
                for j in range(i + 1, len(cols)):
                    angle = _angle(cols[i], cols[j])
                    if angle > worst:
                        worst = angle
            out.append(float(worst))
    return out


def _angle(u, v):
    nu = mpmath.sqrt(mpmath.fsum(x * x for x in u))
    nv = mpmath.sqrt(mpmath.fsum(x * x for x in v))
    du = [mpmath.mpf(x) / nu for x in u]
    dv = [mpmath.mpf(x) / nv for x in v]
    diff = mpmath.sqrt(mpmath.fsum((a - b) ** 2 for a, b in zip(du, dv)))
    summ = mpmath.sqrt(mpmath.fsum((a + b) ** 2 for a, b in zip(du, dv)))
    return 2 * mpmath.atan2(diff, summ)


def _fit_geometric(angles):
    """Least-squares fit angle ~ prefactor * gamma^r over the positive tail."""
    points = [(r, float(a)) for r, a in enumerate(angles) if a > 0]
    if len(points) < 2:
        return 0.0, (points[0][1] if points else 0.0)
    n = len(points)
    xs = [p[0] for p in points]
    ys = [math.log(p[1]) for p in points]
    xbar = sum(xs) / n
    ybar = sum(ys) / n
    slope = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys)) / sum(
        (x - xbar) ** 2 for x in xs
    )
    gamma = math.exp(slope)
    prefactor = max(a / gamma**r for r, a in points)
    return gamma, prefactor
