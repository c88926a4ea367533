"""Integer lowering of exact orbits for the iteration-heavy loops.

Scalars sharing one quadratic base are rewritten as (P + R*sqrt(d)) / den
with a common integer denominator, so the hot loops run on plain integers:
piece lookup is a handful of integer comparisons (squaring only when signs
disagree) and each map application is two integer additions.  Results are
bit-identical to the generic ExactScalar path.
"""

from __future__ import annotations

from fractions import Fraction
from math import lcm
from typing import Iterable, Optional, Sequence

from .errors import MixedBaseError
from .iet import Iet
from .scalar import ExactScalar
from .stepfn import StepFunction

Pair = tuple[int, int]


def common_base(values: Iterable[ExactScalar]) -> int:
    d = 0
    for v in values:
        if v.base:
            if d and v.base != d:
                raise MixedBaseError(f"bases sqrt({d}) and sqrt({v.base}) do not mix")
            d = v.base
    return d


def common_denominator(values: Iterable[ExactScalar]) -> int:
    den = 1
    for v in values:
        den = lcm(den, v.rational_part.denominator, v.root_coefficient.denominator)
    return den


def lower_pair(v: ExactScalar, den: int) -> Pair:
    a, b = v.rational_part, v.root_coefficient
    return a.numerator * (den // a.denominator), b.numerator * (den // b.denominator)


def raise_pair(p: Pair, den: int, d: int) -> ExactScalar:
    return ExactScalar(Fraction(p[0], den), Fraction(p[1], den), d if p[1] else 0)


def sgn(P: int, R: int, d: int) -> int:
    """Sign of P + R*sqrt(d)."""
    if R == 0:
        return (P > 0) - (P < 0)
    if P == 0:
        return 1 if R > 0 else -1
    if P > 0:
        if R > 0:
            return 1
        return 1 if P * P > d * R * R else -1
    if R < 0:
        return -1
    return 1 if d * R * R > P * P else -1


class OrbitKernel:
    """Exact integer iterator for one exchange, optionally reading a step
    function along the orbit.

    ``extra_x`` / ``extra_t`` fold additional scalars (start points, window
    bounds) into the horizontal / vertical common denominators so they can be
    lowered later with ``lower_x`` / ``lower_t``.
    """

    def __init__(
        self,
        iet: Iet,
        f: Optional[StepFunction] = None,
        extra_x: Sequence[ExactScalar] = (),
        extra_t: Sequence[ExactScalar] = (),
    ):
        self.iet = iet
        self.f = f
        x_scalars = list(iet.betas) + list(iet.offsets) + list(extra_x)
        cuts: list[ExactScalar] = list(iet.discontinuities())
        if f is not None:
            x_scalars += list(f.discontinuities)
            cuts += list(f.discontinuities)
        t_scalars = (list(f.values) if f is not None else []) + list(extra_t)
        self.d = common_base(x_scalars + t_scalars)
        self.den = common_denominator(x_scalars)
        self.t_den = common_denominator(t_scalars) if t_scalars else 1

        # Combined half-open pieces cut by both the exchange and f.
        interior = sorted(set(cuts))
        self.breaks = tuple(lower_pair(c, self.den) for c in interior)
        offs = []
        yidx = []
        lefts = [ExactScalar(0)] + interior
        for left in lefts:
            i = iet.piece_index(left)
            offs.append(lower_pair(iet.offsets[i - 1], self.den))
            yidx.append(f.piece_index(left) - 1 if f is not None else 0)
        self.piece_offsets = tuple(offs)
        self.piece_value_index = tuple(yidx)
        self.t_values = (
            tuple(lower_pair(y, self.t_den) for y in f.values) if f is not None else ()
        )
        # The exchange's own breakpoints, for continuity-gap queries.
        self.iet_breaks = tuple(lower_pair(b, self.den) for b in iet.betas[1:-1])
        self.one = lower_pair(ExactScalar(1), self.den)

    # -- lowering ------------------------------------------------------------

    def lower_x(self, x: ExactScalar) -> Pair:
        a, b = x.rational_part, x.root_coefficient
        if self.den % a.denominator or self.den % b.denominator:
            raise ValueError(f"{x} not representable over denominator {self.den}")
        if x.base and self.d and x.base != self.d:
            raise MixedBaseError("point base differs from kernel base")
        return lower_pair(x, self.den)

    def lower_t(self, t: ExactScalar) -> Pair:
        a, b = t.rational_part, t.root_coefficient
        if self.t_den % a.denominator or self.t_den % b.denominator:
            raise ValueError(f"{t} not representable over denominator {self.t_den}")
        if t.base and self.d and t.base != self.d:
            raise MixedBaseError("value base differs from kernel base")
        return lower_pair(t, self.t_den)

    def x_scalar(self, p: Pair) -> ExactScalar:
        return raise_pair(p, self.den, self.d)

    def t_scalar(self, p: Pair) -> ExactScalar:
        return raise_pair(p, self.t_den, self.d)

    def piece_of(self, xP: int, xR: int) -> int:
        dd = self.d
        j = 0
        for bP, bR in self.breaks:
            if sgn(bP - xP, bR - xR, dd) > 0:
                return j
            j += 1
        return j

    # -- loops ----------------------------------------------------------------

    def orbit_pairs(self, x0: Pair, n: int) -> tuple[list[int], list[int]]:
        """Lowered coordinates of x, Tx, .., T^(n-1)x."""
        dd = self.d
        breaks = self.breaks
        offs = self.piece_offsets
        nb = len(breaks)
        xP, xR = x0
        listP = [xP]
        listR = [xR]
        appendP = listP.append
        appendR = listR.append
        for _ in range(n - 1):
            j = 0
            while j < nb:
                bP, bR = breaks[j]
                dP = bP - xP
                dR = bR - xR
                if dR == 0:
                    pos = dP > 0
                elif dP == 0:
                    pos = dR > 0
                elif dP > 0:
                    pos = dR > 0 or dP * dP > dd * dR * dR
                else:
                    pos = dR > 0 and dd * dR * dR > dP * dP
                if pos:
                    break
                j += 1
            oP, oR = offs[j]
            xP += oP
            xR += oR
            appendP(xP)
            appendR(xR)
        return listP, listR

    def sums_at_checkpoints(self, x0: Pair, checkpoints: Sequence[int]) -> list[Pair]:
        """Exact partial sums S_N of f along the orbit at each checkpoint N.

        S_N = f(x) + f(Tx) + .. + f(T^(N-1)x), returned in t-denominator
        units; checkpoints must be increasing and >= 1.
        """
        dd = self.d
        breaks = self.breaks
        offs = self.piece_offsets
        vidx = self.piece_value_index
        vals = self.t_values
        nb = len(breaks)
        xP, xR = x0
        sP = sR = 0
        out = []
        marks = list(checkpoints)
        top = marks[-1]
        next_mark = marks.pop(0)
        for n in range(1, top + 1):
            j = 0
            while j < nb:
                bP, bR = breaks[j]
                dP = bP - xP
                dR = bR - xR
                if dR == 0:
                    pos = dP > 0
                elif dP == 0:
                    pos = dR > 0
                elif dP > 0:
                    pos = dR > 0 or dP * dP > dd * dR * dR
                else:
                    pos = dR > 0 and dd * dR * dR > dP * dP
                if pos:
                    break
                j += 1
            vP, vR = vals[vidx[j]]
            sP += vP
            sR += vR
            oP, oR = offs[j]
            xP += oP
            xR += oR
            if n == next_mark:
                out.append((sP, sR))
                if marks:
                    next_mark = marks.pop(0)
                else:
                    break
        return out

    def window_profile(self, x0: Pair, t0: Pair, radius: Pair, k_max: int) -> list[int]:
        """Counts of n < 2^m with t0 + S_n in [-radius, radius], m = 0..k_max.

        Closed window; boundary sums count as inside.  Entry m of the result
        counts the first 2^m vertical positions (n = 0 included).
        """
        dd = self.d
        breaks = self.breaks
        offs = self.piece_offsets
        vidx = self.piece_value_index
        vals = self.t_values
        nb = len(breaks)
        xP, xR = x0
        # Track u = t0 + S_n against [-radius, radius] via two shifted sums.
        loP = t0[0] + radius[0]
        loR = t0[1] + radius[1]
        hiP = radius[0] - t0[0]
        hiR = radius[1] - t0[1]
        # Inside <=> lo + S >= 0 and hi - S >= 0.
        aP, aR = loP, loR
        bP2, bR2 = hiP, hiR
        count = 0
        out = []
        mark = 1
        m = 0
        n = 0
        total = 1 << k_max
        while n < total:
            if sgn(aP, aR, dd) >= 0 and sgn(bP2, bR2, dd) >= 0:
                count += 1
            j = 0
            while j < nb:
                bP, bR = breaks[j]
                dP = bP - xP
                dR = bR - xR
                if dR == 0:
                    pos = dP > 0
                elif dP == 0:
                    pos = dR > 0
                elif dP > 0:
                    pos = dR > 0 or dP * dP > dd * dR * dR
                else:
                    pos = dR > 0 and dd * dR * dR > dP * dP
                if pos:
                    break
                j += 1
            vP, vR = vals[vidx[j]]
            aP += vP
            aR += vR
            bP2 -= vP
            bR2 -= vR
            oP, oR = offs[j]
            xP += oP
            xR += oR
            n += 1
            if n == mark:
                out.append(count)
                mark <<= 1
                m += 1
        return out

    def window_visit_count(self, x0: Pair, t0: Pair, radius: Pair, n: int) -> int:
        """Number of 0 <= m < n with t0 + S_m in the closed window."""
        if n < 1:
            raise ValueError("need n >= 1")
        k = 0
        while (1 << k) < n:
            k += 1
        if (1 << k) == n:
            return self.window_profile(x0, t0, radius, k)[-1]
        # Non-power-of-two lengths take the plain loop.
        dd = self.d
        breaks = self.breaks
        offs = self.piece_offsets
        vidx = self.piece_value_index
        vals = self.t_values
        nb = len(breaks)
        xP, xR = x0
        aP = t0[0] + radius[0]
        aR = t0[1] + radius[1]
        bP2 = radius[0] - t0[0]
        bR2 = radius[1] - t0[1]
        count = 0
        for _ in range(n):
            if sgn(aP, aR, dd) >= 0 and sgn(bP2, bR2, dd) >= 0:
                count += 1
            j = 0
            while j < nb:
                bP, bR = breaks[j]
                dP = bP - xP
                dR = bR - xR
                if dR == 0:
                    pos = dP > 0
                elif dP == 0:
                    pos = dR > 0
                elif dP > 0:
                    pos = dR > 0 or dP * dP > dd * dR * dR
                else:
                    pos = dR > 0 and dd * dR * dR > dP * dP
                if pos:
                    break
                j += 1
            vP, vR = vals[vidx[j]]
            aP += vP
            aR += vR
            bP2 -= vP
            bR2 -= vR
            oP, oR = offs[j]
            xP += oP
            xR += oR
        return count

    def open_window_sum_count(self, x0: Pair, radius: Pair, n: int) -> int:
        """Number of 1 <= m <= n with S_m in the open window (-radius, radius)."""
        dd = self.d
        breaks = self.breaks
        offs = self.piece_offsets
        vidx = self.piece_value_index
        vals = self.t_values
        nb = len(breaks)
        xP, xR = x0
        aP, aR = radius
        bP2, bR2 = radius
        count = 0
        for _ in range(n):
            j = 0
            while j < nb:
                bP, bR = breaks[j]
                dP = bP - xP
                dR = bR - xR
                if dR == 0:
                    pos = dP > 0
                elif dP == 0:
                    pos = dR > 0
                elif dP > 0:
                    pos = dR > 0 or dP * dP > dd * dR * dR
                else:
                    pos = dR > 0 and dd * dR * dR > dP * dP
                if pos:
                    break
                j += 1
            vP, vR = vals[vidx[j]]
            aP += vP
            aR += vR
            bP2 -= vP
            bR2 -= vR
            if sgn(aP, aR, dd) > 0 and sgn(bP2, bR2, dd) > 0:
                count += 1
            oP, oR = offs[j]
            xP += oP
            xR += oR
        return count
