"""Exact scalars: rationals and real quadratic extensions Q(sqrt(d)).

Every coordinate that enters a dynamical decision (orbit points, interval
endpoints, vertical sums) is one of these values, so membership at a
discontinuity is decided by integer arithmetic, never by rounding.  A scalar
is either rational or of the form a + b*sqrt(d) with a, b rational and d a
square-free integer >= 2.  Scalars with different d never mix: combining them
raises ``MixedBaseError`` instead of silently promoting.
"""

from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Union

from .errors import MixedBaseError, ScalarParseError

Rationalish = Union[int, Fraction]

_LOG10_2 = Fraction(30103, 100000)  # slight underestimate of log10(2)


def _is_square_free(d: int) -> bool:
    if d < 2:
        return False
    i = 2
    while i * i <= d:
        if d % (i * i) == 0:
            return False
        i += 1
    return True


def _sign_pair(a: Fraction, b: Fraction, d: int) -> int:
    """Sign of a + b*sqrt(d), by comparing a^2 against b^2*d when needed."""
    if not b:
        return (a > 0) - (a < 0)
    if not a:
        return 1 if b > 0 else -1
    if a > 0 and b > 0:
        return 1
    if a < 0 and b < 0:
        return -1
    # Opposite signs: |a| vs |b|*sqrt(d) decided on squares.  Equality would
    # force sqrt(d) rational, impossible for square-free d >= 2.
    lhs = a * a
    rhs = b * b * d
    if lhs == rhs:
        raise ArithmeticError(f"sqrt({d}) behaved rationally; invalid base")
    if lhs > rhs:
        return 1 if a > 0 else -1
    return 1 if b > 0 else -1


class ExactScalar:
    """Immutable element of Q or Q(sqrt(d)) with decidable ordering."""

    __slots__ = ("_a", "_b", "_d")

    def __init__(self, a: Rationalish = 0, b: Rationalish = 0, d: int = 0):
        a = Fraction(a)
        b = Fraction(b)
        if b:
            if not _is_square_free(d):
                raise ScalarParseError(f"base {d} is not a square-free integer >= 2")
        else:
            d = 0
        object.__setattr__(self, "_a", a)
        object.__setattr__(self, "_b", b)
        object.__setattr__(self, "_d", d)

    def __setattr__(self, name, value):
        raise AttributeError("ExactScalar is immutable")

    # -- constructors ------------------------------------------------------

    @classmethod
    def sqrt(cls, d: int) -> "ExactScalar":
        """The scalar sqrt(d) for square-free d >= 2."""
        return cls(0, 1, d)

    @classmethod
    def parse(cls, text: str) -> "ExactScalar":
        """Parse ``p/q``, ``p/q + r/s*sqrt(d)`` or a signed variant.

        Whitespace is ignored.  Decimal notation is refused: inputs must be
        exact integer or fraction literals.
        """
        compact = re.sub(r"\s+", "", text)
        if not compact:
            raise ScalarParseError("empty scalar text")
        if "." in compact:
            raise ScalarParseError(f"decimal literals are refused: {text!r}")
        m = _SCALAR_RE.fullmatch(compact)
        if not m:
            raise ScalarParseError(f"cannot parse scalar: {text!r}")
        rat, root_sign, coef, d_txt = m.group("rat", "rsign", "coef", "d")
        a = Fraction(rat) if rat else Fraction(0)
        if d_txt is None:
            return cls(a)
        b = Fraction(coef) if coef else Fraction(1)
        if root_sign == "-":
            b = -b
        return cls(a, b, int(d_txt))

    # -- field data --------------------------------------------------------

    @property
    def rational_part(self) -> Fraction:
        return self._a

    @property
    def root_coefficient(self) -> Fraction:
        return self._b

    @property
    def base(self) -> int:
        """Square-free d with the value in Q(sqrt(d)); 0 when rational."""
        return self._d

    @property
    def is_rational(self) -> bool:
        return self._d == 0

    def as_fraction(self) -> Fraction:
        if self._d:
            raise MixedBaseError("not a rational value")
        return self._a

    # -- arithmetic --------------------------------------------------------

    def _join(self, other) -> tuple["ExactScalar", int]:
        if isinstance(other, (int, Fraction)):
            other = ExactScalar(other)
        elif not isinstance(other, ExactScalar):
            return NotImplemented, 0
        if self._d and other._d and self._d != other._d:
            raise MixedBaseError(f"bases sqrt({self._d}) and sqrt({other._d}) do not mix")
        return other, self._d or other._d

    def __add__(self, other):
        other, d = self._join(other)
        if other is NotImplemented:
            return NotImplemented
        return ExactScalar(self._a + other._a, self._b + other._b, d)

    __radd__ = __add__

    def __sub__(self, other):
        other, d = self._join(other)
        if other is NotImplemented:
            return NotImplemented
        return ExactScalar(self._a - other._a, self._b - other._b, d)

    def __rsub__(self, other):
        return (-self) + other

    def __neg__(self):
        return ExactScalar(-self._a, -self._b, self._d)

    def __abs__(self):
        return -self if self.sign() < 0 else self

    def __mul__(self, other):
        other, d = self._join(other)
        if other is NotImplemented:
            return NotImplemented
        a = self._a * other._a + self._b * other._b * d
        b = self._a * other._b + self._b * other._a
        return ExactScalar(a, b, d)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other, d = self._join(other)
        if other is NotImplemented:
            return NotImplemented
        norm = other._a * other._a - other._b * other._b * d
        if norm == 0:
            raise ZeroDivisionError("division by zero scalar")
        # Multiply by the conjugate; norm is rational and nonzero.
        a = (self._a * other._a - self._b * other._b * d) / norm
        b = (self._b * other._a - self._a * other._b) / norm
        return ExactScalar(a, b, d)

    def __rtruediv__(self, other):
        return ExactScalar(other) / self

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            return NotImplemented
        out = ExactScalar(1)
        base = self
        n = exponent
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    # -- ordering ----------------------------------------------------------

    def sign(self) -> int:
        """-1, 0 or +1; exact."""
        return _sign_pair(self._a, self._b, self._d)

    def _cmp(self, other) -> int:
        diff = self - other
        if diff is NotImplemented:
            raise TypeError(f"cannot compare ExactScalar with {type(other).__name__}")
        return diff.sign()

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            return self._d == 0 and self._a == other
        if isinstance(other, ExactScalar):
            # Distinct square-free bases never produce equal irrationals.
            return (self._a, self._b, self._d) == (other._a, other._b, other._d)
        return NotImplemented

    def __hash__(self):
        if self._d == 0:
            return hash(self._a)
        return hash((self._a, self._b, self._d))

    def __bool__(self):
        return bool(self._a) or bool(self._b)

    # -- integer rounding ---------------------------------------------------

    def floor(self) -> int:
        if self._d == 0:
            return self._a.numerator // self._a.denominator
        # Integer candidate from isqrt bounds on the root term, then an exact
        # one-step correction.
        a, b = self._a, self._b
        scale = a.denominator * b.denominator
        ai = a.numerator * b.denominator
        bi = b.numerator * a.denominator
        s = math.isqrt(bi * bi * self._d)
        if bi < 0:
            s = -s - 1  # floor(-x) = -ceil(x); sqrt never exact here
        n = (ai + s) // scale
        while self._cmp(n) < 0:
            n -= 1
        while self._cmp(n + 1) >= 0:
            n += 1
        return n

    def frac(self) -> "ExactScalar":
        """Fractional part in [0, 1); the value minus its floor, exactly."""
        return self - self.floor()

    def __float__(self):
        if self._d == 0:
            return float(self._a)
        return float(self._a) + float(self._b) * math.sqrt(self._d)

    # -- rendering ----------------------------------------------------------

    def decimal(self, bits: int) -> str:
        """Decimal string correctly rounded to ~bits of precision.

        Ties at the last kept digit round toward +infinity; trailing zeros
        are trimmed.  Rendering only: no dynamics ever consumes this output.
        """
        if bits < 1:
            raise ValueError("precision must be at least 1 bit")
        if not self:
            return "0"
        digits = max(1, int(bits * _LOG10_2))
        scale = 10**digits
        doubled = self * (2 * scale)
        q = doubled.floor()
        mantissa = (q + 1) // 2  # floor((v*scale)+1/2) without leaving integers
        sign = "-" if mantissa < 0 else ""
        mantissa = abs(mantissa)
        whole, frac_digits = divmod(mantissa, scale)
        if frac_digits == 0:
            return f"{sign}{whole}"
        tail = str(frac_digits).rjust(digits, "0").rstrip("0")
        return f"{sign}{whole}.{tail}"

    def __str__(self):
        if self._d == 0:
            return _fmt_fraction(self._a)
        b = self._b
        root = f"sqrt({self._d})" if abs(b) == 1 else f"{_fmt_fraction(abs(b))}*sqrt({self._d})"
        if not self._a:
            return root if b > 0 else f"-{root}"
        joiner = "+" if b > 0 else "-"
        return f"{_fmt_fraction(self._a)} {joiner} {root}"

    def __repr__(self):
        return f"ExactScalar({str(self)!r})"


def _fmt_fraction(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


_RAT = r"[+-]?\d+(?:/\d+)?"
_SCALAR_RE = re.compile(
    rf"(?P<rat>{_RAT})?"
    rf"(?:(?P<rsign>[+-])?(?:(?P<coef>{_RAT})\*)?sqrt\((?P<d>\d+)\))?"
)

ZERO = ExactScalar(0)
ONE = ExactScalar(1)


def scalar(value: Union[ExactScalar, int, Fraction, str]) -> ExactScalar:
    """Coerce an int, Fraction or exact text literal to an ExactScalar."""
    if isinstance(value, ExactScalar):
        return value
    if isinstance(value, (int, Fraction)):
        return ExactScalar(value)
    if isinstance(value, str):
        return ExactScalar.parse(value)
    raise TypeError(f"cannot coerce {type(value).__name__} to ExactScalar")
