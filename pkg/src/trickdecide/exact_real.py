"""Exact rationals and precision-indexed interval reals.

Rationals are :class:`fractions.Fraction`. A real is given by a map from a
precision k to a closed rational interval of width at most 2**-k containing
it. The only comparison offered is the cotransitive one: given a < b, decide
r > a or r < b.
"""

from __future__ import annotations

import enum
import re
from fractions import Fraction
from typing import Callable, Optional, Union

from .errors import DomainError, PrecisionExhausted, SpecError

Interval = tuple[Fraction, Fraction]
Number = Union[int, Fraction]

MAX_PRECISION = 256


def dyadic(k: int) -> Fraction:
    """2**-k as an exact rational."""
    return Fraction(1, 1 << k) if k >= 0 else Fraction(1 << -k)


class ApproxReal:
    """A real number presented by nested rational intervals.

    ``exact`` is set when the value is a known rational; arithmetic then stays
    exact and every interval is degenerate.
    """

    __slots__ = ("_approx", "_memo", "exact")

    def __init__(self, approx: Callable[[int], Interval], exact: Optional[Fraction] = None):
        self._approx = approx
        self._memo: dict[int, Interval] = {}
        self.exact = exact

    def approximate(self, k: int) -> Interval:
        if k < 0:
            k = 0
        iv = self._memo.get(k)
        if iv is None:
            lo, hi = self._approx(k)
            iv = (Fraction(lo), Fraction(hi))
            self._memo[k] = iv
        return iv

    def lower(self, k: int) -> Fraction:
        return self.approximate(k)[0]

    def upper(self, k: int) -> Fraction:
        return self.approximate(k)[1]

    def __add__(self, other) -> "ApproxReal":
        other = as_real(other)
        if self.exact is not None and other.exact is not None:
            return from_rational(self.exact + other.exact)

        def approx(k: int) -> Interval:
            a_lo, a_hi = self.approximate(k + 1)
            b_lo, b_hi = other.approximate(k + 1)
            return a_lo + b_lo, a_hi + b_hi

        return ApproxReal(approx)

    __radd__ = __add__

    def __neg__(self) -> "ApproxReal":
        if self.exact is not None:
            return from_rational(-self.exact)
        return ApproxReal(lambda k: (-self.upper(k), -self.lower(k)))

    def __sub__(self, other) -> "ApproxReal":
        return self + (-as_real(other))

    def __rsub__(self, other) -> "ApproxReal":
        return as_real(other) + (-self)

    def __abs__(self) -> "ApproxReal":
        if self.exact is not None:
            return from_rational(abs(self.exact))

        def approx(k: int) -> Interval:
            lo, hi = self.approximate(k)
            if lo >= 0:
                return lo, hi
            if hi <= 0:
                return -hi, -lo
            return Fraction(0), max(-lo, hi)

        return ApproxReal(approx)

    def scale(self, q: Number) -> "ApproxReal":
        """Multiply by an exact rational."""
        q = Fraction(q)
        if self.exact is not None:
            return from_rational(self.exact * q)
        if q == 0:
            return from_rational(Fraction(0))
        # |q| <= 2**shift keeps the width within 2**-k
        shift = max(0, abs(q).numerator.bit_length() - abs(q).denominator.bit_length() + 1)

        def approx(k: int) -> Interval:
            lo, hi = self.approximate(k + shift)
            a, b = lo * q, hi * q
            return (a, b) if a <= b else (b, a)

        return ApproxReal(approx)

    def __repr__(self) -> str:
        if self.exact is not None:
            return f"ApproxReal({self.exact})"
        lo, hi = self.approximate(16)
        return f"ApproxReal([{float(lo):.6g}, {float(hi):.6g}])"


def from_rational(q: Number) -> ApproxReal:
    q = Fraction(q)
    return ApproxReal(lambda k: (q, q), exact=q)


def as_real(x) -> ApproxReal:
    if isinstance(x, ApproxReal):
        return x
    if isinstance(x, (int, Fraction)):
        return from_rational(x)
    raise TypeError(f"cannot treat {type(x).__name__} as a real")


class Side(enum.Enum):
    ABOVE = "above"   # r > a
    BELOW = "below"   # r < b


def cotrans_compare(r: ApproxReal, a: Number, b: Number,
                    max_precision: int = MAX_PRECISION) -> Side:
    """Decide r > a or r < b for a < b.

    Refines until the interval is narrower than (b - a) / 4, then reads off
    its position. When both answers hold, BELOW is returned.
    """
    a, b = Fraction(a), Fraction(b)
    if not a < b:
        raise ValueError(f"cotransitive comparison needs a < b, got {a} and {b}")
    if r.exact is not None:
        return Side.BELOW if r.exact < b else Side.ABOVE
    gap = (b - a) / 4
    k = 0
    while dyadic(k) >= gap:
        k += 1
    while k <= max_precision:
        lo, hi = r.approximate(k)
        if hi - lo < gap:
            if hi < b:
                return Side.BELOW
            return Side.ABOVE
        k += 1
    raise PrecisionExhausted(
        f"interval still wider than {gap} at precision {max_precision}")


def certify_above(r: ApproxReal, t: Number, max_precision: int = MAX_PRECISION) -> Optional[Fraction]:
    """A rational lower bound of r strictly above t, or None if r <= t is seen.

    Returns None as well when the precision cap is reached undecided.
    """
    t = Fraction(t)
    if r.exact is not None:
        return r.exact if r.exact > t else None
    for k in range(max_precision + 1):
        lo, hi = r.approximate(k)
        if lo > t:
            return lo
        if hi <= t:
            return None
    return None


# ---------------------------------------------------------------- tent

def tent(n: int, x: Number) -> Fraction:
    """Exact tent: 2nx up to 1/(2n), 2 - 2nx down to 1/n, then 0.

    The descending piece is the one that makes the function continuous and
    vanish from 1/n on.
    """
    if n < 1:
        raise DomainError(f"tent index must be positive, got {n}")
    x = Fraction(x)
    if x < 0 or x > 1:
        raise DomainError(f"tent is defined on [0, 1], got {x}")
    peak = Fraction(1, 2 * n)
    if x <= peak:
        return 2 * n * x
    if x <= 2 * peak:
        return 2 - 2 * n * x
    return Fraction(0)


def tent_real(n: int, x: ApproxReal) -> ApproxReal:
    """Tent evaluated on an interval real by range enclosure."""
    if x.exact is not None:
        return from_rational(tent(n, x.exact))
    lip_bits = (2 * n).bit_length()
    peak = Fraction(1, 2 * n)

    def approx(k: int) -> Interval:
        lo, hi = x.approximate(k + lip_bits + 1)
        lo = min(max(lo, Fraction(0)), Fraction(1))
        hi = min(max(hi, Fraction(0)), Fraction(1))
        a, b = tent(n, lo), tent(n, hi)
        top = Fraction(1) if lo <= peak <= hi else max(a, b)
        return min(a, b), top

    return ApproxReal(approx)


# ---------------------------------------------------------------- parsing

_DYADIC = re.compile(r"\s*(-?\d+)\s*/\s*2\^(\d+)\s*$")


def parse_rational(text: str) -> Fraction:
    """Parse "p/q", "k/2^d" or an integer."""
    m = _DYADIC.match(text)
    if m:
        return Fraction(int(m.group(1)), 1 << int(m.group(2)))
    try:
        return Fraction(text.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise SpecError(f"not a rational literal: {text!r}") from exc


def format_rational(q: Fraction) -> str:
    """Inverse of parse_rational; dyadics print as k/2^d."""
    q = Fraction(q)
    d = q.denominator
    if d > 1 and d & (d - 1) == 0:
        return f"{q.numerator}/2^{d.bit_length() - 1}"
    return str(q)
