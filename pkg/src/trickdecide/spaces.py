"""Points of N-infinity, binary streams and Cantor points as lazy bit oracles.

A point is never materialised: it is a function from indices to bits with a
memo in front of it, so every algorithm observes only finitely many bits and
repeated observations are guaranteed to agree.
"""

from __future__ import annotations

import re
from typing import Callable, Optional

from .errors import MonotonicityViolation, SpecError

BitFn = Callable[[int], int]


class BitOracle:
    """Deterministic, memoised map from naturals to {0, 1}."""

    kind = "stream"

    def __init__(self, fn: BitFn, label: Optional[str] = None, monotone: bool = False):
        self._fn = fn
        self._memo: dict[int, int] = {}
        self.label = label
        # Declared monotone: the bits are checked as they are observed.
        self.monotone = monotone
        self._min_one: Optional[int] = None
        self._max_zero: Optional[int] = None

    def query(self, i: int) -> int:
        if i < 0:
            raise IndexError(f"negative bit index {i}")
        try:
            return self._memo[i]
        except KeyError:
            pass
        bit = self._fn(i)
        if bit not in (0, 1):
            raise ValueError(f"oracle returned {bit!r} at index {i}, expected a bit")
        self._memo[i] = bit
        if self.monotone:
            self._observe(i, bit)
        return bit

    __call__ = query

    def _observe(self, i: int, bit: int) -> None:
        if bit:
            if self._min_one is None or i < self._min_one:
                self._min_one = i
        elif self._max_zero is None or i > self._max_zero:
            self._max_zero = i
        if (self._min_one is not None and self._max_zero is not None
                and self._min_one < self._max_zero):
            raise MonotonicityViolation(self._min_one, self._max_zero)

    def prefix(self, n: int) -> tuple[int, ...]:
        return tuple(self.query(i) for i in range(n))

    def __repr__(self) -> str:
        name = type(self).__name__
        if self.label is not None:
            return f"{name}({self.label!r})"
        return f"{name}(<{''.join(map(str, self.prefix(8)))}...>)"


class BinaryStream(BitOracle):
    """An arbitrary binary sequence, the input to omniscience questions."""


class CantorPoint(BitOracle):
    """A point of Cantor space."""

    kind = "cantor"


class NatInfPoint(BitOracle):
    """An increasing binary sequence; the point n is 0^n 1 1 1 ..., omega is all zeros."""

    kind = "natinf"

    def __init__(self, fn: BitFn, label: Optional[str] = None):
        super().__init__(fn, label, monotone=True)


class InstrumentedPoint:
    """Wraps any point and records the highest bit index ever asked for."""

    def __init__(self, inner):
        self.inner = inner
        self.high_water: Optional[int] = None
        self.kind = getattr(inner, "kind", "stream")
        self.label = getattr(inner, "label", None)

    def query(self, i: int) -> int:
        if self.high_water is None or i > self.high_water:
            self.high_water = i
        return self.inner.query(i)

    __call__ = query

    def prefix(self, n: int) -> tuple[int, ...]:
        return tuple(self.query(i) for i in range(n))


def instrument(p) -> InstrumentedPoint:
    return InstrumentedPoint(p)


def finite_point(n: int) -> NatInfPoint:
    if n < 0:
        raise ValueError("finite points are indexed by naturals")
    return NatInfPoint(lambda i: 1 if i >= n else 0, label=f"fin:{n}")


def omega() -> NatInfPoint:
    return NatInfPoint(lambda i: 0, label="omega")


def first_one_up_to(p, depth: int) -> Optional[int]:
    """Least i < depth with p.query(i) == 1, reading bits in order."""
    for i in range(depth):
        if p.query(i):
            return i
    return None


def first_one_monotone(p, lo: int, hi: int) -> Optional[int]:
    """Least i in [lo, hi] with a 1, for a stream known to be increasing.

    Bisection, so only O(log(hi - lo)) bits are read.
    """
    if hi < lo or not p.query(hi):
        return None
    while lo < hi:
        mid = (lo + hi) // 2
        if p.query(mid):
            hi = mid
        else:
            lo = mid + 1
    return lo


def leq_below(p, n: int) -> bool:
    """The decidable predicate p >= n (all of the first n bits are zero)."""
    return all(p.query(i) == 0 for i in range(n))


def prepend_zeros(n: int, p: NatInfPoint) -> NatInfPoint:
    """0^n followed by p; every point above n arises this way."""
    if n == 0:
        return p
    label = None
    if p.label == "omega":
        label = "omega"
    elif p.label and p.label.startswith("fin:"):
        label = f"fin:{int(p.label[4:]) + n}"
    return NatInfPoint(lambda i: 0 if i < n else p.query(i - n), label=label)


def cummax(a: BitOracle) -> BinaryStream:
    """Running maximum; has a 1 exactly where a first has one, and keeps it."""
    if a.monotone:
        return a
    state = {"scanned": -1, "first": None}

    def bit(i: int) -> int:
        first = state["first"]
        if first is not None:
            return 1 if i >= first else 0
        j = state["scanned"] + 1
        while j <= i:
            if a.query(j):
                state["first"] = j
                return 1
            j += 1
        state["scanned"] = max(state["scanned"], i)
        return 0

    return BinaryStream(bit, monotone=True)


def flip_index(a: BitOracle, first_one: int) -> int:
    """Index m with a(m) = 0 and a(m + 1) = 1 for an increasing stream.

    A stream starting with 1 is treated as flipping at m = 0 (the point
    supplied for m = 0 is used).
    """
    return max(first_one - 1, 0)


def otimes_natinf(a: BitOracle, points: Callable[[int], NatInfPoint]) -> NatInfPoint:
    """Sit at omega while a is zero and become points(m) once a flips at m.

    Requires a increasing and points(m) >= m. Bit j is 0 when a(j+1) = 0 and
    otherwise bit j of points(m) for the flip index m <= j.
    """
    if not a.monotone:
        raise ValueError("otimes needs an increasing stream; apply cummax first")
    state: dict[str, Optional[int]] = {"m": None}

    def bit(j: int) -> int:
        if not a.query(j + 1):
            return 0
        if state["m"] is None:
            state["m"] = flip_index(a, first_one_monotone(a, 0, j + 1))
        return points(state["m"]).query(j)

    return NatInfPoint(bit)


# ---------------------------------------------------------------- literals

_FIN = re.compile(r"fin:(\d+)$")
_ZEROS_THEN_ONES = re.compile(r"(?:stream:)?0\^(\d+)'?1$")
_BITS = re.compile(r"stream:bits:([01]+)$")


def zeros_then_ones(k: int) -> BinaryStream:
    return BinaryStream(lambda i: 1 if i >= k else 0, label=f"0^{k}'1", monotone=True)


def zero_stream() -> BinaryStream:
    return BinaryStream(lambda i: 0, label="zero", monotone=True)


def parse_point(text: str) -> BitOracle:
    """Parse "omega", "fin:N", "stream:0^k1" or "stream:bits:0101"."""
    text = text.strip()
    if text == "omega":
        return omega()
    m = _FIN.match(text)
    if m:
        return finite_point(int(m.group(1)))
    return parse_stream(text)


def parse_stream(text: str) -> BinaryStream:
    """Parse a stream literal; "zero", "0^k'1", "stream:0^k1" or "stream:bits:..."."""
    text = text.strip()
    if text in ("zero", "stream:zero"):
        return zero_stream()
    m = _ZEROS_THEN_ONES.match(text)
    if m:
        return zeros_then_ones(int(m.group(1)))
    m = _BITS.match(text)
    if m:
        bits = tuple(int(c) for c in m.group(1))
        last = bits[-1]
        return BinaryStream(lambda i: bits[i] if i < len(bits) else last, label=text)
    raise SpecError(f"unrecognised point or stream literal {text!r}")


def natinf_literal(p, depth: int = 4096) -> str:
    """Literal for a point of N-infinity, read off its first 1 within depth.

    Falls back to "omega" when no 1 is visible; a certificate built on that
    literal only validates if the evaluation really did not look further.
    """
    if p.label == "omega" or (p.label and _FIN.match(p.label)):
        return p.label
    first = first_one_up_to(p, depth)
    return "omega" if first is None else f"fin:{first}"
