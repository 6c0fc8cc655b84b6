"""Complete metric spaces with lazy Cauchy limits.

Concrete instances: N-infinity and Cantor space with the first-difference
metric, the dyadic unit interval, and the naturals with the discrete metric.
A limit is a new point that pulls on the sequence at the indices its Cauchy
modulus dictates, so building it costs nothing until it is observed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Optional

from .errors import DomainError, SpecError
from .exact_real import ApproxReal, Interval, as_real, dyadic, from_rational
from .spaces import (BitOracle, CantorPoint, NatInfPoint, cummax, first_one_monotone,
                     flip_index)


@dataclass
class CauchySeq:
    """at(n) is the n-th term; kappa(k) is an index past which terms are 2**-k close."""

    at: Callable[[int], Any]
    kappa: Callable[[int], int]


class SwitchSequence(CauchySeq):
    """Sits at ``base`` until ``switched`` first fires at some m >= start, then
    stays at ``target(m)`` forever.

    This is the shape of every Cauchy sequence the decision procedures build.
    ``switched`` is either a callable returning a bool or, when ``monotone``,
    an increasing bit oracle that can be bisected.
    """

    def __init__(self, base, target: Callable[[int], Any], switched, kappa: Callable[[int], int],
                 start: int = 0, monotone: bool = False):
        super().__init__(at=self._at, kappa=kappa)
        self.base = base
        self.target = target
        self.switched = switched
        self.start = start
        self.monotone = monotone
        self._scanned = start - 1
        self._hit: Optional[int] = None

    def first_switch(self, upto: int) -> Optional[int]:
        if self._hit is not None:
            return self._hit if self._hit <= upto else None
        if upto <= self._scanned:
            return None
        if self.monotone:
            m = first_one_monotone(self.switched, max(self.start, self._scanned + 1), upto)
        else:
            m = None
            for j in range(max(self.start, self._scanned + 1), upto + 1):
                if self.switched(j):
                    m = j
                    break
        if m is None:
            self._scanned = upto
        else:
            self._hit = m
        return m

    def _at(self, n: int):
        m = self.first_switch(n)
        return self.base if m is None else self.target(m)


class LimitReal(ApproxReal):
    """Limit of a Cauchy sequence of reals.

    When the sequence is a SwitchSequence whose switch has been seen, the limit
    is the switched-to term exactly and is reported as such.
    """

    __slots__ = ("seq",)

    def __init__(self, seq: CauchySeq):
        super().__init__(self._limit_approx)
        self.seq = seq

    def _limit_approx(self, k: int) -> Interval:
        n = self.seq.kappa(k + 2)
        settled = self.resolve(n)
        if settled is not None:
            return settled.approximate(k)
        lo, hi = as_real(self.seq.at(n)).approximate(k + 2)
        slack = dyadic(k + 2)
        return lo - slack, hi + slack

    def resolve(self, upto: int) -> Optional[ApproxReal]:
        """The exact term this limit equals, if its switch happens by ``upto``."""
        if not isinstance(self.seq, SwitchSequence):
            return None
        m = self.seq.first_switch(upto)
        if m is None:
            return None
        point = as_real(self.seq.target(m))
        if point.exact is not None:
            self.exact = point.exact
        elif isinstance(point, LimitReal):
            inner = point.resolve(upto)
            if inner is not None and inner.exact is not None:
                self.exact = inner.exact
        return point


class SpaceHandle:
    kind = "abstract"

    def distance(self, p, q) -> ApproxReal:
        raise NotImplementedError

    def limit(self, seq: CauchySeq):
        raise NotImplementedError

    def literal(self, p) -> str:
        raise NotImplementedError


class _BitSpace(SpaceHandle):
    point_type: type = CantorPoint

    def distance(self, p, q) -> ApproxReal:
        def approx(k: int) -> Interval:
            for i in range(k):
                if p.query(i) != q.query(i):
                    d = dyadic(i)
                    return d, d
            return Fraction(0), dyadic(k)

        return ApproxReal(approx)

    def limit(self, seq: CauchySeq):
        return self.point_type(lambda j: seq.at(seq.kappa(j + 1)).query(j))


class NatInfSpace(_BitSpace):
    kind = "natinf"
    point_type = NatInfPoint

    def literal(self, p) -> str:
        from .spaces import natinf_literal
        return natinf_literal(p)


class CantorSpace(_BitSpace):
    kind = "cantor"
    point_type = CantorPoint

    def literal(self, p) -> str:
        return "stream:bits:" + "".join(map(str, p.prefix(64)))


class DyadicSpace(SpaceHandle):
    """The unit interval; exact points are dyadic (or any) rationals."""

    kind = "dyadic01"

    def point(self, q) -> ApproxReal:
        q = Fraction(q)
        if not 0 <= q <= 1:
            raise DomainError(f"{q} is outside [0, 1]")
        return from_rational(q)

    def distance(self, p, q) -> ApproxReal:
        return abs(as_real(p) - as_real(q))

    def limit(self, seq: CauchySeq) -> LimitReal:
        return LimitReal(seq)

    def literal(self, p) -> str:
        from .exact_real import format_rational
        p = as_real(p)
        if p.exact is None:
            raise ValueError("only exact points have a literal")
        return format_rational(p.exact)


class DiscreteSpace(SpaceHandle):
    """The naturals with distance 1 between distinct points."""

    kind = "discrete"

    def distance(self, p, q) -> ApproxReal:
        return from_rational(0 if p == q else 1)

    def limit(self, seq: CauchySeq):
        return seq.at(seq.kappa(1))

    def literal(self, p) -> str:
        return str(p)


def natinf_space() -> NatInfSpace:
    return NatInfSpace()


def cantor_space() -> CantorSpace:
    return CantorSpace()


def dyadic_space() -> DyadicSpace:
    return DyadicSpace()


def discrete_space() -> DiscreteSpace:
    return DiscreteSpace()


SPACES = {"natinf": natinf_space, "dyadic01": dyadic_space, "cantor": cantor_space}


def space_from_name(name: str) -> SpaceHandle:
    try:
        return SPACES[name]()
    except KeyError:
        raise SpecError(f"unknown space {name!r}; expected one of {sorted(SPACES)}") from None


def drift_modulus(drift: Callable[[int], Fraction]) -> Callable[[int], int]:
    """kappa for a sequence whose m-th jump target lies within drift(m) of the base.

    Returns the least K >= 1 with drift(K - 1) <= 2**-(k+1); drift must be
    non-increasing and tend to 0.
    """
    def kappa(k: int) -> int:
        bound = dyadic(k + 1)
        if drift(0) <= bound:
            return 1
        hi = 1
        while drift(hi) > bound:
            hi *= 2
        lo = hi // 2
        while lo + 1 < hi:
            mid = (lo + hi) // 2
            if drift(mid) <= bound:
                hi = mid
            else:
                lo = mid
        return hi + 1

    return kappa


def otimes_metric(a: BitOracle, points: Callable[[int], Any], base, space: SpaceHandle,
                  drift: Callable[[int], Fraction]):
    """Limit of the sequence sitting at ``base`` while a is zero and jumping to
    points(m) once a flips at m.

    a must be increasing (pass ``cummax`` of an arbitrary stream) and
    points(m) must lie within drift(m) of base.
    """
    if not a.monotone:
        a = cummax(a)
    seq = SwitchSequence(base, lambda p: points(flip_index(a, p)), a,
                         kappa=drift_modulus(drift), monotone=True)
    return space.limit(seq)
