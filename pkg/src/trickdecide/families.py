"""Ready-made families, moduli and the tent-function reduction on [0, 1].

Two kinds of modulus appear here. Exact moduli exist for finite-support
families and are valid everywhere. Heuristic moduli read a bounded prefix of
the point and guess; they are named ``unsafe_*`` because a globally valid
computable modulus for a non-uniform family cannot exist, and the
refutation machinery is built to catch them.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional, Union

from .errors import InconsistentModulus, SpecError
from .exact_real import (ApproxReal, as_real, dyadic, format_rational, tent, tent_real)
from .metric import dyadic_space, otimes_metric
from .spaces import BitOracle, NatInfPoint, cummax, first_one_monotone, first_one_up_to, flip_index
from .tricks_core import AllZero, Exists, FamilyNatInf, LPOResult, PointwiseModulus, Refuted
from .tricks_metric import MetricContext, MetricFamily

OMEGA = "omega"


# ---------------------------------------------------------------- N-infinity families

def zero_family() -> FamilyNatInf:
    return FamilyNatInf(lambda i, a: 0, spec={"kind": "zero"})


def zero_modulus() -> PointwiseModulus:
    return PointwiseModulus(lambda a: 0, spec="exact")


def indicator_family(period: int = 1, offset: int = 0) -> FamilyNatInf:
    """f_i(a) = 1 iff a = i, decided from bits 0..i.

    With a period, only indices i = offset (mod period) are active. Every
    f_i has sup 1, attained at the point i, so convergence is never uniform.
    """
    if period < 1 or not 0 <= offset < period:
        raise SpecError(f"bad indicator period/offset {period}/{offset}")

    def fn(i: int, a) -> int:
        if i % period != offset:
            return 0
        for b in range(i):
            if a.query(b):
                return 0
        return a.query(i)

    spec: dict[str, Any] = {"kind": "indicator"}
    if period != 1:
        spec.update(period=period, offset=offset)
    return FamilyNatInf(fn, spec=spec)


def unsafe_heuristic_modulus(depth: int) -> PointwiseModulus:
    """1 + first 1 of the point if it shows up within ``depth`` bits, else 0.

    Exact for indicator families on points whose 1 is visible; wrong on
    every finite point past the horizon.
    """
    def at(a) -> int:
        p = first_one_up_to(a, depth)
        return 0 if p is None else p + 1

    return PointwiseModulus(at, spec=f"heuristic:{depth}")


@dataclass(frozen=True)
class FiniteSupportSpec:
    """Nonzero values f_i(p) = value at finitely many (i, p).

    ``first_one`` is a position below depth_bound, or "omega" meaning every
    point whose first 1 is not below depth_bound.
    """

    entries: tuple[tuple[int, Union[int, str], int], ...]
    index_bound: int
    depth_bound: int

    def __post_init__(self):
        seen = set()
        for i, p, v in self.entries:
            if not 0 <= i < self.index_bound:
                raise SpecError(f"entry index {i} outside [0, {self.index_bound})")
            if p != OMEGA and not (isinstance(p, int) and 0 <= p < self.depth_bound):
                raise SpecError(f"entry position {p!r} outside [0, {self.depth_bound})")
            if not isinstance(v, int) or v <= 0:
                raise SpecError(f"entry value must be a positive integer, got {v!r}")
            if (i, p) in seen:
                raise SpecError(f"duplicate entry ({i}, {p})")
            seen.add((i, p))

    def to_json(self) -> dict:
        return {"kind": "finite_support", "index_bound": self.index_bound,
                "depth_bound": self.depth_bound,
                "entries": [{"i": i, "first_one": p, "value": v} for i, p, v in self.entries]}

    @classmethod
    def from_json(cls, obj: dict) -> "FiniteSupportSpec":
        try:
            entries = tuple((int(e["i"]), e["first_one"] if e["first_one"] == OMEGA else int(e["first_one"]),
                             e["value"]) for e in obj.get("entries", []))
        except (KeyError, TypeError, ValueError) as exc:
            raise SpecError(f"malformed finite_support entries: {exc}") from exc
        index_bound = obj.get("index_bound")
        if index_bound is None:
            index_bound = 1 + max((i for i, _, _ in entries), default=-1)
        depth_bound = obj.get("depth_bound")
        if depth_bound is None:
            depth_bound = 1 + max((p for _, p, _ in entries if p != OMEGA), default=-1)
        return cls(entries, int(index_bound), int(depth_bound))

    @classmethod
    def random(cls, rng: random.Random) -> "FiniteSupportSpec":
        index_bound = rng.randint(1, 8)
        depth_bound = rng.randint(1, 10)
        entries: dict[tuple[int, Union[int, str]], int] = {}
        for _ in range(rng.randint(0, 5)):
            i = rng.randrange(index_bound)
            p: Union[int, str] = OMEGA if rng.random() < 0.2 else rng.randrange(depth_bound)
            entries[(i, p)] = rng.randint(1, 9)
        ordered = sorted(entries.items(), key=lambda kv: (kv[0][0], str(kv[0][1])))
        return cls(tuple((i, p, v) for (i, p), v in ordered), index_bound, depth_bound)


def finite_support_family(spec: FiniteSupportSpec) -> tuple[FamilyNatInf, PointwiseModulus]:
    """The family described by spec and its exact modulus."""
    table: dict[tuple[int, Union[int, str]], int] = {(i, p): v for i, p, v in spec.entries}
    top: dict[Union[int, str], int] = {}
    for i, p, _ in spec.entries:
        top[p] = max(top.get(p, -1), i)

    def position(a) -> Union[int, str]:
        p = first_one_up_to(a, spec.depth_bound)
        return OMEGA if p is None else p

    def fn(i: int, a) -> int:
        if i >= spec.index_bound:
            return 0
        return table.get((i, position(a)), 0)

    def at(a) -> int:
        return top.get(position(a), -1) + 1

    return FamilyNatInf(fn, spec=spec.to_json()), PointwiseModulus(at, spec="exact")


def build_family(spec: Union[str, dict]) -> FamilyNatInf:
    """Family from its JSON spec (or the bare kind name)."""
    fam, _ = build_family_and_exact_modulus(spec)
    return fam


def build_family_and_exact_modulus(spec: Union[str, dict]) -> tuple[FamilyNatInf, Optional[PointwiseModulus]]:
    if isinstance(spec, str):
        text = spec.strip()
        if text.startswith("{"):
            try:
                spec = json.loads(text)
            except json.JSONDecodeError as exc:
                raise SpecError(f"family spec is not valid JSON: {exc}") from exc
        elif text.startswith("random:"):
            spec = FiniteSupportSpec.random(random.Random(int(text[7:]))).to_json()
        else:
            spec = {"kind": text}
    kind = spec.get("kind")
    if kind == "zero":
        return zero_family(), zero_modulus()
    if kind == "indicator":
        return indicator_family(int(spec.get("period", 1)), int(spec.get("offset", 0))), None
    if kind == "finite_support":
        return finite_support_family(FiniteSupportSpec.from_json(spec))
    raise SpecError(f"unknown family kind {kind!r}")


def build_modulus(text: str, family_spec: Union[str, dict]) -> PointwiseModulus:
    """"exact" (zero and finite-support families only) or "heuristic:DEPTH"."""
    text = text.strip()
    if text.startswith("heuristic:"):
        try:
            return unsafe_heuristic_modulus(int(text[10:]))
        except ValueError as exc:
            raise SpecError(f"bad heuristic depth in {text!r}") from exc
    if text == "exact":
        _, exact = build_family_and_exact_modulus(family_spec)
        if exact is None:
            raise SpecError("no exact modulus exists for this family; use heuristic:DEPTH")
        return exact
    raise SpecError(f"unknown modulus spec {text!r}")


@dataclass(frozen=True)
class Case:
    label: str
    family: FamilyNatInf = field(compare=False)
    modulus: PointwiseModulus = field(compare=False)
    index_bound: int = 0
    depth_bound: int = 0


def seeded_cases(seed: int, count: int = 100) -> list[Case]:
    """A deterministic mix of shipped families with their moduli."""
    rng = random.Random(seed)
    cases = []
    for t in range(count):
        roll = rng.random()
        if roll < 0.08:
            cases.append(Case(f"{t}:zero", zero_family(), zero_modulus()))
        elif roll < 0.16:
            cases.append(Case(f"{t}:indicator", indicator_family(), unsafe_heuristic_modulus(64)))
        elif roll < 0.22:
            period = rng.randint(2, 4)
            offset = rng.randrange(period)
            cases.append(Case(f"{t}:indicator/{period}+{offset}", indicator_family(period, offset),
                              unsafe_heuristic_modulus(64)))
        else:
            spec = FiniteSupportSpec.random(rng)
            fam, mod = finite_support_family(spec)
            cases.append(Case(f"{t}:finite_support", fam, mod, spec.index_bound, spec.depth_bound))
    return cases


def bounded_observation_function(rng: random.Random) -> tuple[Callable[[NatInfPoint], int], int]:
    """A total function reading at most the first d bits, with d <= 16."""
    d = rng.randint(1, 16)
    table = [rng.randint(0, 3) for _ in range(d + 1)]

    def fn(a) -> int:
        p = first_one_up_to(a, d)
        return table[d if p is None else p]

    return fn, d


# ---------------------------------------------------------------- tent family on [0, 1]

def tent_family() -> MetricFamily:
    """f_n the tent of height 1 on [0, 1/n] (f_0 taken to be 0); limit 0."""
    def eval_n(n: int, x) -> ApproxReal:
        if n == 0:
            return as_real(0)
        return tent_real(n, as_real(x))

    return MetricFamily(eval_n, lambda x: as_real(0), dyadic_space(), spec={"kind": "tent"})


def tent_bound(lower: Fraction, eps: Fraction) -> int:
    """Least-effort N with tent(n, x) < eps for all n >= N and x >= lower > 0."""
    if eps > 1:
        return 0
    return int((2 - eps) / (2 * lower)) + 1


def unsafe_tent_modulus(horizon: int) -> Callable[[Any, Fraction], int]:
    """Pointwise modulus for the tent family that looks only 2**-horizon deep.

    A point whose lower bound at that precision is positive gets the exact
    bound; anything indistinguishable from 0 is treated as 0, where every
    tent vanishes. Wrong on positive points below the horizon.
    """
    def modulus(x, eps: Fraction) -> int:
        lo = as_real(x).lower(horizon)
        # snap to the 2**-horizon grid so exact and lazy copies of a point agree
        lo = Fraction(int(lo * (1 << horizon)), 1 << horizon) if lo > 0 else lo
        return tent_bound(lo, Fraction(eps)) if lo > 0 else 0

    return modulus


def tent_context(horizon: int = 64, epsilon=Fraction(1, 2)) -> MetricContext:
    """x_m = 1/2^m -> 0 in the unit interval, tent family, heuristic modulus."""
    space = dyadic_space()
    return MetricContext(
        domain=space, family=tent_family(), xs=lambda m: space.point(dyadic(m)),
        x=space.point(0), mu=lambda k: k.bit_length(), mu_bits=lambda k: k + 1,
        modulus=unsafe_tent_modulus(horizon), epsilon=Fraction(epsilon),
        spec={"family": {"kind": "tent"}, "xs": "dyadic:1/2^m", "modulus": f"heuristic:{horizon}"})


@dataclass(frozen=True)
class TentRefutation:
    """tent(j, point) >= 1/2 although j >= bound, the modulus value at point."""

    point: str
    j: int
    value: Fraction
    bound: int

    def to_json(self) -> dict:
        return {"type": "tent_refutation", "point": self.point, "j": self.j,
                "value": format_rational(self.value), "bound": self.bound}


def prop3_reduce(a: BitOracle, horizon: int = 64, budget: int = 256) -> LPOResult:
    """Decide whether a has a 1 from pointwise convergence of the tent family.

    z is the limit of the sequence that is 0 while a is zero and 1/2^m once a
    flips at m. A modulus N at z with threshold 1/2 settles a(N + 1); a 1 seen
    later refutes the modulus, since tent(2^(m-1), 1/2^m) = 1.
    """
    space = dyadic_space()
    inc = cummax(a)
    z = otimes_metric(inc, lambda m: space.point(dyadic(m)), space.point(0), space, drift=dyadic)
    half = Fraction(1, 2)
    bound = unsafe_tent_modulus(horizon)(z, half)
    if inc.query(bound + 1):
        return Exists(first_one_monotone(inc, 0, bound + 1))
    p = first_one_up_to(a, budget)
    if p is None:
        return AllZero()
    m = flip_index(inc, p)
    z.resolve(budget + 1)
    if z.exact is None or m == 0:
        raise InconsistentModulus(f"stream flips at {m} but the limit point did not settle")
    j = 1 << (m - 1)
    value = tent(j, z.exact)
    if value < half or j < bound:
        raise InconsistentModulus(f"flip at {m} did not yield a refutation")
    return Refuted(TentRefutation(format_rational(z.exact), j, value, bound))
