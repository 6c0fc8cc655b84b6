"""Decision procedures for sequences of functions from N-infinity to N.

Given a family f_i converging pointwise to 0 together with a pointwise
modulus M (f_i(a) = 0 for all i >= M(a)), these procedures decide between a
uniform bound and an explicit stream of non-uniformity witnesses, and turn
such a stream into a decision for any binary sequence.

The modulus is trusted, never verified. When it lies, the procedures either
return an answer whose certificate fails re-validation, or produce a
:class:`ModulusRefutation` that exhibits the lie.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Optional, Union

from .errors import BudgetExceeded, InconsistentModulus, InvalidWitness
from .spaces import (BinaryStream, BitOracle, NatInfPoint, cummax, finite_point,
                     first_one_monotone, first_one_up_to, flip_index, leq_below,
                     natinf_literal, omega, otimes_natinf, parse_point, prepend_zeros)


class FamilyNatInf:
    """An indexed family i, a -> f_i(a) of functions N-infinity -> N."""

    def __init__(self, fn: Callable[[int, NatInfPoint], int], spec: Any = None):
        self._fn = fn
        self.spec = spec

    def eval(self, i: int, alpha) -> int:
        return self._fn(i, alpha)

    def __repr__(self) -> str:
        return f"FamilyNatInf({self.spec!r})"


class PointwiseModulus:
    """A claimed bound: eval(i, a) = 0 for every i >= at(a)."""

    def __init__(self, fn: Callable[[NatInfPoint], int], spec: str = "custom"):
        self._fn = fn
        self.spec = spec

    def at(self, alpha) -> int:
        return self._fn(alpha)

    def __repr__(self) -> str:
        return f"PointwiseModulus({self.spec!r})"


# ---------------------------------------------------------------- outcomes

@dataclass(frozen=True)
class Witness:
    """eval(k, alpha) != 0 with k >= n and alpha >= n."""

    n: int
    k: int
    alpha: NatInfPoint = field(compare=False)
    value: int = 0

    def first_one(self, depth: int = 4096) -> Optional[int]:
        return first_one_up_to(self.alpha, depth)


class WitnessStream:
    """Lazy, memoised n -> Witness."""

    def __init__(self, produce: Callable[[int], Witness]):
        self._produce = produce
        self._memo: dict[int, Witness] = {}

    def __getitem__(self, n: int) -> Witness:
        if n not in self._memo:
            self._memo[n] = self._produce(n)
        return self._memo[n]

    def take(self, count: int, start: int = 0) -> list[Witness]:
        return [self[n] for n in range(start, start + count)]


@dataclass(frozen=True)
class Uniform:
    """For all i >= N and all a >= N: f_i(a) = 0."""

    N: int
    branch = "uniform"


@dataclass(frozen=True)
class NonUniform:
    witnesses: WitnessStream = field(compare=False)
    branch = "non_uniform"


TrickOutcome = Union[Uniform, NonUniform]


@dataclass(frozen=True)
class EventuallyConstant:
    """fn(n) = fn(omega) for every n >= N."""

    N: int


@dataclass(frozen=True)
class DisagreementStream:
    """Strictly increasing positions p with fn(p) != fn(omega)."""

    positions: Callable[[int], int] = field(compare=False)

    def take(self, count: int) -> list[int]:
        return [self.positions(t) for t in range(count)]


@dataclass(frozen=True)
class ModulusRefutation:
    """A point at which the modulus claims vanishing but the family is not zero.

    ``point`` is a literal that rebuilds the point; ``j >= bound`` where bound
    is the modulus value there, yet eval(j, point) = value != 0.
    """

    point: str
    j: int
    value: int
    bound: int

    def to_json(self) -> dict:
        return {"type": "modulus_refutation", "point": self.point, "j": self.j,
                "value": self.value, "bound": self.bound}


@dataclass(frozen=True)
class Exists:
    index: int
    result = "exists"


@dataclass(frozen=True)
class AllZero:
    result = "all_zero"


@dataclass(frozen=True)
class Refuted:
    certificate: Any
    result = "refuted"


LPOResult = Union[Exists, AllZero, Refuted]


# ---------------------------------------------------------------- re-indexing

def offset_family(f: FamilyNatInf, shift: int) -> FamilyNatInf:
    """i -> f_{i + shift}."""
    if shift == 0:
        return f
    return FamilyNatInf(lambda i, a: f.eval(i + shift, a), spec={"offset": shift, "of": f.spec})


def offset_modulus(M: PointwiseModulus, shift: int) -> PointwiseModulus:
    if shift == 0:
        return M
    return PointwiseModulus(lambda a: max(M.at(a) - shift, 0), spec=f"offset:{shift}:{M.spec}")


def tail_family(f: FamilyNatInf, n: int) -> FamilyNatInf:
    """g_j(b) = f_{n+j}(0^n b): the part of f living on indices >= n and points >= n."""
    if n == 0:
        return f
    return FamilyNatInf(lambda j, b: f.eval(n + j, prepend_zeros(n, b)),
                        spec={"tail": n, "of": f.spec})


def tail_modulus(M: PointwiseModulus, n: int) -> PointwiseModulus:
    if n == 0:
        return M
    return PointwiseModulus(lambda b: max(M.at(prepend_zeros(n, b)) - n, 0),
                            spec=f"tail:{n}:{M.spec}")


# ---------------------------------------------------------------- procedures

def decide_point(f: FamilyNatInf, M: PointwiseModulus, gamma) -> Optional[int]:
    """Least i with f_i(gamma) != 0, or None when f vanishes at gamma.

    Only indices below M(gamma) are inspected.
    """
    for i in range(M.at(gamma)):
        if f.eval(i, gamma) != 0:
            return i
    return None


def decide_family(f: FamilyNatInf, M: PointwiseModulus) -> Optional[tuple[int, NatInfPoint]]:
    """Some (i, a) with f_i(a) != 0, or None when f vanishes everywhere.

    Checks omega first, then the point beta that is omega while the flags
    lam_k = [f is somewhere nonzero at k] stay 0 and freezes at the least
    flagged k. f vanishes everywhere exactly when it vanishes at beta.
    """
    w = omega()
    i = decide_point(f, M, w)
    if i is not None:
        return i, w
    flags = BinaryStream(lambda k: 0 if decide_point(f, M, finite_point(k)) is None else 1)
    running = cummax(flags)
    beta = NatInfPoint(running.query)
    j = decide_point(f, M, beta)
    if j is not None:
        return j, beta
    return None


def third_trick(f: FamilyNatInf, M: PointwiseModulus) -> TrickOutcome:
    """Decide uniform convergence of f to 0 or produce non-uniformity witnesses."""
    nonzero_at_omega = decide_point(f, M, omega())
    if nonzero_at_omega is not None:
        # f is nonzero at omega only below M(omega): work on the tail past it.
        shift = M.at(omega())
        inner = third_trick(offset_family(f, shift), offset_modulus(M, shift))
        if isinstance(inner, Uniform):
            return Uniform(inner.N + shift)
        src = inner.witnesses
        return NonUniform(WitnessStream(
            lambda n: Witness(n, src[n].k + shift, src[n].alpha, src[n].value)))

    tails: dict[int, Optional[tuple[int, NatInfPoint]]] = {}

    def tail_decision(n: int):
        if n not in tails:
            tails[n] = decide_family(tail_family(f, n), tail_modulus(M, n))
        return tails[n]

    # lam_n = 1: f vanishes for all i >= n on all points >= n.
    lam = BinaryStream(lambda n: 1 if tail_decision(n) is None else 0, monotone=True)
    if lam.query(0):
        return Uniform(0)

    def witness(n: int) -> Witness:
        found = tail_decision(n)
        if found is None:
            raise InconsistentModulus(
                f"tail {n} vanishes although the non-uniform branch was decided")
        j, beta = found
        alpha = prepend_zeros(n, beta)
        return Witness(n, n + j, alpha, f.eval(n + j, alpha))

    alphas = WitnessStream(witness)
    gamma = otimes_natinf(lam, lambda m: alphas[m].alpha)
    nonzero = [i for i in range(M.at(gamma)) if f.eval(i, gamma) != 0]
    if not nonzero:
        return NonUniform(alphas)
    k = max(nonzero)
    first = first_one_monotone(lam, 0, k + 1)
    if first is None:
        raise InconsistentModulus(
            f"f_{k} is nonzero at the limit point but no uniform bound appears by {k + 1}")
    return Uniform(first)


def second_trick(fn: Callable[[NatInfPoint], int], scan_cap: int = 1 << 20
                 ) -> Union[EventuallyConstant, DisagreementStream]:
    """Decide whether fn(n) = fn(omega) from some n on, by reduction to third_trick."""
    at_omega = fn(omega())

    def position(a) -> Optional[int]:
        if fn(a) == at_omega:
            return None
        # fn(a) != fn(omega) forces a != omega, so the search ends.
        i = 0
        while not a.query(i):
            i += 1
            if i > scan_cap:
                raise BudgetExceeded(f"no 1 within {scan_cap} bits of a point where fn differs")
        return i

    def h(i: int, a) -> int:
        p = position(a)
        return 0 if p is None or p < i else 1

    def modulus(a) -> int:
        p = position(a)
        return 0 if p is None else p + 1

    outcome = third_trick(FamilyNatInf(h, spec="second_trick"), PointwiseModulus(modulus, "second_trick"))
    if isinstance(outcome, Uniform):
        return EventuallyConstant(outcome.N)
    ws = outcome.witnesses
    chain: list[int] = []

    def positions(t: int) -> int:
        while len(chain) <= t:
            n = chain[-1] + 1 if chain else 0
            chain.append(first_one_up_to(ws[n].alpha, scan_cap))
        return chain[t]

    return DisagreementStream(positions)


def lpo_extract(witnesses: WitnessStream, M: PointwiseModulus, f: FamilyNatInf,
                a: BitOracle, budget: int = 256) -> LPOResult:
    """Decide whether a has a 1, using non-uniformity witnesses and the modulus.

    Returns Exists(first index of a 1) or AllZero. If a has a 1 that the
    modulus should have revealed but did not, and it is visible within
    ``budget`` bits, the modulus is refuted instead.
    """
    inc = cummax(a)
    z = otimes_natinf(inc, lambda m: witnesses[m].alpha)
    bound = M.at(z)
    if inc.query(bound + 1):
        return Exists(first_one_monotone(inc, 0, bound + 1))
    p = first_one_up_to(a, budget)
    if p is None:
        return AllZero()
    m = flip_index(inc, p)
    w = witnesses[m]
    if f.eval(w.k, w.alpha) == 0:
        raise InvalidWitness(f"witness {m} claims f_{w.k} != 0 but it vanishes")
    value = f.eval(w.k, z)
    if value == 0 or w.k < bound:
        raise InconsistentModulus(f"flip at {m} did not yield a refutation")
    return Refuted(ModulusRefutation(natinf_literal(z), w.k, value, bound))


# ---------------------------------------------------------------- validation

def validate_refutation(cert: ModulusRefutation, f: FamilyNatInf, M: PointwiseModulus) -> bool:
    point = parse_point(cert.point)
    value = f.eval(cert.j, point)
    return value != 0 and value == cert.value and cert.j >= M.at(point)


def validate_witness(w: Witness, f: FamilyNatInf) -> bool:
    return w.k >= w.n and leq_below(w.alpha, w.n) and f.eval(w.k, w.alpha) != 0


def check_uniform(N: int, f: FamilyNatInf, index_bound: int, depth_bound: int) -> list[tuple[int, str]]:
    """Brute-force counterexamples to Uniform(N) over i <= index_bound and
    points {k : k <= depth_bound} together with omega."""
    points = [(f"fin:{k}", finite_point(k)) for k in range(N, depth_bound + 1)]
    points.append(("omega", omega()))
    bad = []
    for i in range(N, index_bound + 1):
        for name, p in points:
            if f.eval(i, p) != 0:
                bad.append((i, name))
    return bad
