"""The uniform-or-witnesses decision on a complete metric space.

A family f_i : X -> Y converging pointwise to f, a sequence x_m -> x and a
tolerance eps are given. The procedure decides between

* Close(N): rho(f(x_n), f_i(x_n)) < eps for all n, i >= N, and
* Witnesses: z_n -> x and k_n >= n with rho(f_{k_n}(z_n), f(z_n)) > eps/4.

Strict real comparisons are never made; every decision is a cotransitive
comparison against a pair of rational thresholds (eps/4 < eps/2 < eps).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Optional, Union

from .errors import InconsistentModulus, InvalidWitness
from .exact_real import ApproxReal, Side, certify_above, cotrans_compare, dyadic, format_rational
from .metric import (LimitReal, SpaceHandle, SwitchSequence, discrete_space, natinf_space,
                     otimes_metric)
from .spaces import BinaryStream, BitOracle, cummax, finite_point, first_one_monotone, first_one_up_to, flip_index, omega
from .tricks_core import AllZero, Exists, FamilyNatInf, LPOResult, PointwiseModulus, Refuted


@dataclass
class MetricFamily:
    eval_n: Callable[[int, Any], Any]
    eval_lim: Callable[[Any], Any]
    codomain: SpaceHandle
    spec: Any = None

    def gap(self, i: int, p) -> ApproxReal:
        """rho(f_i(p), f(p))."""
        return self.codomain.distance(self.eval_n(i, p), self.eval_lim(p))


@dataclass
class MetricContext:
    """Everything the decision consumes.

    ``mu(k)``: rho(x_m, x) < 1/k for m >= mu(k).
    ``mu_bits(k)``: rho(x_m, x) < 2**-k for m >= mu_bits(k); defaults to
    mu(2**k), which is valid but can be very slow.
    ``modulus(p, eps)``: claimed index past which rho(f_i(p), f(p)) < eps.
    """

    domain: SpaceHandle
    family: MetricFamily
    xs: Callable[[int], Any]
    x: Any
    mu: Callable[[int], int]
    modulus: Callable[[Any, Fraction], int]
    epsilon: Fraction
    mu_bits: Optional[Callable[[int], int]] = None
    spec: Any = None

    def __post_init__(self):
        self.epsilon = Fraction(self.epsilon)
        if self.epsilon <= 0:
            raise ValueError("epsilon must be positive")
        if self.mu_bits is None:
            mu = self.mu
            self.mu_bits = lambda k: mu(1 << k)

    def start(self, n: int) -> int:
        """First sequence index inspected at scale n: within 1/n and 2**-n of x."""
        return max(self.mu(max(n, 1)), self.mu_bits(n))


@dataclass(frozen=True)
class ScaleWitness:
    """rho(z, x) <= 2**-n <= 1/n and rho(f_k(z), f(z)) > eps/4, k >= n."""

    n: int
    k: int
    z: Any = field(compare=False)


@dataclass(frozen=True)
class Close:
    N: int
    branch = "close"


class MetricWitnessStream:
    def __init__(self, produce: Callable[[int], ScaleWitness]):
        self._produce = produce
        self._memo: dict[int, ScaleWitness] = {}

    def __getitem__(self, n: int) -> ScaleWitness:
        if n not in self._memo:
            self._memo[n] = self._produce(n)
        return self._memo[n]

    def take(self, count: int, start: int = 0) -> list[ScaleWitness]:
        return [self[n] for n in range(start, start + count)]


@dataclass(frozen=True)
class Witnesses:
    stream: MetricWitnessStream = field(compare=False)
    branch = "witnesses"


MetricOutcome = Union[Close, Witnesses]


def _scan_above(gap: Callable[[int], ApproxReal], lo: int, hi: int,
                a: Fraction, b: Fraction) -> Optional[int]:
    """Some i in [lo, hi) whose gap compares above a against (a, b), else None.

    Scans from the top of the window down; any fixed order is valid and the
    top is where pointwise-convergent families are most often still large.
    """
    for i in range(hi - 1, lo - 1, -1):
        if cotrans_compare(gap(i), a, b) is Side.ABOVE:
            return i
    return None


class _Decider:
    """Shared state for one run: the flags are memoised across calls."""

    def __init__(self, ctx: MetricContext, shift: int):
        self.ctx = ctx
        self.shift = shift
        self.fam = ctx.family
        self._local: dict[int, Optional[ScaleWitness]] = {}

    def gap(self, i: int, p) -> ApproxReal:
        return self.fam.gap(i + self.shift, p)

    def bound(self, p, eps: Fraction) -> int:
        return max(self.ctx.modulus(p, eps) - self.shift, 0)

    def local(self, n: int) -> Optional[ScaleWitness]:
        if n not in self._local:
            self._local[n] = self._local_decide(n)
        return self._local[n]

    def _local_decide(self, n: int) -> Optional[ScaleWitness]:
        ctx = self.ctx
        eps = ctx.epsilon
        start = ctx.start(n)

        def flagged(m: int) -> bool:
            xm = ctx.xs(m)
            return _scan_above(lambda i: self.gap(i, xm), n, self.bound(xm, eps), eps / 2, eps) is not None

        seq = SwitchSequence(ctx.x, ctx.xs, flagged,
                             kappa=lambda k: max(start, ctx.mu_bits(k + 1)), start=start)
        w = ctx.domain.limit(seq)
        j = _scan_above(lambda i: self.gap(i, w), n, self.bound(w, eps / 2), eps / 4, eps / 2)
        if j is None:
            return None
        return ScaleWitness(n, j + self.shift, w)

    def close_bound(self, n0: int) -> int:
        return max(n0 + self.shift, self.ctx.start(n0))


def local_decide(ctx: MetricContext, n: int) -> Optional[ScaleWitness]:
    """A witness at scale n, or None meaning rho(f_i(x_m), f(x_m)) < eps for
    all i >= n and m >= ctx.start(n)."""
    return _Decider(ctx, 0).local(n)


def third_trick_metric(ctx: MetricContext) -> MetricOutcome:
    # Past M(x, eps/2) the family is already eps/2-close at x itself.
    shift = ctx.modulus(ctx.x, ctx.epsilon / 2)
    dec = _Decider(ctx, shift)
    raw = BinaryStream(lambda n: 1 if dec.local(n) is None else 0)
    lam = cummax(raw)
    if lam.query(0):
        return Close(dec.close_bound(0))

    def witness(n: int) -> ScaleWitness:
        w = dec.local(n)
        if w is None:
            raise InconsistentModulus(f"scale {n} is close although the witness branch was decided")
        return w

    stream = MetricWitnessStream(witness)
    y = otimes_metric(lam, lambda m: stream[m].z, ctx.x, ctx.domain, drift=dyadic)
    ny = dec.bound(y, ctx.epsilon / 4)
    if lam.query(ny):
        return Close(dec.close_bound(first_one_monotone(lam, 0, ny)))
    return Witnesses(stream)


@dataclass(frozen=True)
class MetricRefutation:
    """A point v with j >= bound = M(v, eps/4) yet rho(f_j(v), f(v)) > eps/4."""

    point: str
    j: int
    bound: int
    lower: Fraction
    threshold: Fraction

    def to_json(self) -> dict:
        return {"type": "metric_refutation", "point": self.point, "j": self.j,
                "bound": self.bound, "lower": format_rational(self.lower),
                "threshold": format_rational(self.threshold)}


def lpo_extract_metric(ctx: MetricContext, witnesses: MetricWitnessStream, a: BitOracle,
                       budget: int = 256) -> LPOResult:
    """Decide whether a has a 1 from the witness branch of third_trick_metric."""
    inc = cummax(a)
    v = otimes_metric(inc, lambda m: witnesses[m].z, ctx.x, ctx.domain, drift=dyadic)
    quarter = ctx.epsilon / 4
    bound = ctx.modulus(v, quarter)
    if inc.query(bound + 1):
        return Exists(first_one_monotone(inc, 0, bound + 1))
    p = first_one_up_to(a, budget)
    if p is None:
        return AllZero()
    m = flip_index(inc, p)
    w = witnesses[m]
    lower = certify_above(ctx.family.gap(w.k, v), quarter)
    if lower is None:
        raise InvalidWitness(f"witness {m} does not certify a gap above {quarter}")
    if w.k < bound:
        raise InconsistentModulus(f"flip at {m} did not yield a refutation")
    if isinstance(v, LimitReal):
        v.resolve(budget + 1)
    return Refuted(MetricRefutation(point_literal(ctx.domain, v), w.k, bound, lower, quarter))


def point_literal(space: SpaceHandle, p) -> str:
    try:
        return space.literal(p)
    except ValueError:
        return "<unresolved>"


# ---------------------------------------------------------------- N-infinity embedding

def natinf_context(f: FamilyNatInf, M: PointwiseModulus, epsilon=Fraction(1, 2)) -> MetricContext:
    """View a family N-infinity -> N as a metric instance.

    Codomain is N with the discrete metric, x_n = n and x = omega; the limit
    function is 0 and the modulus ignores eps below 1.
    """
    fam = MetricFamily(f.eval, lambda p: 0, discrete_space(), spec=f.spec)
    epsilon = Fraction(epsilon)
    return MetricContext(
        domain=natinf_space(), family=fam, xs=finite_point, x=omega(),
        mu=lambda k: k, mu_bits=lambda k: k + 1,
        modulus=lambda p, eps: M.at(p) if eps <= 1 else 0,
        epsilon=epsilon, spec={"embedding": f.spec, "modulus": M.spec})
