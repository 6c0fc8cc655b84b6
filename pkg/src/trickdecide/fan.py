"""Uniform bounds on Cantor space from semi-uniform convergence.

The pieces are the flags lambda(u, n), the decidable set S of (word, window)
pairs built from them, and an effective fan functional. For the last one,
a certificate is evaluated on instrumented points u*000... and the prefix
tree is expanded until every leaf's answer provably depends only on the
leaf. That search stands in for the fan principle: it terminates for every
total certificate, and a depth cap turns non-termination into an error.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Iterator, Optional

from .errors import BudgetExceeded
from .exact_real import (ApproxReal, Side, as_real, certify_above, cotrans_compare, dyadic,
                         format_rational)
from .spaces import CantorPoint, instrument

Word = tuple[int, ...]


def extend_zeros(u: Word) -> CantorPoint:
    """u * 000..."""
    u = tuple(u)
    n = len(u)
    label = "stream:bits:" + "".join(map(str, u)) + "0"
    return CantorPoint(lambda i: u[i] if i < n else 0, label=label)


def words(max_len: int, min_len: int = 0) -> Iterator[Word]:
    for n in range(min_len, max_len + 1):
        yield from itertools.product((0, 1), repeat=n)


@dataclass
class CantorFamily:
    eval_n: Callable[[int, Any], ApproxReal]
    eval_lim: Callable[[Any], ApproxReal]
    spec: Any = None

    def gap(self, n: int, alpha) -> ApproxReal:
        return abs(as_real(self.eval_n(n, alpha)) - as_real(self.eval_lim(alpha)))


def lambda_flag(u: Word, n: int, fam: CantorFamily, eps) -> int:
    """1 if |f_n - f| at u*000... compares above eps/2, 0 if below eps."""
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    side = cotrans_compare(fam.gap(n, extend_zeros(u)), eps / 2, eps)
    return 1 if side is Side.ABOVE else 0


class BarFlags:
    """Memoised lambda(u, n) for one family and tolerance."""

    def __init__(self, fam: CantorFamily, eps):
        self.fam = fam
        self.eps = Fraction(eps)
        self._memo: dict[tuple[Word, int], int] = {}

    def lam(self, u: Word, n: int) -> int:
        key = (tuple(u), n)
        if key not in self._memo:
            self._memo[key] = lambda_flag(key[0], n, self.fam, self.eps)
        return self._memo[key]


def in_S(u: Word, n: int, flags: BarFlags) -> bool:
    """(u, n) in S: lambda(u*w, i) = 0 for |u| <= i <= |u| + n and |w| <= n - |u|.

    Vacuously true when n < |u|.
    """
    u = tuple(u)
    slack = n - len(u)
    if slack < 0:
        return True
    for w in words(slack):
        for i in range(len(u), len(u) + n + 1):
            if flags.lam(u + w, i):
                return False
    return True


@dataclass
class SemiUniformCertificate:
    """at(a) = (N, d): |f_n(b) - f(b)| < eps for n >= N and every b agreeing
    with a on its first d bits."""

    at: Callable[[Any], tuple[int, int]]
    spec: Any = None


@dataclass(frozen=True)
class SecuredLeaf:
    word: Word
    N: int
    d: int

    def to_json(self) -> dict:
        return {"word": "".join(map(str, self.word)), "N": self.N, "d": self.d}


def secure_tree(cert: SemiUniformCertificate, cap: int = 24) -> list[SecuredLeaf]:
    """Leaves of the smallest prefix tree on which cert is locally constant.

    A word u is secured when the certificate, run on u*000..., reads no bit
    at or past |u| and answers with d <= |u|; its answer then covers every
    extension of u.
    """
    leaves = []
    stack: list[Word] = [()]
    while stack:
        u = stack.pop()
        if len(u) > cap:
            raise BudgetExceeded(f"prefix tree deeper than {cap}; certificate looks non-continuous")
        point = instrument(extend_zeros(u))
        N, d = cert.at(point)
        read_inside = point.high_water is None or point.high_water < len(u)
        if read_inside and d <= len(u):
            leaves.append(SecuredLeaf(u, N, d))
        else:
            stack.append(u + (1,))
            stack.append(u + (0,))
    leaves.sort(key=lambda leaf: (len(leaf.word), leaf.word))
    return leaves


def uniform_bound(cert: SemiUniformCertificate, cap: int = 24) -> int:
    return max(max(leaf.N, len(leaf.word)) for leaf in secure_tree(cert, cap))


def prop15_uniformize(fam: CantorFamily, cert: SemiUniformCertificate, eps, depth: int = 10,
                      window: int = 10, spot: int = 64, seed: int = 0, cap: int = 24,
                      check_precision: int = 64) -> tuple[int, dict]:
    """Turn a semi-uniform certificate into a uniform bound M and sample-check it.

    Checks |f_n(v*000...) - f(v*000...)| <= eps for every word v of length
    <= depth and n in [M, M + window]; a check fails only when the gap is
    certified above eps. Spot-checks membership (v[:M], k) in S, with flags
    taken at 2*eps so that the certificate's eps is their lower threshold.
    """
    eps = Fraction(eps)
    leaves = secure_tree(cert, cap)
    M = max(max(leaf.N, len(leaf.word)) for leaf in leaves)

    passed = failed = 0
    failures = []
    for v in words(depth):
        alpha = extend_zeros(v)
        for n in range(M, M + window + 1):
            if certify_above(fam.gap(n, alpha), eps, check_precision) is None:
                passed += 1
            else:
                failed += 1
                if len(failures) < 8:
                    failures.append({"word": "".join(map(str, v)), "n": n})

    flags = BarFlags(fam, 2 * eps)
    rng = random.Random(seed)
    s_passed = s_failed = 0
    if depth >= M:
        for _ in range(spot):
            length = rng.randint(M, depth)
            v = tuple(rng.randint(0, 1) for _ in range(length))
            n = rng.randint(M, M + window)
            # v = v[:M] * w, so |w| + M = |v|
            k = max(n - M, len(v))
            if in_S(v[:M], k, flags):
                s_passed += 1
            else:
                s_failed += 1

    report = {
        "M": M,
        "epsilon": format_rational(eps),
        "leaves": [leaf.to_json() for leaf in leaves],
        "checks": {"passed": passed, "failed": failed},
        "failures": failures,
        "in_S": {"passed": s_passed, "failed": s_failed},
        "budgets": {"depth": depth, "window": window, "spot": spot, "cap": cap},
    }
    return M, report


def binary_surjection(alpha) -> ApproxReal:
    """sum alpha(i) 2^-(i+1): Cantor space onto [0, 1]."""
    def approx(k: int):
        lo = sum((dyadic(i + 1) for i in range(k) if alpha.query(i)), Fraction(0))
        return lo, lo + dyadic(k)

    return ApproxReal(approx)


def cor16_lift(eval_n: Callable[[int, ApproxReal], ApproxReal], eval_lim: Callable[[ApproxReal], ApproxReal],
               cert: SemiUniformCertificate, eps, depth: int = 10, window: int = 10,
               grid_depth: Optional[int] = None, **kwargs) -> tuple[int, dict]:
    """Uniform bound for a family on [0, 1] through the binary surjection.

    Runs the Cantor-space procedure on g_n(a) = |f_n(F(a)) - f(F(a))| and
    then checks |f_n(x) - f(x)| <= eps on the dyadic grid for n >= M.
    """
    eps = Fraction(eps)

    def g(n: int, alpha) -> ApproxReal:
        x = binary_surjection(alpha)
        return abs(as_real(eval_n(n, x)) - as_real(eval_lim(x)))

    fam = CantorFamily(g, lambda alpha: as_real(0), spec="cor16")
    M, report = prop15_uniformize(fam, cert, eps, depth=depth, window=window, **kwargs)
    grid_depth = depth if grid_depth is None else grid_depth
    passed = failed = 0
    for i in range((1 << grid_depth) + 1):
        x = as_real(Fraction(i, 1 << grid_depth))
        for n in range(M, M + window + 1):
            gap = abs(as_real(eval_n(n, x)) - as_real(eval_lim(x)))
            if certify_above(gap, eps, 64) is None:
                passed += 1
            else:
                failed += 1
    report["grid"] = {"depth": grid_depth, "passed": passed, "failed": failed}
    return M, report
