"""Acceptance gate: one test per criterion, each at its stated tolerance.

A per-criterion PASS/FAIL line is printed in the terminal summary.
"""

import contextlib
import io
import random
import time
from fractions import Fraction as F

from trickdecide.cli import main
from trickdecide.exact_real import as_real, from_rational, tent
from trickdecide.fan import (BarFlags, CantorFamily, SemiUniformCertificate, cor16_lift, in_S,
                             prop15_uniformize)
from trickdecide.families import (FiniteSupportSpec, bounded_observation_function, finite_support_family,
                                  indicator_family, prop3_reduce, seeded_cases, tent_context,
                                  unsafe_heuristic_modulus)
from trickdecide.spaces import finite_point, leq_below, omega, parse_point, parse_stream, zero_stream
from trickdecide.tricks_core import (AllZero, EventuallyConstant, Exists, NonUniform, Refuted, Uniform,
                                     Witness, WitnessStream, check_uniform, decide_family, lpo_extract,
                                     second_trick, third_trick, validate_refutation)
from trickdecide.tricks_metric import Close, Witnesses, natinf_context, third_trick_metric

SEED = 2026


def cli(*argv):
    buf = io.StringIO()
    with contextlib.redirect_stdout(buf):
        code = main(list(argv))
    return code, buf.getvalue()


def test_criterion_1_indicator_heuristic64_is_non_uniform():
    start = time.perf_counter()
    f, M = indicator_family(), unsafe_heuristic_modulus(64)
    out = third_trick(f, M)
    assert isinstance(out, NonUniform), f"third_trick returned {out}"
    for n in range(1, 65):
        w = out.witnesses[n]
        assert f.eval(w.k, w.alpha) == 1
        assert w.k >= n
        assert leq_below(w.alpha, n)
    assert time.perf_counter() - start < 5


def test_criterion_2_finite_support_uniform_with_brute_force():
    start = time.perf_counter()
    rng = random.Random(SEED)
    for _ in range(100):
        spec = FiniteSupportSpec.random(rng)
        f, M = finite_support_family(spec)
        out = third_trick(f, M)
        assert isinstance(out, Uniform)
        assert check_uniform(out.N, f, spec.index_bound + 5, spec.depth_bound + 5) == []
    assert time.perf_counter() - start < 30


def test_criterion_3_decide_family_iff_non_uniform():
    disagreements = []
    for case in seeded_cases(SEED, 100):
        has_witness = decide_family(case.family, case.modulus) is not None
        non_uniform = isinstance(third_trick(case.family, case.modulus), NonUniform)
        if has_witness != non_uniform:
            disagreements.append(case.label)
    assert not disagreements, f"{len(disagreements)} of 100 cases disagree, e.g. {disagreements[:5]}"


def test_criterion_4_second_trick_bounded_observation():
    rng = random.Random(SEED)
    for _ in range(50):
        fn, d = bounded_observation_function(rng)
        out = second_trick(fn)
        assert isinstance(out, EventuallyConstant)
        assert out.N <= d + 1
        for n in range(out.N, d + 11):
            assert fn(finite_point(n)) == fn(omega())


def indicator_witnesses():
    return WitnessStream(lambda n: Witness(n, n, finite_point(n), 1))


def test_criterion_5_lpo_mill():
    start = time.perf_counter()
    f = indicator_family()
    M64, M8 = unsafe_heuristic_modulus(64), unsafe_heuristic_modulus(8)
    for k in range(51):
        res = lpo_extract(indicator_witnesses(), M64, f, parse_stream(f"0^{k}'1"))
        if isinstance(res, Refuted):
            assert validate_refutation(res.certificate, f, M64)
            point = parse_point(res.certificate.point)
            assert f.eval(res.certificate.j, point) != 0 and res.certificate.j >= M64.at(point)
        else:
            assert res == Exists(k)
    assert lpo_extract(indicator_witnesses(), M64, f, zero_stream()) == AllZero()
    res = lpo_extract(indicator_witnesses(), M8, f, parse_stream("0^30'1"))
    assert isinstance(res, Refuted) and validate_refutation(res.certificate, f, M8)
    assert time.perf_counter() - start < 10


def test_criterion_6_prop3_pipeline_and_tent_identities():
    for k in range(41):
        assert prop3_reduce(parse_stream(f"0^{k}'1"), horizon=64) == Exists(k)
    grid = [F(i, 1 << 12) for i in range((1 << 12) + 1)]
    for n in range(1, 9):
        assert tent(n, F(1, 2 * n)) == 1
        for x in grid:
            if x >= F(1, n):
                assert tent(n, x) == 0


def test_criterion_7_metric_cross_check():
    for case in seeded_cases(SEED, 100):
        core = third_trick(case.family, case.modulus)
        met = third_trick_metric(natinf_context(case.family, case.modulus, F(1, 2)))
        assert isinstance(core, Uniform) == isinstance(met, Close), case.label
    ctx = tent_context(64)
    out = third_trick_metric(ctx)
    assert isinstance(out, Witnesses), f"tent context returned {out}"
    for n in range(1, 13):
        w = out.stream[n]
        z = as_real(w.z)
        z.resolve(10 ** 4)
        assert z.exact is not None
        assert tent(w.k, z.exact) > F(1, 8)


def test_criterion_8_fan_pipeline():
    start = time.perf_counter()
    halving = CantorFamily(lambda n, a: from_rational(F(1 + a.query(0), 2 ** n)), lambda a: from_rational(0))
    bit = CantorFamily(lambda n, a: from_rational(a.query(n)), lambda a: from_rational(0))
    for fam in (halving, bit):
        flags = BarFlags(fam, F(1, 4))
        rng = random.Random(SEED)
        for _ in range(500):
            u = tuple(rng.randint(0, 1) for _ in range(rng.randint(0, 6)))
            n = rng.randint(0, 8)
            if in_S(u, n, flags):
                assert in_S(u + (0,), n, flags) and in_S(u + (1,), n, flags)
    cert = SemiUniformCertificate(lambda a: (3, 1) if a.query(0) == 0 else (4, 1))
    M, report = prop15_uniformize(halving, cert, F(1, 4), depth=10, window=10, seed=SEED)
    assert M <= 4 and report["checks"]["failed"] == 0
    M, report = cor16_lift(lambda n, x: as_real(x).scale(F(1, 2 ** n)), lambda x: from_rational(0),
                           SemiUniformCertificate(lambda a: (3, 0)), F(1, 4), depth=10, window=10, seed=SEED)
    assert M <= 3 and report["grid"]["failed"] == 0 and report["checks"]["failed"] == 0
    assert time.perf_counter() - start < 20


def test_criterion_9_reports_are_byte_identical():
    scenarios = [
        ["run-third-trick", "--family", "indicator", "--modulus", "heuristic:64", "--witnesses", "64"],
        ["run-third-trick", "--family", f"random:{SEED}", "--modulus", "exact"],
        ["lpo-mill", "--family", "indicator", "--modulus", "heuristic:8", "--stream", "0^30'1"],
        ["lpo-mill", "--family", "indicator", "--modulus", "heuristic:64", "--stream", "0^17'1"],
        ["prop3", "--stream", "0^40'1"],
        ["prop3", "--stream", "0^50'1", "--horizon", "8"],
        ["run-metric", "--family", "tent"],
        ["run-metric", "--family", "indicator"],
        ["fan-uniformize", "--family", "halving", "--seed", str(SEED)],
        ["fan-uniformize", "--family", "scale", "--seed", str(SEED)],
    ]
    for argv in scenarios:
        first, second = cli(*argv), cli(*argv)
        assert first == second, argv
