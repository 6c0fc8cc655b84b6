from fractions import Fraction as F

import pytest
from hypothesis import given, settings, strategies as st

from trickdecide.exact_real import as_real, dyadic, parse_rational, tent
from trickdecide.families import seeded_cases, tent_context
from trickdecide.spaces import parse_stream, zero_stream
from trickdecide.tricks_core import AllZero, Exists, Refuted, Uniform, third_trick
from trickdecide.tricks_metric import (Close, MetricWitnessStream, local_decide, lpo_extract_metric,
                                       natinf_context, third_trick_metric)


def exact_point(z):
    z = as_real(z)
    z.resolve(10 ** 4)
    return z.exact


@pytest.mark.parametrize("n", range(1, 13))
def test_tent_scale_witnesses_are_exact(n):
    ctx = tent_context(64)
    w = local_decide(ctx, n)
    assert w is not None and w.k >= n
    z = exact_point(w.z)
    assert z is not None and 0 < z <= dyadic(n)
    assert tent(w.k, z) > ctx.epsilon / 4


def test_tent_scale_past_horizon_is_close():
    ctx = tent_context(8)
    assert local_decide(ctx, 20) is None


def test_tent_context_lands_on_close_at_horizon():
    # The frozen limit is the last scale witness the modulus can see, so the
    # decision reads a 1 at its bound and reports Close just past the horizon.
    for horizon in (8, 16, 64):
        out = third_trick_metric(tent_context(horizon))
        assert isinstance(out, Close)
        assert out.N == horizon + 1


def test_close_claim_is_refuted_beyond_horizon():
    ctx = tent_context(16)
    out = third_trick_metric(ctx)
    n = out.N
    x = ctx.xs(n)
    j = 1 << (n - 1)
    assert tent(j, dyadic(n)) == 1
    assert j >= ctx.modulus(x, ctx.epsilon)


def test_mu_bits_default():
    ctx = tent_context(8)
    ctx.mu_bits = None
    ctx.__post_init__()
    assert ctx.mu_bits(3) == ctx.mu(8)


def test_epsilon_must_be_positive():
    with pytest.raises(ValueError):
        tent_context(8, epsilon=0)


def test_natinf_embedding_matches_core_branch():
    for case in seeded_cases(7, 100):
        core = third_trick(case.family, case.modulus)
        met = third_trick_metric(natinf_context(case.family, case.modulus))
        assert isinstance(core, Uniform) == isinstance(met, Close), case.label


def tent_witnesses(ctx):
    return MetricWitnessStream(lambda m: local_decide(ctx, m + 1))


@pytest.mark.parametrize("k", [0, 1, 4, 9])
def test_lpo_extract_metric_exists(k):
    ctx = tent_context(64)
    assert lpo_extract_metric(ctx, tent_witnesses(ctx), parse_stream(f"0^{k}'1")) == Exists(k)


def test_lpo_extract_metric_all_zero():
    ctx = tent_context(64)
    assert lpo_extract_metric(ctx, tent_witnesses(ctx), zero_stream()) == AllZero()


def test_lpo_extract_metric_refutes_shallow_horizon():
    ctx = tent_context(6)
    deep = tent_context(64)
    res = lpo_extract_metric(ctx, tent_witnesses(deep), parse_stream("0^12'1"))
    assert isinstance(res, Refuted)
    cert = res.certificate
    z = parse_rational(cert.point)
    assert tent(cert.j, z) > cert.threshold
    assert cert.j >= ctx.modulus(as_real(z), cert.threshold)


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 10))
def test_witness_distance_bound(n):
    ctx = tent_context(32)
    w = local_decide(ctx, n)
    assert exact_point(w.z) <= F(1, n)
