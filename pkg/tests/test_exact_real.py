from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from trickdecide.errors import DomainError, PrecisionExhausted
from trickdecide.exact_real import (ApproxReal, Side, certify_above, cotrans_compare, dyadic,
                                    format_rational, from_rational, parse_rational, tent, tent_real)

rationals = st.fractions(min_value=-4, max_value=4, max_denominator=64)
unit = st.fractions(min_value=0, max_value=1, max_denominator=1 << 12)


def fuzzy(q):
    """q with no exact value, approximated by nested intervals."""
    q = F(q)
    return ApproxReal(lambda k: (q - dyadic(k + 1), q + dyadic(k + 1)))


@given(rationals, rationals)
def test_exact_arithmetic(p, q):
    assert (from_rational(p) + from_rational(q)).exact == p + q
    assert (from_rational(p) - from_rational(q)).exact == p - q
    assert abs(from_rational(p)).exact == abs(p)


@given(rationals, rationals, st.integers(0, 30))
def test_interval_arithmetic_encloses(p, q, k):
    lo, hi = (fuzzy(p) - fuzzy(q)).approximate(k)
    assert lo <= p - q <= hi
    assert hi - lo <= dyadic(k)
    lo, hi = abs(fuzzy(p)).approximate(k)
    assert lo <= abs(p) <= hi


@given(rationals, rationals, rationals)
def test_cotrans_answer_is_true(q, a, gap):
    gap = abs(gap) + F(1, 64)
    b = a + gap
    side = cotrans_compare(fuzzy(q), a, b)
    if side is Side.ABOVE:
        assert q > a
    else:
        assert q < b


def test_cotrans_prefers_below_on_exact():
    assert cotrans_compare(from_rational(F(1, 2)), F(1, 4), F(3, 4)) is Side.BELOW
    assert cotrans_compare(from_rational(1), F(1, 4), F(3, 4)) is Side.ABOVE


def test_cotrans_rejects_bad_thresholds():
    with pytest.raises(ValueError):
        cotrans_compare(from_rational(0), 1, 1)


def test_cotrans_precision_exhausted():
    stuck = ApproxReal(lambda k: (F(0), F(1)))
    with pytest.raises(PrecisionExhausted):
        cotrans_compare(stuck, F(1, 4), F(1, 2), max_precision=20)


@given(rationals, rationals)
def test_certify_above(q, t):
    lower = certify_above(fuzzy(q), t, 80)
    if lower is not None:
        assert t < lower <= q
    if q > t:
        assert lower is not None


@pytest.mark.parametrize("n", range(1, 9))
def test_tent_peak_and_support(n):
    assert tent(n, F(1, 2 * n)) == 1
    assert tent(n, F(1, n)) == 0
    assert tent(n, 0) == 0


@given(st.integers(1, 40), unit)
def test_tent_is_continuous_piecewise(n, x):
    v = tent(n, x)
    assert 0 <= v <= 1
    if x >= F(1, n):
        assert v == 0
    # Lipschitz with constant 2n
    y = min(x + F(1, 1 << 14), F(1))
    assert abs(tent(n, y) - v) <= 2 * n * (y - x)


def test_tent_domain():
    with pytest.raises(DomainError):
        tent(1, F(3, 2))
    with pytest.raises(DomainError):
        tent(0, F(1, 2))


@given(st.integers(1, 30), unit, st.integers(0, 20))
def test_tent_real_encloses(n, x, k):
    lo, hi = tent_real(n, fuzzy(x)).approximate(k)
    assert lo <= tent(n, x) <= hi
    assert hi - lo <= dyadic(k)


@given(st.integers(-1000, 1000), st.integers(0, 40))
def test_dyadic_literal_roundtrip(k, d):
    q = F(k, 1 << d)
    assert parse_rational(format_rational(q)) == q


def test_parse_rational_forms():
    assert parse_rational("3/4") == F(3, 4)
    assert parse_rational("1/2^3") == F(1, 8)
    assert format_rational(F(1, 3)) == "1/3"
