import pytest
from hypothesis import given, strategies as st

from trickdecide.errors import MonotonicityViolation, SpecError
from trickdecide.spaces import (BinaryStream, NatInfPoint, cummax, finite_point, first_one_monotone,
                                first_one_up_to, flip_index, instrument, leq_below, natinf_literal,
                                omega, otimes_natinf, parse_point, parse_stream, prepend_zeros,
                                zeros_then_ones)

bits = st.lists(st.integers(0, 1), min_size=1, max_size=40)


def test_finite_point_bits():
    p = finite_point(3)
    assert p.prefix(6) == (0, 0, 0, 1, 1, 1)


def test_omega_is_all_zero():
    assert first_one_up_to(omega(), 500) is None


def test_query_is_memoised():
    calls = []

    def fn(i):
        calls.append(i)
        return 0
    p = BinaryStream(fn)
    p.query(4)
    p.query(4)
    assert calls == [4]


def test_monotone_violation_detected():
    p = NatInfPoint(lambda i: 1 if i == 2 else 0)
    p.query(2)
    with pytest.raises(MonotonicityViolation):
        p.query(3)


def test_non_bit_rejected():
    with pytest.raises(ValueError):
        BinaryStream(lambda i: 2).query(0)


def test_instrument_tracks_high_water():
    p = instrument(finite_point(5))
    assert p.high_water is None
    p.query(3)
    p.query(1)
    assert p.high_water == 3


@given(st.integers(0, 60), st.integers(0, 70))
def test_leq_below_matches_order(k, n):
    assert leq_below(finite_point(k), n) == (k >= n)
    assert leq_below(omega(), n)


@given(st.integers(0, 50), st.integers(0, 50))
def test_prepend_zeros_shifts(n, k):
    p = prepend_zeros(n, finite_point(k))
    assert first_one_up_to(p, 200) == n + k
    assert p.label == f"fin:{n + k}"
    assert prepend_zeros(n, omega()).label == "omega"


@given(bits)
def test_cummax_is_running_max(xs):
    a = BinaryStream(lambda i: xs[i] if i < len(xs) else 0)
    c = cummax(a)
    for i in range(len(xs)):
        assert c.query(i) == max(xs[: i + 1])


@given(st.integers(0, 200), st.integers(0, 300), st.integers(0, 300))
def test_first_one_monotone_bisects(k, lo, hi):
    p = zeros_then_ones(k)
    expected = max(k, lo) if lo <= hi and max(k, lo) <= hi else None
    assert first_one_monotone(p, lo, hi) == expected


def test_flip_index_convention():
    assert flip_index(zeros_then_ones(5), 5) == 4
    assert flip_index(zeros_then_ones(0), 0) == 0


@given(st.integers(0, 40))
def test_otimes_takes_point_at_flip(k):
    # points(m) = m + 3 is above m, as required
    a = zeros_then_ones(k)
    g = otimes_natinf(a, lambda m: finite_point(m + 3))
    assert first_one_up_to(g, 200) == flip_index(a, k) + 3


def test_otimes_zero_stream_is_omega():
    g = otimes_natinf(zeros_then_ones(10 ** 6), lambda m: finite_point(m))
    assert first_one_up_to(g, 300) is None


def test_otimes_needs_monotone():
    with pytest.raises(ValueError):
        otimes_natinf(BinaryStream(lambda i: 0), finite_point)


@pytest.mark.parametrize("text,first", [("omega", None), ("fin:7", 7), ("stream:0^4'1", 4),
                                        ("stream:0^41", 4), ("0^2'1", 2), ("stream:bits:0001", 3)])
def test_parse_point(text, first):
    assert first_one_up_to(parse_point(text), 100) == first


def test_parse_stream_repeats_last_bit():
    s = parse_stream("stream:bits:010")
    assert s.prefix(6) == (0, 1, 0, 0, 0, 0)


def test_parse_rejects_garbage():
    with pytest.raises(SpecError):
        parse_point("fin:x")


def test_natinf_literal_roundtrip():
    assert natinf_literal(NatInfPoint(lambda i: int(i >= 9))) == "fin:9"
    assert natinf_literal(NatInfPoint(lambda i: 0)) == "omega"
