from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from brjunokit.contfrac import (
    ContinuedFraction,
    Tail,
    ValueUndetermined,
    consecutive_products_below_half,
    convergents,
    denominators,
    format_cf,
    parse,
    value,
)
from brjunokit.golden import GoldenFieldElement

from oracles import cf_value

digit_lists = st.lists(st.integers(min_value=1, max_value=10 ** 6), min_size=1, max_size=25)


def test_parse_forms():
    assert parse("[1,1,1,20;ones]") == ContinuedFraction((1, 1, 1, 20), Tail.ALL_ONES)
    assert parse("[1,1,1,...]") == ContinuedFraction.golden()
    assert parse("[2]") == ContinuedFraction((2,), Tail.TERMINATING)
    assert parse("[1,3;*]").tail is Tail.UNSPECIFIED
    assert parse("[3, 1, 4, …]").prefix == (3, 1, 4)


@pytest.mark.parametrize("bad", ["1,2", "[0,1]", "[1,x]", "[1;weird]", "[-3]"])
def test_parse_rejects(bad):
    with pytest.raises((ValueError, TypeError)):
        parse(bad)


@given(digit_lists, st.sampled_from(list(Tail)))
def test_format_parse_round_trip(digits, tail):
    cf = ContinuedFraction(tuple(digits), tail)
    assert parse(format_cf(cf)) == cf


def test_golden_convergents_are_fibonacci_ratios():
    conv = convergents(ContinuedFraction.golden(), 12)
    fib = [1, 1]
    while len(fib) < 14:
        fib.append(fib[-1] + fib[-2])
    for k, c in enumerate(conv, start=1):
        assert (c.p, c.q) == (fib[k - 1], fib[k])
    assert denominators(ContinuedFraction.golden(), 3) == [1, 1, 2, 3]


@given(digit_lists)
def test_convergents_match_direct_folding(digits):
    cf = ContinuedFraction(tuple(digits), Tail.TERMINATING)
    conv = convergents(cf, len(digits))
    for k, c in enumerate(conv, start=1):
        assert c.fraction == cf_value(digits[:k])
    # determinant identity p_{k-1} q_k - p_k q_{k-1} = (-1)^k
    for k in range(1, len(conv)):
        a, b = conv[k - 1], conv[k]
        assert abs(a.p * b.q - b.p * a.q) == 1


@given(st.fractions(min_value=Fraction(1, 10 ** 9), max_value=1, max_denominator=10 ** 9))
def test_from_rational_round_trip(x):
    cf = ContinuedFraction.from_rational(x)
    assert cf_value(list(cf.prefix)) == x
    if len(cf) > 1:
        assert cf.prefix[-1] >= 2


def test_canonical_merges_trailing_one():
    cf = ContinuedFraction((2, 3, 1), Tail.TERMINATING)
    assert cf.canonical().prefix == (2, 4)
    assert cf_value([2, 3, 1]) == cf_value([2, 4])


def test_golden_value_is_exact():
    v = ContinuedFraction.golden().exact_value()
    assert isinstance(v, GoldenFieldElement)
    assert v * v + v == 1
    iv = value(ContinuedFraction.golden(), 80)
    assert iv.width_float() <= 2.0 ** -80
    assert Fraction(6180339887498948, 10 ** 16) < iv.lower() < iv.upper() < Fraction(6180339887498949, 10 ** 16)


def test_unspecified_tail_value_raises():
    with pytest.raises(ValueUndetermined):
        value(parse("[1,2;*]"))
    with pytest.raises(ValueUndetermined):
        parse("[1,2;*]").digit(3)


def test_core_length():
    assert parse("[1,1,1,20;ones]").core_length() == 4
    assert parse("[1,2,1,1;ones]").core_length() == 2
    assert ContinuedFraction.golden().core_length() == 0


@given(st.lists(st.integers(min_value=1, max_value=10 ** 6), min_size=0, max_size=12),
       st.sampled_from([Tail.ALL_ONES, Tail.TERMINATING]))
@settings(max_examples=300)
def test_consecutive_products_below_half(digits, tail):
    if tail is Tail.TERMINATING and not digits:
        digits = [2]
    cf = ContinuedFraction(tuple(digits), tail).canonical()
    count = len(cf) + (6 if tail is Tail.ALL_ONES else 0)
    assert consecutive_products_below_half(cf, count)


def test_non_canonical_ending_reaches_one_half():
    # [.., 1, 1] has alpha_{n-1} = 1/2 and alpha_n = 1; the canonical [.., 2] does not
    cf = ContinuedFraction((3, 1, 1), Tail.TERMINATING)
    assert not consecutive_products_below_half(cf, 3)
    assert consecutive_products_below_half(cf.canonical(), 2)


def test_alpha_enclosures_contain_exact_alphas():
    cf = parse("[3,1,4,1,5;ones]")
    exact = cf.alphas(8)
    encl = cf.alpha_enclosures(8)
    for a, iv in zip(exact, encl):
        assert iv.contains(a.to_interval(120).lower())
        assert iv.contains(a.to_interval(120).upper())


@given(st.lists(st.integers(min_value=1, max_value=50), min_size=3, max_size=12))
def test_convergent_quality(digits):
    x = cf_value(digits)
    cs = convergents(ContinuedFraction(tuple(digits), Tail.TERMINATING), len(digits))
    # the last pair meets the bound with equality since x is the final convergent
    for c, nxt in zip(cs[:-2], cs[1:-1]):
        assert abs(x - c.fraction) < Fraction(1, c.q * nxt.q)
