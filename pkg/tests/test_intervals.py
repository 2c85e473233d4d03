from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, strategies as st

from brjunokit.intervals import (
    ComplexInterval,
    Interval,
    dyadic_string,
    format_interval,
    parse_dyadic,
    precision,
    working_precision,
)

fractions = st.fractions(min_value=-1000, max_value=1000, max_denominator=10 ** 6)
positive = st.fractions(min_value=Fraction(1, 10 ** 6), max_value=1000, max_denominator=10 ** 6)
small = st.fractions(min_value=-20, max_value=20, max_denominator=1000)
precs = st.sampled_from([24, 53, 80, 160])


def _mp(x):
    return mpmath.mpf(x.numerator) / x.denominator


def _encloses(iv, value):
    """value is an mpf computed at 200 digits."""
    with mpmath.workdps(200):
        lo = _mp(iv.lower())
        hi = _mp(iv.upper())
        return lo <= value <= hi


@given(fractions, fractions, precs)
def test_arithmetic_contains_exact_result(a, b, k):
    with precision(k):
        x, y = Interval(a), Interval(b)
        assert (x + y).contains(a + b)
        assert (x - y).contains(a - b)
        assert (x * y).contains(a * b)
        if b != 0:
            assert (x / y).contains(a / b)


@given(positive, precs)
def test_sqrt_log_contain_true_value(a, k):
    with precision(k), mpmath.workdps(200):
        x = Interval(a)
        assert _encloses(x.sqrt(), mpmath.sqrt(_mp(a)))
        assert _encloses(x.log(), mpmath.log(_mp(a)))


@given(small, precs)
def test_exp_cos_sin_contain_true_value(a, k):
    with precision(k), mpmath.workdps(200):
        x = Interval(a)
        assert _encloses(x.exp(), mpmath.exp(_mp(a)))
        c, s = x.cos_sin()
        assert _encloses(c, mpmath.cos(_mp(a)))
        assert _encloses(s, mpmath.sin(_mp(a)))


@given(fractions, fractions, fractions)
def test_wide_operands_contain_sample_points(a, b, c):
    lo, hi = sorted([a, b])
    x = Interval(lo, hi)
    for t in (lo, hi, (lo + hi) / 2):
        assert (x * x + c).contains(t * t + c)
        assert x.square().contains(t * t)
        assert abs(x).contains(abs(t))


@given(st.integers(min_value=0, max_value=12), fractions)
def test_integer_power(n, a):
    assert (Interval(a) ** n).contains(a ** n)


def test_width_shrinks_with_precision():
    widths = []
    for k in (30, 60, 120):
        with precision(k):
            widths.append(Interval.pi().width_float())
    assert widths[0] > widths[1] > widths[2]
    assert widths[2] < 2.0 ** -115


def test_pi_enclosure():
    with precision(100):
        assert _encloses(Interval.pi(), mpmath.pi)


def test_precision_context_restores():
    before = working_precision()
    with precision(300):
        assert working_precision() == 300
    assert working_precision() == before


def test_comparisons_are_certain():
    a = Interval(Fraction(1, 3))
    b = Interval(Fraction(1, 2))
    assert a.lt(b) and b.gt(a)
    assert not a.lt(a)
    assert Interval(-1, 1).contains_zero()
    assert not Interval(-1, 1).positive()


def test_log_of_nonpositive_raises():
    with pytest.raises(ValueError):
        Interval(-1, 1).log()


def test_division_by_zero_interval_raises():
    with pytest.raises(ZeroDivisionError):
        Interval(1) / Interval(-1, 1)


@given(fractions, fractions, fractions, fractions)
def test_complex_product_contains(a, b, c, d):
    z, w = ComplexInterval(Interval(a), Interval(b)), ComplexInterval(Interval(c), Interval(d))
    exact = complex(a, b) * complex(c, d)
    re, im = a * c - b * d, a * d + b * c
    prod = z * w
    assert prod.re.contains(re) and prod.im.contains(im)
    assert abs(prod.mid() - exact) <= 1e-9 * (1 + abs(exact))


@given(st.fractions(min_value=0, max_value=1, max_denominator=1000))
def test_unit_root_on_circle(t):
    with precision(80):
        u = ComplexInterval.unit_root(t)
        assert u.abs2().contains(1)


def test_dyadic_strings_round_trip():
    for x in (Fraction(3, 8), Fraction(-5, 1024), Fraction(7), Fraction(0)):
        assert parse_dyadic(dyadic_string(x)) == x


def test_format_interval_is_outward():
    with precision(80):
        iv = Interval.pi()
    text = format_interval(iv, 10)
    lo, hi = (float(s) for s in text.strip("[]").split(","))
    assert lo <= float(mpmath.pi) <= hi
