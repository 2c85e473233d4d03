import cmath
import random
from fractions import Fraction

import mpmath
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from brjunokit.dynamics import (
    Connectivity,
    CycleCheckFailed,
    OrderTooLarge,
    QuadraticMap,
    c_to_multipliers,
    classify_connectivity,
    iterate_taylor,
    multiplier,
    quadratic_series,
    theta_to_c,
    unit_multiplier,
    upsilon_rational,
    upsilon_rational_record,
)
from brjunokit.contfrac import ContinuedFraction, denominators, theta_star_interval
from brjunokit.intervals import ComplexInterval, Interval, precision

import oracles

thetas = st.fractions(min_value=0, max_value=1, max_denominator=10 ** 4)

# Fibonacci upsilon values, frozen from the library after the 1/2 and 1/3
# coefficients were matched against the sympy composition oracle.
FIB_UPSILON = {
    (1, 2): 0.9189385332046727,
    (2, 3): 0.6065644147746360,
    (3, 5): 0.4096756148773018,
    (5, 8): 0.2977452811247923,
    (8, 13): 0.2349169712441689,
}


def _near(iv, x, tol):
    return iv.lo_float() - tol <= x <= iv.hi_float() + tol


@given(thetas)
@settings(max_examples=100, deadline=None)
def test_theta_to_c_conjugacy(theta):
    with mpmath.workdps(40):
        lam = mpmath.expjpi(2 * mpmath.mpf(theta.numerator) / theta.denominator)
        c_ref = complex(lam / 2 - lam ** 2 / 4)
    c = theta_to_c(theta)
    assert _near(c.re, c_ref.real, 1e-15) and _near(c.im, c_ref.imag, 1e-15)
    # P(w) + lambda/2 == (w + lambda/2)^2 + c at a sample point
    P = QuadraticMap.from_theta(theta)
    f = P.to_c_form()
    w = ComplexInterval(Interval(Fraction(1, 3)), Interval(Fraction(-1, 7)))
    half = P.lam * Fraction(1, 2)
    lhs = P(w) + half
    rhs = f(w + half)
    assert lhs.re.intersects(rhs.re) and lhs.im.intersects(rhs.im)
    # lambda is one of the fixed-point multipliers of z^2 + c
    m1, m2 = c_to_multipliers(c)
    assert any(m.re.intersects(P.lam.re) and m.im.intersects(P.lam.im) for m in (m1, m2))


@pytest.mark.parametrize("p,q", [(1, 2), (1, 3), (2, 5), (1, 4)])
def test_iterate_coefficients_against_symbolic(p, q):
    co = iterate_taylor(Fraction(p, q))
    assert co.linear.contains(1)
    for k in range(2, q + 2):
        exact = complex(sympy.N(oracles.iterate_coefficient(p, q, k), 40))
        got = co.series.coefficients[k]
        assert _near(got.re, exact.real, 1e-30) and _near(got.im, exact.imag, 1e-30), k


def test_A_at_one_half_is_minus_two():
    A = iterate_taylor(Fraction(1, 2)).A
    assert A.re.contains(-2) and A.im.contains(0)
    assert A.re.width_float() < 2.0 ** -60


def test_order_cap():
    with pytest.raises(OrderTooLarge):
        iterate_taylor(Fraction(1, 2000))


def test_upsilon_half_regression():
    ups = upsilon_rational(Fraction(1, 2))
    with mpmath.workdps(40):
        ref = mpmath.log(2 * mpmath.pi) / 2
    assert _near(ups, float(ref), 1e-15)
    assert ups.width_float() < 1e-15


@pytest.mark.parametrize("pq", list(FIB_UPSILON))
def test_upsilon_fibonacci_values(pq):
    ups = upsilon_rational(Fraction(*pq))
    assert _near(ups, FIB_UPSILON[pq], 1e-13)


def test_upsilon_record_fields():
    r = upsilon_rational_record(Fraction(3, 5))
    assert r.abs_A.gt(1)
    assert not r.convention_dependent
    assert upsilon_rational_record(1).convention_dependent


def test_quadratic_series_composition():
    s = quadratic_series(Fraction(1, 3), 4)
    sq = s.compose(s).compose(s)
    co = iterate_taylor(Fraction(1, 3))
    for k in range(5):
        a, b = sq.coefficients[k], co.series.coefficients[k]
        assert a.re.intersects(b.re) and a.im.intersects(b.im)


def test_multiplier_of_period_two_cycle():
    # z^2 - 1 has the 2-cycle {0, -1} with multiplier 0
    f = QuadraticMap.from_c(-1)
    r = multiplier(f, [0, -1])
    assert r.kind == "attracting" and r.modulus.contains(0)
    with pytest.raises(CycleCheckFailed):
        multiplier(f, [0, 1])


def test_multiplier_repelling_fixed_point():
    f = QuadraticMap.from_c(-2)
    assert multiplier(f, [2]).kind == "repelling"


@pytest.mark.parametrize("c,verdict", [
    (0, Connectivity.CONNECTED),
    (-1, Connectivity.CONNECTED),
    (-2, Connectivity.CONNECTED),
    (Fraction(1, 2), Connectivity.CANTOR),
    (10, Connectivity.CANTOR),
    (complex(-0.122561, 0.744862), Connectivity.CONNECTED),
    (complex(0.5, 0.5), Connectivity.CANTOR),
])
def test_connectivity(c, verdict):
    assert classify_connectivity(c).verdict is verdict


def test_connectivity_parabolic_point_undecided():
    assert classify_connectivity(Fraction(1, 4), maxiter=200).verdict is Connectivity.UNDECIDED


def test_multiplier_gap_at_golden_denominators():
    q = denominators(ContinuedFraction.golden(), 13)
    with precision(160):
        t = theta_star_interval()
        for n in range(2, 13):
            d = (unit_multiplier(t * q[n]) - 1).abs2()
            assert d.gt(Fraction(4, q[n + 1] ** 2))
            assert d.lt(4 * Interval.pi().square() / q[n + 1] ** 2)


@pytest.mark.parametrize("theta", [Fraction(1, 2), Fraction(1, 3), Fraction(2, 5)])
def test_iterate_series_matches_direct_iteration(theta):
    co = iterate_taylor(theta)
    q = theta.denominator
    lam = complex(cmath.exp(2j * cmath.pi * theta))
    order = co.series.order
    rng = random.Random(7)
    for _ in range(20):
        z = cmath.rect(rng.uniform(1e-3, 1e-2), rng.uniform(0, 2 * cmath.pi))
        w = z
        for _ in range(q):
            w = lam * w + w * w
        assert abs(co.series.evaluate(z) - w) <= 1e-13 + 10.0 ** q * abs(z) ** (order + 1)
