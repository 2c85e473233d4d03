"""Independent reference computations used by the tests.

Nothing here imports brjunokit: values come from mpmath at high precision,
sympy polynomial algebra, plain Fractions or brute force.
"""

from fractions import Fraction
from itertools import product

import mpmath
import numpy as np
import sympy


def golden_phi(dps=60):
    """log(1/t)/(1 - t) with t = (sqrt5 - 1)/2."""
    with mpmath.workdps(dps):
        t = (mpmath.sqrt(5) - 1) / 2
        return mpmath.log(1 / t) / (1 - t)


def phi_ones_tail(prefix, terms=600, dps=80):
    """Direct series sum for [prefix; 1, 1, ...] with no closed-form tail.

    alpha_i is the value of [a_i, a_{i+1}, ...], computed backwards from t.
    The dropped remainder is below t^terms * log(1/t) / (1 - t).
    """
    with mpmath.workdps(dps):
        t = (mpmath.sqrt(5) - 1) / 2
        n = len(prefix)
        alphas = [t] * (terms - n)
        x = t
        head = []
        for d in reversed(prefix):
            x = 1 / (d + x)
            head.append(x)
        alphas = head[::-1] + alphas
        s, P = mpmath.mpf(0), mpmath.mpf(1)
        for a in alphas:
            s += P * mpmath.log(1 / a)
            P *= a
        return s


def phi_truncated(theta, dps=60):
    """Sum over the canonical expansion of a rational, stopping before alpha = 0."""
    x = Fraction(theta)
    alphas = []
    while x != 0:
        alphas.append(x)
        x = Fraction(1, 1) / x
        x = x - (x.numerator // x.denominator)
    with mpmath.workdps(dps):
        s, P = mpmath.mpf(0), mpmath.mpf(1)
        for a in alphas:
            s += P * mpmath.log(mpmath.mpf(a.denominator) / a.numerator)
            P *= mpmath.mpf(a.numerator) / a.denominator
        return s


def cf_value(digits):
    """[a_1, ..., a_k] as an exact Fraction, folded from the right."""
    x = Fraction(0)
    for d in reversed(digits):
        x = 1 / (d + x)
    return x


def iterate_coefficient(p, q, k):
    """Coefficient of z^k in the q-th iterate of lambda z + z^2, lambda = exp(2 pi i p/q), exact."""
    z = sympy.symbols("z")
    lam = sympy.exp(2 * sympy.pi * sympy.I * sympy.Rational(p, q))
    f = z
    for _ in range(q):
        f = sympy.expand(lam * f + f ** 2)
        f = sum(f.coeff(z, j) * z ** j for j in range(k + 1))
    return sympy.nsimplify(sympy.simplify(f.coeff(z, k)))


def hausdorff_points(a, b):
    """Brute-force Hausdorff distance between two finite point sets in R^2."""
    a = np.asarray(a, float)
    b = np.asarray(b, float)
    d = np.sqrt(((a[:, None, :] - b[None, :, :]) ** 2).sum(-1))
    return max(d.min(1).max(), d.min(0).max())


def brute_force_k_membership(c, z, maxiter=200):
    """Float orbit; True if bounded by 2 + |c| after maxiter steps (heuristic)."""
    R = 2 + abs(c)
    for _ in range(maxiter):
        if abs(z) > R:
            return False
        z = z * z + c
    return True


def small_expansions(max_len, max_digit):
    for n in range(1, max_len + 1):
        for digits in product(range(1, max_digit + 1), repeat=n):
            yield list(digits)
