"""Rigorous enclosures of the Brjuno-type sums.

phi(x) = sum_{n>=1} alpha_1 ... alpha_{n-1} log(1/alpha_n), where alpha_n are
the remainders of the continued fraction of x (the n = 1 term has an empty
product).  B(x) = sum log(q_{n+1}) / q_n over convergent denominators.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .contfrac import ContinuedFraction, Tail, ValueUndetermined, denominators, theta_star_interval
from .intervals import Interval, ln2, precision


class InfiniteValue(ValueError):
    """The requested series diverges for this input."""


@dataclass(frozen=True)
class PhiDecomposition:
    phi_minus: Interval
    phi_one: Interval
    n: int
    m: int

    @property
    def total(self) -> Interval:
        return self.phi_minus + self.phi_one


def _require_ones(cf: ContinuedFraction):
    if cf.tail is Tail.TERMINATING:
        raise InfiniteValue("phi diverges at rationals; use phi_trunc")
    if cf.tail is Tail.UNSPECIFIED:
        raise ValueUndetermined("phi of an unspecified tail")


def _log_inv(a: Interval) -> Interval:
    return -(a.log())


def phi_golden() -> Interval:
    """phi(theta*) = log(1/theta*) / (1 - theta*) at the working precision."""
    t = theta_star_interval()
    return _log_inv(t) / (1 - t)


def phi_partial(cf: ContinuedFraction, terms: int) -> tuple:
    """(partial sum of the first ``terms`` terms, tail bound) at working precision.

    The tail bound needs ``terms`` >= core_length(): past the last non-one
    digit every alpha exceeds 1/2, so log(1/alpha) < log 2, and consecutive
    products alpha_{j-1} alpha_j < 1/2 make the remaining weights sum to at
    most 4 * alpha_1 ... alpha_terms.
    """
    _require_ones(cf)
    L = cf.core_length()
    if terms < L:
        raise ValueError("the tail bound needs terms >= core length")
    al = cf.alpha_enclosures(terms)
    s = Interval(0)
    P = Interval(1)
    for a in al:
        s = s + P * _log_inv(a)
        P = P * a
    return s, ln2().scale2(2) * P


def phi(cf: ContinuedFraction, k: int = 53) -> Interval:
    """Enclosure of phi(cf) of width at most 2**-k (all-ones tails only)."""
    _require_ones(cf)
    half_target = Fraction(1, 1 << (k + 1))
    prec = k + 24
    while True:
        with precision(prec):
            L = cf.core_length()
            al = cf.alpha_enclosures(L)
            s = Interval(0)
            P = Interval(1)
            for a in al:
                s = s + P * _log_inv(a)
                P = P * a
            t = theta_star_interval()
            lt = _log_inv(t)
            c4 = ln2().scale2(2)
            while True:
                tail = c4 * P
                if tail.lt(half_target):
                    break
                s = s + P * lt
                P = P * t
            res = Interval._raw(s.lo, (s + tail).hi)
            if res.width().le(2 * half_target):
                return res
        prec += 32


def phi_closed_form(cf: ContinuedFraction) -> Interval:
    """Second route to phi: finite head plus the exact geometric all-ones tail.

    Evaluated at the working precision; used where many evaluations are needed.
    """
    _require_ones(cf)
    L = cf.core_length()
    al = cf.alpha_enclosures(L)
    s = Interval(0)
    P = Interval(1)
    for a in al:
        s = s + P * _log_inv(a)
        P = P * a
    return s + P * phi_golden()


def phi_terms(cf: ContinuedFraction, count: int) -> list:
    """Enclosures of the individual terms alpha_1..alpha_{j-1} log(1/alpha_j), j <= count."""
    al = cf.alpha_enclosures(count)
    out = []
    P = Interval(1)
    for a in al:
        out.append(P * _log_inv(a))
        P = P * a
    return out


def phi_trunc(theta, k: int = 53) -> Interval:
    """Truncated sum at a rational p/q in (0, 1], canonical expansion.

    The sum stops before the term whose alpha would vanish.  At theta = 1 the
    canonical expansion is [1], alpha_1 = 1, and the value is log 1 = 0; this
    endpoint value depends on the chosen expansion.
    """
    theta = Fraction(theta)
    if not 0 < theta <= 1:
        raise ValueError("phi_trunc needs 0 < p/q <= 1")
    cf = ContinuedFraction.from_rational(theta)
    al = cf.alphas(len(cf))
    prec = k + 24
    while True:
        with precision(prec):
            s = Interval(0)
            P = Fraction(1)
            for a in al:
                s = s + Interval(P) * Interval(1 / a).log()
                P = P * a
            if s.width().le(Fraction(1, 1 << k)):
                return s
        prec += 32


def phi_decompose(cf: ContinuedFraction, n: int, m: int) -> PhiDecomposition:
    """Split phi into the term at position n + m and everything else."""
    _require_ones(cf)
    pos = n + m
    if n < 0 or m < 1 or pos < 1:
        raise ValueError("position n + m must be a valid digit index (m >= 1)")
    L = cf.core_length()
    upto = max(L, pos)
    al = cf.alpha_enclosures(upto)
    head = Interval(0)
    P = Interval(1)
    one = None
    rest = Interval(0)
    for j, a in enumerate(al, start=1):
        term = P * _log_inv(a)
        if j < pos:
            head = head + term
        elif j == pos:
            one = term
        else:
            rest = rest + term
        P = P * a
    tail = P * phi_golden()
    return PhiDecomposition(phi_minus=head + rest + tail, phi_one=one, n=n, m=m)


def brjuno_sum_B(cf: ContinuedFraction, terms: int, k: int = 53) -> Interval:
    """sum_{j=0}^{terms-1} log(q_{j+1}) / q_j, plus the full tail for all-ones tails.

    Denominators use q_0 = 1, q_1 = a_1, q_{j+1} = a_{j+1} q_j + q_{j-1}.  For
    all-ones tails the sum is continued exactly to the core length and the
    rest is bounded using q_{j+1} <= 2 q_j and q_{K+i} >= q_K phi^(i-1):
    tail <= (phi^3 / q_K) (log(2 q_K / phi) + phi log phi) once q_K >= 4.
    """
    if terms < 0:
        raise ValueError("terms must be non-negative")
    if cf.tail is Tail.UNSPECIFIED and terms > len(cf.prefix):
        raise ValueUndetermined("not enough digits for the requested terms")
    with precision(k + 24):
        count = terms
        if cf.tail is Tail.ALL_ONES:
            count = max(terms, cf.core_length())
            q = denominators(cf, count + 1)
            while q[count] < 4:
                count += 1
                q = denominators(cf, count + 1)
        else:
            q = denominators(cf, count)
        s = Interval(0)
        for j in range(count):
            if q[j + 1] > 1:
                s = s + Interval(q[j + 1]).log() / q[j]
        if cf.tail is not Tail.ALL_ONES:
            return s
        qk = Interval(q[count])
        phi_ = (Interval.sqrt5() + 1).scale2(-1)
        lphi = phi_.log()
        bound = phi_ ** 3 / qk * ((qk.scale2(1) / phi_).log() + phi_ * lphi)
        return Interval._raw(s.lo, (s + bound).hi)
