"""Digit-insertion perturbations of phi and the increasing phi staircase.

Notation: I is a digit prefix of length n, omega = [I; ones] and
beta(N) = [I, 1, ..., 1, N; ones] with N at position n + m.  Inserting a large
digit raises phi by roughly alpha_1 ... alpha_{n+m-1} log N, so N can be tuned
to hit a window (phi(omega) + eps, phi(omega) + 2 eps).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .brjuno import phi_closed_form, phi_golden, phi_terms
from .contfrac import ContinuedFraction, Tail, theta_star_interval
from .intervals import Interval, ln2, precision

BASE_PREC = 64
MAX_PREC = 128


class PrecisionError(RuntimeError):
    """A strict inequality could not be decided at the precision cap."""


class WindowMissed(RuntimeError):
    """Consecutive digits jumped over the target window (the step bound failed)."""


class DigitBoundExceeded(RuntimeError):
    """The digit needed to reach the window is larger than the configured bound."""

    def __init__(self, message, needed_bits_estimate=None):
        super().__init__(message)
        self.needed_bits_estimate = needed_bits_estimate


class _Undecided(Exception):
    pass


def omega_of(prefix: Sequence[int]) -> ContinuedFraction:
    return ContinuedFraction(tuple(prefix), Tail.ALL_ONES)


def beta_of(prefix: Sequence[int], m: int, N: int) -> ContinuedFraction:
    """[I, 1 (m-1 times), N; ones]."""
    if m < 1 or N < 1:
        raise ValueError("need m >= 1 and N >= 1")
    return ContinuedFraction(tuple(prefix) + (1,) * (m - 1) + (N,), Tail.ALL_ONES)


def _eps(epsilon) -> Fraction:
    e = Fraction(epsilon) if not isinstance(epsilon, float) else Fraction(epsilon).limit_denominator(1 << 60)
    if e <= 0:
        raise ValueError("epsilon must be positive")
    return e


def _tail_from(cf: ContinuedFraction, start: int) -> Interval:
    """sum_{i >= start} alpha_1 ... alpha_{i-1} log(1/alpha_i) for an all-ones tail."""
    L = cf.core_length()
    upto = max(L, start - 1)
    terms = phi_terms(cf, upto) if upto else []
    al = cf.alpha_enclosures(upto) if upto else []
    P = Interval(1)
    for a in al:
        P = P * a
    head = Interval(0)
    for t in terms[start - 1:]:
        head = head + t
    return head + P * phi_golden()


def _sup_log_ratio() -> Interval:
    """sup over integers N >= 1 of log(N + 1/phi) / N.

    g(1) = log(phi) and g(2) = log(phi^2)/2 coincide (2 + 1/phi = phi^2), and g
    decreases for N >= 2 because N/(N + 1/phi) < log(N + 1/phi) there.
    """
    inv_phi = theta_star_interval()
    g1 = (inv_phi + 1).log()
    g2 = (inv_phi + 2).log().scale2(-1)
    return Interval.hull(g1, g2)


# ---------------------------------------------------------------------------
# choice of m


@dataclass(frozen=True)
class OffsetChoice:
    m: int
    m1: int
    guard_m0: int
    tail_past_m1: Interval
    head_factor_exponent: int
    step_bound: Interval


def _certificate_checks(prefix, eps: Fraction, m: int, phi_omega: Interval, Pn: Interval):
    """(ok, m1, tail, step) for the head/tail split and the phi^1 step bound at offset m."""
    n = len(prefix)
    t = theta_star_interval()
    pg = phi_golden()
    # (a) a split point m1 < m with a small tail and a tight head
    m1 = 2
    tail = Pn * t ** (m1 - 1) * pg
    while not tail.lt(eps / 40):
        m1 += 1
        tail = Pn * t ** (m1 - 1) * pg
    ok_a = m1 < m
    if ok_a:
        k = m1 + 3 - m
        expo = Interval(1 << k) if k >= 0 else Interval(Fraction(1, 1 << (-k)))
        factor = expo.exp()
        ok_a = factor.lt(1 + eps / (40 * phi_omega))
    # (b) the phi^1 step bound 2^{-(n+m-2)/2} * 14 * sup log(N + 1/phi)/N < eps/2
    step = Interval(14) * _sup_log_ratio() / Interval(2).sqrt() ** (n + m - 2)
    ok_b = step.lt(eps / 2)
    return ok_a and ok_b, m1, tail, step


def choose_m(prefix: Sequence[int], epsilon) -> int:
    return choose_m_certificate(prefix, epsilon).m


def choose_m_certificate(prefix: Sequence[int], epsilon) -> OffsetChoice:
    """Smallest m passing the head/tail split, the step bound and the tail guard.

    All three conditions are monotone in m, so doubling followed by bisection
    finds the smallest passing value.
    """
    eps = _eps(epsilon)
    prefix = tuple(prefix)
    with precision(BASE_PREC + 32):
        omega = omega_of(prefix)
        phi_omega = phi_closed_form(omega)
        Pn = Interval(1)
        for a in omega.alpha_enclosures(len(prefix)):
            Pn = Pn * a
        m0 = tail_guard_m0(prefix, eps)

        def passes(m):
            return m >= m0 and _certificate_checks(prefix, eps, m, phi_omega, Pn)[0]

        hi = 4
        while not passes(hi):
            hi *= 2
        lo = hi // 2
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if passes(mid):
                hi = mid
            else:
                lo = mid
        m = hi
        _, m1, tail, step = _certificate_checks(prefix, eps, m, phi_omega, Pn)
        return OffsetChoice(m=m, m1=m1, guard_m0=m0, tail_past_m1=tail,
                            head_factor_exponent=m1 + 3 - m, step_bound=step)


def step_bound_holds(prefix: Sequence[int], m: int, epsilon) -> bool:
    """True when the analytic bound phi(beta(N+1)) - phi(beta(N)) < eps holds for every N."""
    eps = _eps(epsilon)
    with precision(BASE_PREC + 32):
        omega = omega_of(prefix)
        phi_omega = phi_closed_form(omega)
        Pn = Interval(1)
        for a in omega.alpha_enclosures(len(prefix)):
            Pn = Pn * a
        return _certificate_checks(tuple(prefix), eps, m, phi_omega, Pn)[0]


# ---------------------------------------------------------------------------
# tail guard


@dataclass(frozen=True)
class TailGuard:
    m0: int
    m0_head_domination: int
    m0_direct: int


def _head_lower(prefix_digits: Sequence[int], x: Interval) -> Interval:
    """Enclosure of sum_{j <= len} alpha_1..alpha_{j-1} log(1/alpha_j) when alpha_{len+1} = x."""
    one = Interval(1)
    al = []
    y = x
    for d in reversed(prefix_digits):
        y = one / (y + d)
        al.append(y)
    al.reverse()
    s = Interval(0)
    P = Interval(1)
    for a in al:
        s = s + P * (-(a.log()))
        P = P * a
    return s


def _direct_guard_holds(digits: Sequence[int], bound: Interval, pieces: int = 16, depth: int = 10) -> bool:
    """Certify head(x) > bound for every x in [0, 1] by adaptive subdivision."""
    stack = [(Fraction(i, pieces), Fraction(i + 1, pieces), 0) for i in range(pieces)]
    while stack:
        a, b, d = stack.pop()
        h = _head_lower(digits, Interval(a, b))
        if h.gt(bound):
            continue
        if d >= depth:
            return False
        mid = (a + b) / 2
        if not _head_lower(digits, Interval(mid)).gt(bound):
            return False
        stack.append((a, mid, d + 1))
        stack.append((mid, b, d + 1))
    return True


def tail_guard_certificate(prefix: Sequence[int], epsilon, max_m: int = 256) -> TailGuard:
    """Offset m0 such that every [I, 1 (m-1 times), T] with m >= m0 has phi > phi(omega) - eps.

    Two certificates are computed and the smaller is returned:
    head domination (every head term of the perturbed number stays within a
    factor exp(-2^{m1-m0+3}) of omega's, and omega's tail past n+m1 is below
    eps/2) and a direct bound (the head sum over positions < n+m is minimised
    over all values of the free remainder in [0, 1]).  Both properties are
    inherited by larger m, because [I, 1 (m), T] = [I, 1 (m-1), T'] with T' = [1, T].
    """
    eps = _eps(epsilon)
    prefix = tuple(prefix)
    n = len(prefix)
    with precision(BASE_PREC + 32):
        omega = omega_of(prefix)
        phi_omega = phi_closed_form(omega)
        if phi_omega.le(eps):
            return TailGuard(1, 1, 1)
        # head domination
        m1 = 2
        while not _tail_from(omega, n + m1).lt(eps / 2):
            m1 += 1
        target = 1 - eps / (2 * phi_omega)
        m0a = m1 + 1
        while True:
            k = m1 - m0a + 3
            expo = Interval(1 << k) if k >= 0 else Interval(Fraction(1, 1 << (-k)))
            if (-expo).exp().gt(target):
                break
            m0a += 1
        # direct subdivision bound
        bound = phi_omega - eps
        m0d = None
        for m in range(1, min(m0a, max_m) + 1):
            digits = prefix + (1,) * (m - 1)
            if _direct_guard_holds(digits, bound):
                m0d = m
                break
        if m0d is None:
            m0d = m0a
        return TailGuard(min(m0a, m0d), m0a, m0d)


def tail_guard_m0(prefix: Sequence[int], epsilon) -> int:
    return tail_guard_certificate(prefix, epsilon).m0


# ---------------------------------------------------------------------------
# stabilisation under truncation


@dataclass(frozen=True)
class Stabilization:
    N: int
    N_bound: int
    core_length: int
    m0: int


def stabilization_certificate(omega: ContinuedFraction, epsilon) -> Stabilization:
    """N such that [a_1..a_n; ones] has phi < phi(omega) + eps for every n >= N.

    The three-part bound: choose m0 with omega's tail from m0 below
    eps/(4 e^2) and 2^{4 - m0/2} < eps/2, then n large enough that head terms
    i < m0 move by a factor below 1 + eps/(4 phi(omega)).  Independently,
    truncating at or after the last non-one digit returns omega itself, so the
    core length also works; the smaller value is returned.
    """
    if omega.tail is not Tail.ALL_ONES:
        raise ValueError("omega needs an all-ones tail")
    eps = _eps(epsilon)
    with precision(BASE_PREC + 32):
        phi_omega = phi_closed_form(omega)
        e2 = Interval(2).exp()
        m0 = 1
        while True:
            # 2^{4 - m0/2} < eps/2  <=>  2^{8 - m0} < eps^2 / 4
            geo_ok = Fraction(2) ** (8 - m0) < eps * eps / 4
            if geo_ok and _tail_from(omega, m0).lt(eps / (4 * e2)):
                break
            m0 += 1
        target = 1 + eps / (4 * phi_omega)
        n = m0 + 1
        while True:
            k = m0 - n + 1
            expo = Interval(1 << k) if k >= 0 else Interval(Fraction(1, 1 << (-k)))
            if expo.exp().lt(target):
                break
            n += 1
        core = max(1, omega.core_length())
        return Stabilization(N=min(n, core), N_bound=n, core_length=omega.core_length(), m0=m0)


def stabilization_N(omega: ContinuedFraction, epsilon) -> int:
    return stabilization_certificate(omega, epsilon).N


# ---------------------------------------------------------------------------
# digit search


@dataclass(frozen=True)
class PerturbationPlan:
    base_prefix: tuple
    m: int
    epsilon: Fraction
    N: int
    phi_before: Interval
    phi_after: Interval
    method: str = "sweep"
    evaluations: int = 0
    step_checks: int = 0
    step_violations: tuple = ()
    step_bound_for_all_N: bool = False
    precision_bits: int = BASE_PREC

    @property
    def beta(self) -> ContinuedFraction:
        return beta_of(self.base_prefix, self.m, self.N)

    @property
    def increment(self) -> Interval:
        return self.phi_after - self.phi_before


def _search(prefix, m, eps, sweep_limit, max_digit_bits, prec, analytic):
    with precision(prec):
        phi_omega = phi_closed_form(omega_of(prefix))
        lo_t = phi_omega + eps
        hi_t = phi_omega + 2 * eps
        evals = 0
        checks = 0
        violations = []

        def F(N):
            nonlocal evals
            evals += 1
            return phi_closed_form(beta_of(prefix, m, N))

        def classify(v):
            if v.lt(lo_t):
                return "below"
            if v.gt(lo_t) and v.lt(hi_t):
                return "inside"
            if v.gt(hi_t):
                return "above"
            raise _Undecided()

        def check_step(N, a, b):
            nonlocal checks
            checks += 1
            d = b - a
            if not d.lt(eps):
                if d.ge(eps):
                    violations.append(N)
                else:
                    raise _Undecided()

        def done(N, v, method):
            return PerturbationPlan(tuple(prefix), m, eps, N, phi_omega, v, method, evals, checks,
                                    tuple(violations), analytic, prec)

        prev = F(1)
        if classify(prev) != "below":
            raise _Undecided()
        for N in range(2, sweep_limit + 1):
            cur = F(N)
            check_step(N - 1, prev, cur)
            c = classify(cur)
            if c == "inside":
                return done(N, cur, "sweep")
            if c == "above":
                raise WindowMissed(f"phi jumped over the window between N={N - 1} and N={N}")
            prev = cur

        def probe(N):
            v = F(N)
            check_step(N, v, F(N + 1))
            return v, classify(v)

        lo = sweep_limit
        e = max(sweep_limit.bit_length(), 2)
        while True:
            e *= 2
            if e > max_digit_bits:
                raise DigitBoundExceeded(*_digit_need(prefix, m, eps, max_digit_bits))
            N = 1 << e
            v, c = probe(N)
            if c == "inside":
                return done(N, v, "gallop")
            if c == "above":
                hi = N
                break
            lo = N
        while hi - lo > 1:
            if hi > 4 * lo:
                mid = math.isqrt(lo * hi)
            else:
                mid = (lo + hi) // 2
            v, c = probe(mid)
            if c == "inside":
                return done(mid, v, "bisect")
            if c == "below":
                lo = mid
            else:
                hi = mid
        raise WindowMissed(f"phi jumped over the window between N={lo} and N={hi}")


def _digit_need(prefix, m, eps, max_digit_bits):
    """Message and rough bit length of the digit that reaches the window.

    The inserted term is about P log N, with P the product of the alphas
    before the insertion point, so log2 N is roughly eps / (P log 2).
    """
    al = omega_of(tuple(prefix) + (1,) * (m - 1)).alpha_enclosures(len(prefix) + m - 1)
    P = Interval(1)
    for a in al:
        P = P * a
    need_log2 = (Interval(eps) / (P * ln2())).log() / ln2()
    bits = need_log2.mid()
    need = 1 << int(bits) if bits < 4096 else None
    return (f"no digit below 2^{max_digit_bits} reaches the window; "
            f"the digit needs roughly 2^{bits:.1f} bits", need)


def find_N(prefix: Sequence[int], m: int, epsilon, *, sweep_limit: int = 2048,
           max_digit_bits: int = 1 << 22, max_prec: int = MAX_PREC) -> PerturbationPlan:
    """Digit N at position n + m with phi(omega) + eps < phi(beta(N)) < phi(omega) + 2 eps.

    N is increased one at a time from 1 up to ``sweep_limit``; every
    consecutive step is checked against eps.  If the window is not reached,
    N = 2^e is galloped with e doubling and then bisected geometrically; each
    probe also checks its own step to N + 1.  Inequalities undecided at the
    working precision are retried at doubled precision up to ``max_prec``.
    """
    eps = _eps(epsilon)
    prefix = tuple(prefix)
    if m < 1:
        raise ValueError("m must be >= 1")
    analytic = step_bound_holds(prefix, m, eps)
    prec = BASE_PREC
    while True:
        try:
            return _search(prefix, m, eps, sweep_limit, max_digit_bits, prec, analytic)
        except _Undecided:
            if prec >= max_prec:
                raise PrecisionError(f"window membership undecidable at {max_prec} bits")
            prec = min(2 * prec, max_prec)


# ---------------------------------------------------------------------------
# staircase


@dataclass(frozen=True)
class StepRecord:
    epsilon: Fraction
    m: int
    guard_m0: int
    N: int
    increment: Interval
    plan: PerturbationPlan


@dataclass(frozen=True)
class FoolingState:
    index: int
    prefix: tuple
    window: Interval
    gamma: ContinuedFraction
    phi: Interval
    step: Optional[StepRecord] = None


@dataclass
class StaircaseResult:
    states: list = field(default_factory=list)
    error: Optional[Exception] = None

    @property
    def complete(self) -> bool:
        return self.error is None


def default_schedule(steps: int) -> list:
    return [Fraction(1, 1 << i) for i in range(1, steps + 1)]


def _remaining(schedule, i):
    """Allowance for all increments after step i (geometric continuation of the last entry)."""
    rest = sum(schedule[i:], Fraction(0))
    return rest + (schedule[-1] if schedule else Fraction(0))


def _window(phi_i: Interval, schedule, i) -> Interval:
    T = _remaining(schedule, i)
    return Interval._raw(phi_i.lo, (phi_i + 2 * T).hi)


def run_staircase(I0: Sequence[int], epsilon_schedule=None, steps: int = 5, *,
                  sweep_limit: int = 2048, max_digit_bits: int = 1 << 22,
                  max_m_extra: int = 64) -> StaircaseResult:
    """Increasing staircase gamma_0, gamma_1, ... with certified phi increments.

    Step i+1 extends I_i by m-1 ones and a digit N so that
    phi(gamma_{i+1}) - phi(gamma_i) lies in (eps_{i+1}, 2 eps_{i+1}).  The
    offset m starts at the tail-guard value for 2 eps_{i+1}, which keeps every
    later extension above phi(gamma_i) - 2 eps_{i+1}; larger m is tried only
    when the digits jump over the window.  Errors stop the run and are
    returned together with the states reached so far.
    """
    schedule = [Fraction(e) for e in (epsilon_schedule or default_schedule(steps))][:steps]
    if len(schedule) < steps:
        raise ValueError("epsilon schedule shorter than the number of steps")
    if any(e <= 0 for e in schedule):
        raise ValueError("epsilon schedule must be positive")
    result = StaircaseResult()
    prefix = tuple(I0)
    gamma = omega_of(prefix)
    with precision(BASE_PREC):
        phi0 = phi_closed_form(gamma)
    result.states.append(FoolingState(0, prefix, _window(phi0, schedule, 0), gamma, phi0))
    for i in range(steps):
        eps = schedule[i]
        try:
            m0 = tail_guard_m0(prefix, 2 * eps)
            plan = None
            for m in range(m0, m0 + max_m_extra + 1):
                try:
                    plan = find_N(prefix, m, eps, sweep_limit=sweep_limit, max_digit_bits=max_digit_bits)
                    break
                except WindowMissed:
                    continue
            if plan is None:
                raise WindowMissed(f"no offset in [{m0}, {m0 + max_m_extra}] reached the window")
        except Exception as exc:  # keep partial output
            result.error = exc
            return result
        new_prefix = prefix + (1,) * (plan.m - 1) + (plan.N,)
        gamma = omega_of(new_prefix)
        # tighter enclosure each step so window widths keep halving
        with precision(BASE_PREC + 4 * (i + 1)):
            phi_new = phi_closed_form(gamma)
        prev = result.states[-1]
        inc = phi_new - prev.phi
        record = StepRecord(eps, plan.m, m0, plan.N, inc, plan)
        result.states.append(FoolingState(i + 1, new_prefix, _window(phi_new, schedule, i + 1),
                                          gamma, phi_new, record))
        prefix = new_prefix
    return result


def staircase(I0: Sequence[int], epsilon_schedule=None, steps: int = 5, **kwargs) -> list:
    """States gamma_0..gamma_steps; raises if any step fails."""
    res = run_staircase(I0, epsilon_schedule, steps, **kwargs)
    if res.error is not None:
        raise res.error
    return res.states


# ---------------------------------------------------------------------------
# numeric forms of the perturbation inequalities


def remainder_ratio_margin(prefix: Sequence[int], m: int, N: int) -> list:
    """For i <= n+m: (|log(alpha_i(beta N)/alpha_i(beta N+1))|, bound 2^{i-(n+m)}/N)."""
    n = len(prefix)
    b1 = beta_of(prefix, m, N).alpha_enclosures(n + m)
    b2 = beta_of(prefix, m, N + 1).alpha_enclosures(n + m)
    out = []
    for i in range(1, n + m + 1):
        lhs = abs((b1[i - 1] / b2[i - 1]).log())
        k = i - (n + m)
        bound = Interval(Fraction(1, (1 << (-k)) * N))
        out.append((i, lhs, bound))
    return out


def shared_prefix_margins(g1: ContinuedFraction, g2: ContinuedFraction, shared: int) -> list:
    """For expansions agreeing in the first ``shared`` = n+m-1 digits.

    Returns (i, |log alpha ratio|, 2^{i-(n+m)+1}, |log log-ratio| or None, 2^{i-(n+m)+2}).
    """
    if g1.digits(shared) != g2.digits(shared):
        raise ValueError("expansions do not share the requested prefix")
    pos = shared + 1
    a1 = g1.alpha_enclosures(shared)
    a2 = g2.alpha_enclosures(shared)
    out = []
    for i in range(1, pos):
        r = abs((a1[i - 1] / a2[i - 1]).log())
        k = i - pos
        b_alpha = Interval(Fraction(2, 1 << (-k)))
        if i < pos - 1:
            l1 = -(a1[i - 1].log())
            l2 = -(a2[i - 1].log())
            rl = abs((l1 / l2).log())
            b_log = Interval(Fraction(4, 1 << (-k)))
        else:
            rl, b_log = None, None
        out.append((i, r, b_alpha, rl, b_log))
    return out


def phi_minus_shift(prefix: Sequence[int], m: int, N: int) -> Interval:
    """|phi^-(beta N) - phi^-(beta N+1)| where phi^- drops the term at n+m."""
    from .brjuno import phi_decompose

    n = len(prefix)
    d1 = phi_decompose(beta_of(prefix, m, N), n, m)
    d2 = phi_decompose(beta_of(prefix, m, N + 1), n, m)
    return abs(d1.phi_minus - d2.phi_minus)


def growth_lower_bound(prefix: Sequence[int], m: int, N: int) -> Interval:
    """e^{-2} log(N + 1/phi)/log(1 + 1/phi) * phi^1(beta 1)."""
    from .brjuno import phi_decompose

    n = len(prefix)
    one = phi_decompose(beta_of(prefix, m, 1), n, m).phi_one
    t = theta_star_interval()
    return (Interval(-2).exp() * (t + N).log() / (t + 1).log()) * one
