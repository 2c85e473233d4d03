"""Acceptance criteria, one test each, at their stated tolerances.

Every test records a PASS/FAIL line (printed in the pytest terminal summary,
or directly when this file is run as a script) before asserting.
"""

import random
import time
from fractions import Fraction

import mpmath
import pytest
import sympy

from brjunokit.brjuno import phi, phi_closed_form
from brjunokit.contfrac import ContinuedFraction, Tail, consecutive_products_below_half, convergents
from brjunokit.dynamics import iterate_taylor_A, upsilon_rational
from brjunokit.intervals import precision
from brjunokit.julia import Circle, Segment, hausdorff_to_reference, render
from brjunokit.perturb import (
    beta_of,
    choose_m,
    find_N,
    growth_lower_bound,
    omega_of,
    remainder_ratio_margin,
    run_staircase,
    stabilization_certificate,
    tail_guard_m0,
)
from brjunokit.siegel import Disk, SlitDisk, conformal_radius, radius_drop_bound, upsilon_estimate

import oracles

try:
    from conftest import ACCEPTANCE_RESULTS
except ImportError:  # run as a script
    ACCEPTANCE_RESULTS = {}

PREFIX = [1, 1, 1]


def record(num, label, ok, detail):
    ACCEPTANCE_RESULTS[num] = (label, bool(ok), detail)
    print(f"{'PASS' if ok else 'FAIL'}  [{num:2d}] {label}: {detail}")
    assert ok, detail


def _f(x):
    return mpmath.mpf(x.numerator) / x.denominator


def test_01_golden_closed_form():
    t0 = time.perf_counter()
    iv = phi(ContinuedFraction.golden(), 40)
    dt = time.perf_counter() - t0
    with mpmath.workdps(60):
        ref = oracles.golden_phi()
        inside = _f(iv.lower()) <= ref <= _f(iv.upper())
    ok = inside and iv.width_float() <= 2.0 ** -40 and dt < 1
    record(1, "phi(golden) vs log(1/t)/(1-t)", ok,
           f"encloses={inside} width={iv.width_float():.2e} time={dt:.3f}s")


def test_02_consecutive_product_sweep():
    rng = random.Random(20240601)
    violations = 0
    for _ in range(10 ** 4):
        n = rng.randint(1, 20)
        digits = tuple(rng.choice([1, 1, 2, 3, rng.randint(1, 10 ** 6)]) for _ in range(n))
        tail = rng.choice([Tail.ALL_ONES, Tail.TERMINATING])
        # terminating expansions are taken in canonical form (last digit >= 2)
        cf = ContinuedFraction(digits, tail).canonical()
        count = len(cf) + (5 if tail is Tail.ALL_ONES else 0)
        if not consecutive_products_below_half(cf, count):
            violations += 1
    record(2, "alpha_(k-1) alpha_k < 1/2 on 10^4 expansions", violations == 0, f"violations={violations}")


def test_03_remainder_ratio_bound():
    t0 = time.perf_counter()
    m = choose_m(PREFIX, Fraction(1, 2))
    worst = None
    bad = 0
    for N in range(1, 51):
        for i, lhs, bound in remainder_ratio_margin(PREFIX, m, N):
            if not lhs.lt(bound):
                bad += 1
            ratio = lhs.hi_float() / bound.lo_float()
            worst = ratio if worst is None else max(worst, ratio)
    dt = time.perf_counter() - t0
    record(3, "|log alpha_i(N)/alpha_i(N+1)| < 2^(i-n-m)/N, N=1..50", bad == 0 and dt < 10,
           f"m={m} failures={bad} worst ratio={worst:.3f} time={dt:.2f}s")


def test_04_window_search():
    details = []
    ok = True
    for eps in (Fraction(1, 2), Fraction(1, 10), Fraction(1, 100)):
        m = choose_m(PREFIX, eps)
        plan = find_N(PREFIX, m, eps)
        with precision(plan.precision_bits):
            base = phi_closed_form(omega_of(PREFIX))
            val = phi_closed_form(beta_of(PREFIX, m, plan.N))
            in_window = val.gt(base + eps) and val.lt(base + 2 * eps)
        steps_ok = not plan.step_violations and (plan.step_bound_for_all_N or plan.step_checks >= 1)
        ok = ok and in_window and steps_ok
        details.append(f"eps={eps}: m={m} N~2^{plan.N.bit_length()} ({plan.method}) window={in_window} "
                       f"step checks={plan.step_checks} violations={len(plan.step_violations)} "
                       f"analytic={plan.step_bound_for_all_N}")
    record(4, "find_N window (eps, 2 eps) and step bound", ok, "; ".join(details))


def test_05_growth_lower_bound():
    m = choose_m(PREFIX, Fraction(1, 2))
    parts = []
    ok = True
    with precision(96):
        for N in (10, 10 ** 3, 10 ** 6):
            val = phi_closed_form(beta_of(PREFIX, m, N))
            lb = growth_lower_bound(PREFIX, m, N)
            ok = ok and val.gt(lb)
            parts.append(f"N={N}: {val.mid():.4f} > {lb.mid():.3e}")
    record(5, "phi(beta_N) above the logarithmic growth bound", ok, f"m={m}; " + ", ".join(parts))


def test_06_staircase():
    t0 = time.perf_counter()
    res = run_staircase([1], steps=5)
    dt = time.perf_counter() - t0
    states = res.states
    increasing = all(b.phi.gt(a.phi) for a, b in zip(states, states[1:]))
    increments = all(b.step.increment.gt(b.step.epsilon) and b.step.increment.lt(2 * b.step.epsilon)
                     for b in states[1:])
    extension = all(b.prefix[: len(a.prefix)] == a.prefix for a, b in zip(states, states[1:]))
    done = len(states) - 1
    ok = res.complete and done == 5 and increasing and increments and extension and dt < 120
    why = "" if res.complete else f" stopped: {type(res.error).__name__}: {res.error}"
    record(6, "staircase of 5 steps with eps_i = 2^-i", ok,
           f"steps={done}/5 increasing={increasing} increments={increments} prefix-extension={extension} "
           f"time={dt:.1f}s{why}")


def test_07_upsilon_half():
    # A from the independent symbolic composition of lambda z + z^2 with lambda = -1
    A_ref = oracles.iterate_coefficient(1, 2, 3)
    A = iterate_taylor_A(Fraction(1, 2))
    A_ok = A_ref == -2 and A.re.contains(-2) and A.im.contains(0)
    ups = upsilon_rational(Fraction(1, 2))
    with mpmath.workdps(40):
        target = mpmath.log(2 * mpmath.pi) / 2
        err = max(abs(_f(ups.lower()) - target), abs(_f(ups.upper()) - target))
        inside = _f(ups.lower()) <= target <= _f(ups.upper())
    ok = A_ok and inside and err < 1e-9
    record(7, "upsilon(1/2) = log(2 pi)/2", ok, f"A={sympy.sstr(A_ref)} encloses={inside} max error={float(err):.1e}")


def test_08_upsilon_continuity_trend():
    hat = upsilon_estimate(ContinuedFraction.golden(), 2048).value
    gaps = []
    for c in convergents(ContinuedFraction.golden(), 12):
        if c.q > 89:
            break
        gaps.append((c.q, abs(upsilon_rational(Fraction(c.p, c.q)).mid() - hat)))
    ups = sum(1 for (_, a), (_, b) in zip(gaps, gaps[1:]) if b > a)
    final = gaps[-1][1]
    ok = ups <= 1 and final < 0.2
    record(8, "|upsilon(p_n/q_n) - upsilon_hat(golden)| trend, q <= 89", ok,
           f"upsilon_hat={hat:.5f} (non-rigorous) non-monotone steps={ups} final gap={final:.4f} at q={gaps[-1][0]}")


@pytest.mark.parametrize("c,m,ref,label", [
    (0, 6, Circle(), "J(z^2) vs unit circle"),
    (-2, 5, Segment(), "J(z^2-2) vs [-2,2]"),
])
def test_09_render_fidelity(c, m, ref, label):
    t0 = time.perf_counter()
    grid, balls = render(c, m=m, resolution=512)
    dt = time.perf_counter() - t0
    lo, hi = hausdorff_to_reference(balls, ref, 2.0 ** -16)
    ok = hi < 2.0 ** -m and balls.claimed_precision == m and dt < 30
    prev = ACCEPTANCE_RESULTS.get(9)
    detail = (f"{label}: d_H in [{lo:.6f}, {hi:.6f}] < 2^-{m}={2.0 ** -m:.6f} claimed={balls.claimed_precision} "
              f"balls={len(balls)} time={dt:.1f}s")
    if prev is not None:
        ok = ok and prev[1]
        detail = prev[2] + "; " + detail
    record(9, "render fidelity at 512^2", ok, detail)


def _adversarial_tails(rng, count):
    fixed = [[10 ** 6], [10 ** 6] * 8, [1, 10 ** 6], [10 ** 6, 1] * 5, [2] * 30, [10 ** 6, 10 ** 6, 1, 1],
             [999_999, 1, 999_999], [3, 10 ** 6]]
    tails = list(fixed)
    while len(tails) < count:
        n = rng.randint(1, 12)
        tails.append([rng.choice([1, 2, rng.randint(1, 10 ** 6), 10 ** 6]) for _ in range(n)])
    return tails[:count]


def test_10_tail_bounds():
    rng = random.Random(7)
    parts = []
    ok = True
    with precision(96):
        base = phi_closed_form(omega_of(PREFIX))
        for eps in (Fraction(1, 2), Fraction(1, 10)):
            m0 = tail_guard_m0(PREFIX, eps)
            bad = 0
            for tail in _adversarial_tails(rng, 100):
                cf = ContinuedFraction.ones_tail(PREFIX + [1] * (m0 - 1) + tail)
                if not phi_closed_form(cf).gt(base - eps):
                    bad += 1
            ok = ok and bad == 0
            parts.append(f"guard eps={eps}: m0={m0} failures={bad}/100")
        omega = ContinuedFraction.ones_tail([1, 1, 1, 50])
        top_base = phi_closed_form(omega)
        for eps in (Fraction(1, 2), Fraction(1, 10)):
            s = stabilization_certificate(omega, eps)
            top = top_base + eps
            bad = sum(1 for n in range(s.N, max(s.N_bound, s.N) + 40)
                      if not phi_closed_form(omega.truncated(n)).lt(top))
            ok = ok and bad == 0
            parts.append(f"truncation eps={eps}: N={s.N} (analytic bound {s.N_bound}) failures={bad}")
    record(10, "tail guard and truncation stability", ok, "; ".join(parts))


def test_11_radius_drop():
    parts = []
    ok = True
    for dom, name in ((Disk(), "disk"), (SlitDisk(), "slit disk")):
        worst = 0.0
        for j in range(1, 5):
            rep = radius_drop_bound(dom, Fraction(1, 10 ** j))
            ok = ok and rep.holds
            worst = max(worst, rep.difference.hi_float() / rep.bound.lo_float())
        parts.append(f"{name}: max diff/bound={worst:.3f}")
    record(11, "0 < r(U) - r(V) <= 4 sqrt(r(U) eps)", ok, "; ".join(parts))


def test_12_schwarz_and_monotone_radius():
    thetas = [ContinuedFraction.golden(), ContinuedFraction.ones_tail([2]), ContinuedFraction.ones_tail([3, 1, 4]),
              ContinuedFraction.ones_tail([1, 2, 1, 2])]
    radii = [conformal_radius(t, 256).point_estimate for t in thetas]
    family = [conformal_radius(ContinuedFraction.ones_tail([1, 1, 1, N]), 256).point_estimate
              for N in (1, 10, 100, 1000)]
    below = all(r < 2 for r in radii + family)
    mono = all(b <= a for a, b in zip(family, family[1:]))
    record(12, "r_hat < 2 and non-increasing in the inserted digit", below and mono,
           f"r_hat={[round(r, 4) for r in radii]} [1,1,1,N]: {[round(r, 4) for r in family]} (non-rigorous)")


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_") and callable(fn):
            params = getattr(fn, "pytestmark", [])
            calls = [()]
            for mark in params:
                if mark.name == "parametrize":
                    calls = mark.args[1]
            for args in calls:
                try:
                    fn(*args)
                except AssertionError:
                    failed += 1
    sys.exit(1 if failed else 0)
