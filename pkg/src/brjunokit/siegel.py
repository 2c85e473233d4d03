"""Linearizing series of P(z) = lambda z + z^2 and conformal radius estimates.

The linearizer psi(w) = sum b_k w^k solves P(psi(w)) = psi(lambda w), so
b_1 = 1 and (lambda^k - lambda) b_k = sum_{i+j=k} b_i b_j.  Its radius of
convergence is the conformal radius r of the Siegel disk, estimated here
from 1/|b_k|^(1/k).  Those estimates are diagnostics, not enclosures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from . import kernels
from .brjuno import phi
from .contfrac import ContinuedFraction, Tail, value
from .intervals import ComplexInterval, Interval, precision


class SmallDivisorError(ArithmeticError):
    """A divisor lambda^k - lambda could not be separated from zero."""


def _theta_interval(theta, bits: int) -> Interval:
    if isinstance(theta, ContinuedFraction):
        return value(theta, bits)
    if isinstance(theta, Interval):
        return theta
    if isinstance(theta, float):
        return Interval(theta)
    return Interval(Fraction(theta))


def _divisors(theta, n: int, bits: int):
    """Float balls (re, im, rad) enclosing lambda^k - lambda for k = 0..n."""
    dre = np.zeros(n + 1)
    dim = np.zeros(n + 1)
    drad = np.zeros(n + 1)
    with precision(bits):
        th = _theta_interval(theta, bits)
        two_pi = Interval.pi().scale2(1)
        lam = ComplexInterval.exp_i(two_pi * th)
        for k in range(2, n + 1):
            d = ComplexInterval.exp_i(two_pi * (th * k)) - lam
            xr, xi = d.re.mid(), d.im.mid()
            er = max(d.re.hi_float() - xr, xr - d.re.lo_float())
            ei = max(d.im.hi_float() - xi, xi - d.im.lo_float())
            dre[k], dim[k] = xr, xi
            drad[k] = math.nextafter(math.hypot(er, ei), math.inf) * (1 + 2 ** -50) + 1e-300
    return dre, dim, drad


@dataclass
class LinearizerSeries:
    """Coefficients stored as balls c_k = b_k t^k with t = 2^scale_exp."""

    theta: object
    order: int
    scale_exp: int
    re: np.ndarray
    im: np.ndarray
    rad: np.ndarray
    divisors: tuple

    @property
    def t(self) -> float:
        return 2.0 ** self.scale_exp

    def coefficient(self, k: int) -> ComplexInterval:
        """Enclosure of b_k."""
        if not 1 <= k <= self.order:
            raise IndexError("coefficient index out of range")
        s = -self.scale_exp * k
        r = float(self.rad[k])
        with precision(64):
            re = Interval(float(self.re[k]) - r, float(self.re[k]) + r) if r else Interval(float(self.re[k]))
            im = Interval(float(self.im[k]) - r, float(self.im[k]) + r) if r else Interval(float(self.im[k]))
            # float subtraction above is not directed; widen by one ulp each side
            re = Interval(math.nextafter(re.lo_float(), -math.inf), math.nextafter(re.hi_float(), math.inf))
            im = Interval(math.nextafter(im.lo_float(), -math.inf), math.nextafter(im.hi_float(), math.inf))
            return ComplexInterval(re.scale2(s), im.scale2(s))

    def log_abs(self) -> np.ndarray:
        """log|b_k| for k = 1..order (index 0 unused)."""
        with np.errstate(divide="ignore"):
            out = np.log(np.hypot(self.re, self.im)) - np.arange(self.order + 1) * self.scale_exp * math.log(2)
        out[0] = np.nan
        return out

    def root_estimates(self) -> np.ndarray:
        """1/|b_k|^(1/k) for k = 1..order (index 0 unused)."""
        k = np.arange(self.order + 1, dtype=float)
        k[0] = 1
        with np.errstate(invalid="ignore"):
            est = np.exp(-self.log_abs() / k)
        est[0] = np.nan
        return est

    def residuals_contain_zero(self) -> np.ndarray:
        """Per k: does (lambda^k - lambda) c_k - sum c_i c_{k-i} contain 0 as a ball?"""
        u = 2.0 ** -53
        dre, dim, drad = self.divisors
        ok = np.ones(self.order + 1, dtype=bool)
        cre, cim, crad = self.re, self.im, self.rad
        for k in range(2, self.order + 1):
            ar, ai, ap = cre[1:k], cim[1:k], crad[1:k]
            br, bi, bp = cre[k - 1:0:-1], cim[k - 1:0:-1], crad[k - 1:0:-1]
            sr = np.sum(ar * br - ai * bi)
            si = np.sum(ar * bi + ai * br)
            am, bm = np.hypot(ar, ai), np.hypot(br, bi)
            srad = np.sum(am * bp + bm * ap + ap * bp) + (k + 8) * 4 * u * np.sum(am * bm)
            pr = dre[k] * cre[k] - dim[k] * cim[k]
            pi = dre[k] * cim[k] + dim[k] * cre[k]
            dm, cm = math.hypot(dre[k], dim[k]), math.hypot(cre[k], cim[k])
            prad = dm * crad[k] + cm * drad[k] + drad[k] * crad[k] + 8 * u * dm * cm
            gap = math.hypot(pr - sr, pi - si)
            ok[k] = gap <= (srad + prad) * (1 + 64 * u) + 1e-300
        return ok


def _run_series(theta, n, scale_exp, div, backend=None):
    be = kernels.get_backend(backend) if backend else kernels.get_backend(kernels.BACKEND)
    dre, dim, drad = div
    return be.linearizer_series(np.ascontiguousarray(dre[: n + 1]), np.ascontiguousarray(dim[: n + 1]),
                                np.ascontiguousarray(drad[: n + 1]), 2.0 ** scale_exp, n)


def linearizer_coeffs(theta, n: int, backend: Optional[str] = None) -> LinearizerSeries:
    """Ball enclosures of b_1..b_n.

    A short pilot run picks a power-of-two scale t near the radius of
    convergence, so the stored c_k = b_k t^k stay in floating-point range;
    scaling by a power of two is exact.
    """
    if n < 1:
        raise ValueError("order must be at least 1")
    bits = 64 + max(n, 2).bit_length() + 32
    div = _divisors(theta, n, bits)
    pilot = min(n, 48)
    scale = 0
    for _ in range(8):
        re, im, rad, failed = _run_series(theta, pilot, scale, div, backend)
        if failed:
            raise SmallDivisorError(f"divisor at k={failed} not separated from zero")
        mags = np.hypot(re[1:], im[1:])
        ks = np.arange(1, pilot + 1)
        good = mags > 0
        if not good.any():
            break
        est = np.median(np.log2(mags[good]) / ks[good])
        shift = -int(round(est))
        if shift == 0:
            break
        scale += shift
    for _ in range(16):
        re, im, rad, failed = _run_series(theta, n, scale, div, backend)
        if not failed:
            break
        mags = np.hypot(re[1:failed], im[1:failed])
        if np.isfinite(mags).all() and drad_ok(div, failed):
            # finite coefficients but no overflow: genuine small divisor
            raise SmallDivisorError(f"divisor at k={failed} not separated from zero")
        scale -= 1
    else:
        raise SmallDivisorError("could not find a stable scale for the series")
    return LinearizerSeries(theta, n, scale, re, im, rad, div)


def drad_ok(div, k) -> bool:
    dre, dim, drad = div
    return math.hypot(dre[k], dim[k]) * (1 - 2 ** -50) <= drad[k]


@dataclass(frozen=True)
class RadiusEstimate:
    point_estimate: float
    window_estimates: list
    oscillation: float
    rigorous: bool
    order: int


def conformal_radius(theta, n: int = 256, backend: Optional[str] = None,
                     series: Optional[LinearizerSeries] = None) -> RadiusEstimate:
    """Median of 1/|b_k|^(1/k) over the top quartile of orders (not rigorous)."""
    s = series or linearizer_coeffs(theta, n, backend)
    est = s.root_estimates()
    start = max(1, n - n // 4 + 1)
    ks = [k for k in range(start, n + 1) if np.isfinite(est[k]) and est[k] > 0]
    if not ks:
        raise ArithmeticError("no usable coefficients in the top quartile")
    window = [(k, float(est[k])) for k in ks]
    vals = np.array([v for _, v in window])
    med = float(np.median(vals))
    osc = float((vals.max() - vals.min()) / med)
    return RadiusEstimate(med, window, osc, False, n)


def running_estimates(series: LinearizerSeries) -> list:
    """Rows (k, |b_k|^(1/k), running top-quartile median up to k)."""
    est = series.root_estimates()
    rows = []
    for k in range(1, series.order + 1):
        start = max(1, k - k // 4)
        window = est[start:k + 1]
        window = window[np.isfinite(window)]
        run = float(np.median(window)) if window.size else float("nan")
        root = 1.0 / est[k] if est[k] else float("inf")
        rows.append((k, float(root), run))
    return rows


@dataclass(frozen=True)
class UpsilonEstimate:
    value: float
    phi: Interval
    radius: RadiusEstimate


def upsilon_estimate(theta: ContinuedFraction, n: int = 256, shift: int = 0,
                     backend: Optional[str] = None) -> UpsilonEstimate:
    """phi(theta) (interval midpoint) + log r_hat(theta + shift).

    ``shift`` adds an integer to theta; lambda is unchanged and phi is
    1-periodic, so the estimate is too.
    """
    if not isinstance(theta, ContinuedFraction) or theta.tail is not Tail.ALL_ONES:
        raise ValueError("theta must be a continued fraction with an all-ones tail")
    ph = phi(theta, 60)
    if shift:
        with precision(64 + max(n, 2).bit_length() + 32):
            th = value(theta, 64 + max(n, 2).bit_length() + 32) + shift
        rad = conformal_radius(th, n, backend)
    else:
        rad = conformal_radius(theta, n, backend)
    return UpsilonEstimate(ph.mid() + math.log(rad.point_estimate), ph, rad)


@dataclass(frozen=True)
class KoebeReport:
    radius: float
    samples: int
    escaped: int
    maxiter: int
    rigorous: bool = False

    @property
    def passed(self) -> bool:
        return self.escaped == 0


def koebe_check(theta, r_hat: float, samples: int = 64, maxiter: int = 2000) -> KoebeReport:
    """Sample the circle of radius r_hat/4 and iterate P; count escaping orbits."""
    th = _theta_interval(theta, 64).mid()
    lam = complex(math.cos(2 * math.pi * th), math.sin(2 * math.pi * th))
    rho = r_hat / 4
    escaped = 0
    for j in range(samples):
        z = rho * complex(math.cos(2 * math.pi * j / samples), math.sin(2 * math.pi * j / samples))
        for _ in range(maxiter):
            z = lam * z + z * z
            if abs(z) > 2:
                escaped += 1
                break
    return KoebeReport(rho, samples, escaped, maxiter)


# ---------------------------------------------------------------------------
# conformal radius of test domains


@dataclass(frozen=True)
class Disk:
    radius: Fraction = Fraction(1)


@dataclass(frozen=True)
class SlitDisk:
    """Disk of the given radius; the inner domain removes the radial slit [R - eps, R]."""
    radius: Fraction = Fraction(1)


@dataclass(frozen=True)
class Ellipse:
    a: Fraction = Fraction(2)
    b: Fraction = Fraction(1)


@dataclass(frozen=True)
class RadiusDropReport:
    domain: str
    epsilon: Fraction
    r_outer: Interval
    r_inner: Interval
    difference: Interval
    bound: Interval
    holds: bool


def radius_drop_bound(outer, epsilon) -> RadiusDropReport:
    """Check 0 < r(U,0) - r(V,0) <= 4 sqrt(r(U,0)) sqrt(eps) for V an eps-shrinking of U.

    Disk of radius R: V is the concentric disk of radius R - eps.
    Slit disk: V is the disk minus the slit [R - eps, R]; with a = 1 - eps/R
    its conformal radius at 0 is R * 4a / (1 + a)^2.
    """
    eps = Fraction(epsilon)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    with precision(96):
        if isinstance(outer, Disk):
            R = Fraction(outer.radius)
            if eps >= R:
                raise ValueError("epsilon must be smaller than the radius")
            rU, rV, name = Interval(R), Interval(R - eps), "disk"
        elif isinstance(outer, SlitDisk):
            R = Fraction(outer.radius)
            if eps >= R:
                raise ValueError("epsilon must be smaller than the radius")
            a = 1 - eps / R
            rU = Interval(R)
            rV = Interval(R * 4 * a / (1 + a) ** 2)
            name = "slit-disk"
        elif isinstance(outer, Ellipse):
            raise NotImplementedError("ellipse domains are not supported (no closed-form radius used)")
        else:
            raise TypeError("unknown domain")
        diff = rU - rV
        bound = rU.sqrt() * Interval(eps).sqrt() * 4
        holds = diff.positive() and diff.le(bound)
    return RadiusDropReport(name, eps, rU, rV, diff, bound, holds)
