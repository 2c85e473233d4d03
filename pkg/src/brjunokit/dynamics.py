"""Quadratic maps in the two normal forms.

P(z) = lambda z + z^2 with lambda = e^{2 pi i theta}, and f(z) = z^2 + c.  The
affine change w = z + lambda/2 conjugates them when c = lambda/2 - lambda^2/4;
the fixed point lambda/2 of f then has multiplier exactly lambda.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import gmpy2

from .brjuno import phi_trunc
from .intervals import ComplexInterval, Interval, precision, working_precision

ORDER_CAP = 1024


class OrderTooLarge(ValueError):
    """The requested composition order exceeds the configured cap."""


class CycleCheckFailed(ValueError):
    """The supplied orbit does not close up within the tolerance."""


class AZeroError(ArithmeticError):
    """The enclosure of the leading iterate coefficient contains zero."""


def _as_complex_interval(z) -> ComplexInterval:
    if isinstance(z, ComplexInterval):
        return z
    if isinstance(z, complex):
        return ComplexInterval(Interval(z.real), Interval(z.imag))
    return ComplexInterval.coerce(z)


def unit_multiplier(theta) -> ComplexInterval:
    """Enclosure of e^{2 pi i theta} for a rational, float or Interval theta."""
    if isinstance(theta, float):
        theta = Interval(theta)
    return ComplexInterval.unit_root(theta)


def theta_to_c(theta) -> ComplexInterval:
    """c = lambda/2 - lambda^2/4 with lambda = e^{2 pi i theta}."""
    lam = unit_multiplier(theta)
    return lam * Fraction(1, 2) - lam.square() * Fraction(1, 4)


def _csqrt(w: ComplexInterval) -> ComplexInterval:
    """One square root of w (principal branch at the midpoint), rigorously enclosed.

    With s0 the floating midpoint root and e = w - s0^2, the true root nearest
    s0 is s0 + d with d^2 + 2 s0 d = e, so |d| <= sqrt|e| always and
    |d| <= |e| / (1.5 |s0|) when |e| <= |s0|^2 / 4.
    """
    import mpmath

    wp = working_precision() + 16
    with mpmath.workprec(wp):
        s = mpmath.sqrt(mpmath.mpc(mpmath.mpf(w.re.lo) + mpmath.mpf(w.re.hi),
                                   mpmath.mpf(w.im.lo) + mpmath.mpf(w.im.hi)) / 2)
    s0 = ComplexInterval(Interval(s.real._mpf_), Interval(s.imag._mpf_))
    e = abs(w - s0.square())
    rad = e.sqrt()
    s_abs = abs(s0)
    if (e.scale2(2)).lt(s_abs.square()) and s_abs.positive():
        rad2 = e / (s_abs * Fraction(3, 2))
        if rad2.hi_float() < rad.hi_float():
            rad = rad2
    r = Interval._raw((-rad).lo, rad.hi)
    return ComplexInterval(s0.re + r, s0.im + r)


def c_to_multipliers(c) -> tuple:
    """Multipliers 1 + s and 1 - s (s^2 = 1 - 4c) of the two fixed points of z^2 + c."""
    c = _as_complex_interval(c)
    s = _csqrt(1 - c * 4)
    return 1 + s, 1 - s


# ---------------------------------------------------------------------------
# quadratic maps


class FormKind(enum.Enum):
    THETA = "theta"
    C = "c"


@dataclass(frozen=True)
class QuadraticMap:
    """P(z) = lambda z + z^2 (theta form) or f(z) = z^2 + c (c form)."""

    kind: FormKind
    theta: object = None
    c_value: object = None

    @classmethod
    def from_theta(cls, theta) -> "QuadraticMap":
        return cls(FormKind.THETA, theta=theta)

    @classmethod
    def from_c(cls, c) -> "QuadraticMap":
        return cls(FormKind.C, c_value=c)

    @property
    def lam(self) -> ComplexInterval:
        if self.kind is not FormKind.THETA:
            raise ValueError("lambda is defined for the theta form")
        return unit_multiplier(self.theta)

    @property
    def c(self) -> ComplexInterval:
        if self.kind is FormKind.C:
            return _as_complex_interval(self.c_value)
        return theta_to_c(self.theta)

    def to_c_form(self) -> "QuadraticMap":
        return self if self.kind is FormKind.C else QuadraticMap.from_c(theta_to_c(self.theta))

    def __call__(self, z):
        z = _exact_or_interval(z)
        if self.kind is FormKind.C:
            cv = self.c_value
            if isinstance(z, _GaussRational) and isinstance(cv, (int, Fraction)):
                return z * z + _GaussRational(Fraction(cv))
            return _as_complex_interval(z).square() + self.c
        zi = _as_complex_interval(z)
        return self.lam * zi + zi.square()

    def derivative(self, z):
        z = _exact_or_interval(z)
        if self.kind is FormKind.C:
            if isinstance(z, _GaussRational):
                return z * 2
            return _as_complex_interval(z) * 2
        return self.lam + _as_complex_interval(z) * 2


@dataclass(frozen=True)
class _GaussRational:
    re: Fraction
    im: Fraction = Fraction(0)

    def __add__(self, o):
        return _GaussRational(self.re + o.re, self.im + o.im)

    def __sub__(self, o):
        return _GaussRational(self.re - o.re, self.im - o.im)

    def __mul__(self, o):
        if isinstance(o, (int, Fraction)):
            return _GaussRational(self.re * o, self.im * o)
        return _GaussRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def to_interval(self) -> ComplexInterval:
        return ComplexInterval(Interval(self.re), Interval(self.im))

    def size(self) -> int:
        return max(self.re.denominator.bit_length(), self.im.denominator.bit_length(),
                   abs(self.re.numerator).bit_length(), abs(self.im.numerator).bit_length())


def _exact_or_interval(z):
    if isinstance(z, (int, Fraction)):
        return _GaussRational(Fraction(z))
    return z


# ---------------------------------------------------------------------------
# truncated power series


class TruncatedPolynomial:
    """Complex-enclosure coefficients a_0..a_order of a power series truncated at ``order``."""

    def __init__(self, coefficients: Sequence, order: Optional[int] = None):
        coeffs = [_as_complex_interval(a) for a in coefficients]
        self.order = len(coeffs) - 1 if order is None else order
        zero = ComplexInterval(0, 0)
        coeffs = coeffs[: self.order + 1]
        coeffs += [zero] * (self.order + 1 - len(coeffs))
        self.coefficients = coeffs

    def __getitem__(self, k):
        return self.coefficients[k]

    def __add__(self, other):
        return TruncatedPolynomial([a + b for a, b in zip(self.coefficients, other.coefficients)],
                                   min(self.order, other.order))

    def __mul__(self, other):
        if not isinstance(other, TruncatedPolynomial):
            return TruncatedPolynomial([a * other for a in self.coefficients], self.order)
        n = min(self.order, other.order)
        out = []
        for k in range(n + 1):
            s = ComplexInterval(0, 0)
            for i in range(k + 1):
                s = s + self.coefficients[i] * other.coefficients[k - i]
            out.append(s)
        return TruncatedPolynomial(out, n)

    def compose(self, inner: "TruncatedPolynomial") -> "TruncatedPolynomial":
        """self(inner(z)) truncated at the common order; inner must have no constant term."""
        if not inner.coefficients[0].contains_zero() or not inner.coefficients[0].contains(0):
            raise ValueError("inner series must vanish at 0")
        n = min(self.order, inner.order)
        result = TruncatedPolynomial([self.coefficients[n]], n)
        for k in range(n - 1, -1, -1):
            result = result * inner
            result.coefficients[0] = result.coefficients[0] + self.coefficients[k]
        return result

    def evaluate(self, z: complex) -> complex:
        acc = 0j
        for a in reversed(self.coefficients):
            acc = acc * z + a.mid()
        return acc


def quadratic_series(theta, order: int) -> TruncatedPolynomial:
    """P(z) = lambda z + z^2 as a truncated series."""
    lam = unit_multiplier(theta)
    return TruncatedPolynomial([0, lam, 1], order)


# fixed-point Gaussian-integer balls: value (x + i y + d) / 2^W with |d| <= r


def _pack(coeffs, F, offset, count):
    width = F // 8
    return int.from_bytes(b"".join((c + offset).to_bytes(width, "little") for c in coeffs), "little") \
        - _offset_const(offset, F, len(coeffs))


_OFFSET_CACHE: dict = {}


def _offset_const(offset, F, count):
    key = (offset, F, count)
    v = _OFFSET_CACHE.get(key)
    if v is None:
        width = F // 8
        v = int.from_bytes(offset.to_bytes(width, "little") * count, "little")
        if len(_OFFSET_CACHE) > 64:
            _OFFSET_CACHE.clear()
        _OFFSET_CACHE[key] = v
    return v


def _polymul(a, b, n):
    """First n coefficients of the product of integer polynomials (Kronecker substitution)."""
    ma = max((abs(x) for x in a), default=0)
    mb = max((abs(x) for x in b), default=0)
    if ma == 0 or mb == 0:
        return [0] * n
    bits = ma.bit_length() + mb.bit_length() + max(len(a), len(b)).bit_length() + 2
    F = ((bits + 7) // 8) * 8
    offset = 1 << (F - 1)
    x = int(gmpy2.mpz(_pack(a, F, offset, len(a))) * gmpy2.mpz(_pack(b, F, offset, len(b))))
    count = len(a) + len(b) - 1
    x += _offset_const(offset, F, count)
    width = F // 8
    raw = x.to_bytes(width * count + width, "little")
    out = []
    for k in range(min(n, count)):
        out.append(int.from_bytes(raw[k * width:(k + 1) * width], "little") - offset)
    out += [0] * (n - len(out))
    return out


@dataclass
class _BallSeries:
    W: int
    x: list
    y: list
    r: list


def _ball_step(g: _BallSeries, lam, n) -> _BallSeries:
    """lambda g + g^2 truncated to n coefficients."""
    W = g.W
    lx, ly, lr = lam
    xx = _polymul(g.x, g.x, n)
    yy = _polymul(g.y, g.y, n)
    xy = _polymul(g.x, g.y, n)
    mag = [abs(a) + abs(b) for a, b in zip(g.x, g.y)]
    # (Z + d)^2 - Z^2 = 2 Z d + d^2
    err = _polymul(mag, g.r, n)
    rr = _polymul(g.r, g.r, n)
    lam_mag = abs(lx) + abs(ly) + lr
    nx, ny, nr = [], [], []
    for k in range(n):
        sx = xx[k] - yy[k] + lx * g.x[k] - ly * g.y[k]
        sy = 2 * xy[k] + lx * g.y[k] + ly * g.x[k]
        # errors in units of 2^-2W before the shift
        e = 2 * err[k] + rr[k] + lam_mag * g.r[k] + lr * mag[k]
        nx.append(sx >> W)
        ny.append(sy >> W)
        nr.append((e >> W) + 3)
    return _BallSeries(W, nx, ny, nr)


def _lambda_fixed(theta, W):
    with precision(W + 32):
        lam = unit_multiplier(theta)
        scale = 1 << W
        lo_x = int(math.floor(lam.re.lower() * scale))
        hi_x = int(math.ceil(lam.re.upper() * scale))
        lo_y = int(math.floor(lam.im.lower() * scale))
        hi_y = int(math.ceil(lam.im.upper() * scale))
    cx, cy = (lo_x + hi_x) // 2, (lo_y + hi_y) // 2
    r = max(hi_x - cx, cx - lo_x) + max(hi_y - cy, cy - lo_y) + 1
    return cx, cy, r


def _ball_to_interval(x, y, r, W) -> ComplexInterval:
    d = 1 << W
    x, y, r = int(x), int(y), int(r)
    return ComplexInterval(Interval(Fraction(x - r, d), Fraction(x + r, d)),
                           Interval(Fraction(y - r, d), Fraction(y + r, d)))


@dataclass(frozen=True)
class IterateCoefficients:
    p: int
    q: int
    linear: ComplexInterval
    A: ComplexInterval
    bits: int
    series: TruncatedPolynomial


def iterate_taylor(theta, order_cap: int = ORDER_CAP) -> IterateCoefficients:
    """q-fold composition of P at order q+1 for theta = p/q.

    Coefficients are fixed-point Gaussian integers with explicit error radii;
    the fixed-point scale is doubled until A is known to 2^-60 relative.
    """
    t = Fraction(theta)
    p, q = t.numerator, t.denominator
    if q < 1:
        raise ValueError("theta must be a rational p/q with q >= 1")
    if q > order_cap:
        raise OrderTooLarge(f"q = {q} exceeds the order cap {order_cap}")
    n = q + 2
    W = 128 + 2 * q
    while True:
        lam = _lambda_fixed(t, W)
        one = 1 << W
        g = _BallSeries(W, [0, one] + [0] * (n - 2), [0] * n, [0] * n)
        for _ in range(q):
            g = _ball_step(g, lam, n)
        ax, ay, ar = g.x[q + 1], g.y[q + 1], g.r[q + 1]
        mag = abs(ax) + abs(ay)
        if ar * (1 << 60) <= mag or W > 64 * (q + 64):
            break
        W *= 2
    coeffs = [_ball_to_interval(g.x[k], g.y[k], g.r[k], W) for k in range(n)]
    return IterateCoefficients(p, q, coeffs[1], coeffs[q + 1], W, TruncatedPolynomial(coeffs, q + 1))


def iterate_taylor_A(theta, order_cap: int = ORDER_CAP) -> ComplexInterval:
    """Coefficient A in P^q(z) = z + A z^{q+1} + ... for theta = p/q."""
    return iterate_taylor(theta, order_cap).A


# ---------------------------------------------------------------------------
# explicit rational values


@dataclass(frozen=True)
class UpsilonRecord:
    p: int
    q: int
    phi_trunc: Interval
    abs_A: Interval
    L: Interval
    upsilon: Interval
    convention_dependent: bool


def upsilon_rational_record(theta, k: int = 60) -> UpsilonRecord:
    """phi_trunc(p/q) + log L + log(2 pi)/q with L = (1/(q |A|))^{1/q}.

    At theta = 1 the truncated sum depends on the chosen expansion; the value
    uses the canonical [1] and is flagged.
    """
    t = Fraction(theta)
    if not 0 < t <= 1:
        raise ValueError("need 0 < p/q <= 1")
    p, q = t.numerator, t.denominator
    co = iterate_taylor(t)
    with precision(k + 40):
        A = co.A
        if A.contains_zero():
            raise AZeroError(f"A enclosure contains 0 at theta = {t}")
        absA = abs(A)
        pt = phi_trunc(t, k + 8)
        logL = -((Interval(q).log() + absA.log()) / q)
        L = logL.exp()
        ups = pt + logL + (Interval.pi().scale2(1)).log() / q
    return UpsilonRecord(p, q, pt, absA, L, ups, t == 1)


def upsilon_rational(theta, k: int = 60) -> Interval:
    return upsilon_rational_record(theta, k).upsilon


# ---------------------------------------------------------------------------
# multipliers and connectivity


@dataclass(frozen=True)
class MultiplierResult:
    value: ComplexInterval
    modulus: Interval
    kind: str


def multiplier(qmap: QuadraticMap, orbit: Sequence, tolerance=Fraction(1, 10 ** 9)) -> MultiplierResult:
    """Product of derivatives along a cycle, after checking that the orbit closes up."""
    if not orbit:
        raise CycleCheckFailed("empty orbit")
    pts = [_exact_or_interval(z) for z in orbit]
    tol = Interval(tolerance) if not isinstance(tolerance, float) else Interval(tolerance)
    for i, z in enumerate(pts):
        image = qmap(z)
        nxt = pts[(i + 1) % len(pts)]
        if isinstance(image, _GaussRational) and isinstance(nxt, _GaussRational):
            gap2 = Interval((image - nxt).abs2())
        else:
            a = image.to_interval() if isinstance(image, _GaussRational) else _as_complex_interval(image)
            b = nxt.to_interval() if isinstance(nxt, _GaussRational) else _as_complex_interval(nxt)
            gap2 = (a - b).abs2()
        if not gap2.le(tol.square()):
            raise CycleCheckFailed(f"orbit point {i} does not map to the next within tolerance")
    lam = ComplexInterval(1, 0)
    for z in pts:
        d = qmap.derivative(z)
        d = d.to_interval() if isinstance(d, _GaussRational) else d
        lam = lam * d
    mod = abs(lam)
    if mod.lt(1):
        kind = "attracting"
    elif mod.gt(1):
        kind = "repelling"
    elif mod.is_point and mod.contains(1):
        kind = "indifferent"
    else:
        kind = "undecided"
    return MultiplierResult(lam, mod, kind)


class Connectivity(enum.Enum):
    CONNECTED = "connected"
    CANTOR = "cantor"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class ConnectivityResult:
    verdict: Connectivity
    escape_index: Optional[int] = None
    certificate: str = ""


def _float_cycle(c: complex, maxiter: int):
    z = 0j
    for _ in range(min(maxiter, 5000)):
        z = z * z + c
        if abs(z) > 4:
            return None
    for p in range(1, 65):
        w = z
        for _ in range(p):
            w = w * w + c
        if abs(w - z) < 1e-12:
            # Newton polish of the p-cycle point
            for _ in range(50):
                w, d = z, 1 + 0j
                for _ in range(p):
                    d = 2 * w * d
                    w = w * w + c
                if d == 1:
                    break
                step = (w - z) / (d - 1)
                z -= step
                if abs(step) < 1e-15:
                    break
            return z, p
    return None


def _trap_radius(c: ComplexInterval, z0: complex, p: int) -> Optional[float]:
    """Radius r with f^p(D(z0, r)) inside D(z0, r), or None.

    By the mean value inequality on the convex disk,
    |f^p(z) - z0| <= |f^p(z0) - z0| + r sup_D |(f^p)'|, and the supremum is
    bounded by the product of 2|f^j(D)| over interval enclosures of f^j(D).
    """
    center = ComplexInterval(Interval(z0.real), Interval(z0.imag))
    image = center
    for _ in range(p):
        image = image.square() + c
    drift = abs(image - center)
    r = 0.5
    while r > 1e-9:
        rad = Interval(r)
        box = ComplexInterval(center.re + Interval(-r, r), center.im + Interval(-r, r))
        M = Interval(1)
        for _ in range(p):
            M = M * abs(box).scale2(1)
            box = box.square() + c
        if (drift + rad * M).lt(rad):
            return r
        r /= 2
    return None


def _enters_disk(c: ComplexInterval, z0: complex, r: float, maxiter: int) -> Optional[int]:
    """First step at which the critical orbit enclosure lies inside D(z0, r)."""
    center = ComplexInterval(Interval(z0.real), Interval(z0.imag))
    rad = Interval(r)
    z = ComplexInterval(0, 0)
    for j in range(maxiter):
        spread = Interval(z.re.width_float() + z.im.width_float())
        if (abs(z - center) + spread).lt(rad):
            return j
        z = z.square() + c
    return None


def classify_connectivity(c, maxiter: int = 1000, escape_radius=None) -> ConnectivityResult:
    """Connected / Cantor / Undecided for the Julia set of z^2 + c."""
    exact = None
    if isinstance(c, (int, Fraction)):
        exact = _GaussRational(Fraction(c))
    elif isinstance(c, tuple) and all(isinstance(v, (int, Fraction)) for v in c):
        exact = _GaussRational(Fraction(c[0]), Fraction(c[1]))
    ci = _as_complex_interval(c)
    with precision(max(working_precision(), 64)):
        cabs = abs(ci)
        min_r = Interval.hull(cabs, Interval(2)).hi
        floor = Interval._raw(min_r, min_r) + 1
        if escape_radius is None:
            R = floor
        else:
            R = Interval(escape_radius) if not isinstance(escape_radius, float) else Interval(escape_radius)
            if R.lt(floor):
                raise ValueError("escape_radius must be at least max(2, |c|) + 1")
        # exact orbit of the critical point: a repeat means a bounded orbit
        if exact is not None:
            seen = {}
            z = _GaussRational(Fraction(0))
            for j in range(64):
                key = (z.re, z.im)
                if key in seen:
                    return ConnectivityResult(Connectivity.CONNECTED, None,
                                              f"critical orbit is preperiodic (step {seen[key]} recurs at {j})")
                seen[key] = j
                if Interval(z.abs2()).gt(R.square()):
                    return ConnectivityResult(Connectivity.CANTOR, j, "critical orbit escapes (exact)")
                if z.size() > 4096:
                    break
                z = z * z + exact
        z = ComplexInterval(0, 0)
        R2 = R.square()
        for j in range(maxiter + 1):
            a2 = z.abs2()
            if a2.gt(R2):
                return ConnectivityResult(Connectivity.CANTOR, j, "critical orbit escapes")
            if z.radius_float() > 1e3:
                break
            z = z.square() + ci
        cyc = _float_cycle(ci.mid(), maxiter)
        if cyc is not None:
            z0, p = cyc
            r = _trap_radius(ci, z0, p)
            if r is not None:
                j = _enters_disk(ci, z0, r, maxiter)
                if j is not None:
                    return ConnectivityResult(
                        Connectivity.CONNECTED, None,
                        f"critical orbit enters a disk of radius {r} mapped into itself by f^{p} at step {j}")
    return ConnectivityResult(Connectivity.UNDECIDED, None, "no certificate within maxiter")
