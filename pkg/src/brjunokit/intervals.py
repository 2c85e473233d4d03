"""Outward-rounded interval arithmetic with dyadic endpoints.

Endpoints are raw mpmath ``mpf`` tuples (sign, mantissa, exponent, bitcount),
so every endpoint is exactly ``mantissa * 2**exponent``.  Basic operations use
mpmath's correctly rounded primitives with directed rounding.  Elementary
functions are evaluated with extra guard bits and then widened by a margin far
larger than mpmath's documented accuracy.

Working precision (in bits) lives in a context variable, so threads and nested
computations do not interfere with each other.
"""

from __future__ import annotations

import contextvars
import decimal
from contextlib import contextmanager
from fractions import Fraction
from typing import Union

from mpmath.libmp import (
    finf,
    fninf,
    fone,
    from_float,
    from_int,
    from_man_exp,
    from_rational,
    fzero,
    mpf_abs,
    mpf_add,
    mpf_cos_sin,
    mpf_div,
    mpf_exp,
    mpf_ge,
    mpf_gt,
    mpf_le,
    mpf_log,
    mpf_lt,
    mpf_mul,
    mpf_neg,
    mpf_pi,
    mpf_shift,
    mpf_sqrt,
    mpf_sub,
    round_ceiling,
    round_floor,
    round_nearest,
    to_float,
    to_rational,
)

_PREC = contextvars.ContextVar("brjunokit_precision", default=96)

# guard bits for transcendental evaluation and the widening margin below them
_GUARD = 24
_MARGIN = 10


def working_precision() -> int:
    return _PREC.get()


@contextmanager
def precision(bits: int):
    """Temporarily set the working precision (in bits)."""
    if bits < 8:
        raise ValueError("precision must be at least 8 bits")
    token = _PREC.set(int(bits))
    try:
        yield
    finally:
        _PREC.reset(token)


Number = Union[int, Fraction, float, "Interval"]


def _exact_pair(x, prec):
    if isinstance(x, Interval):
        return x.lo, x.hi
    if isinstance(x, bool):
        x = int(x)
    if isinstance(x, int):
        v = from_int(x)
        return v, v
    if isinstance(x, Fraction):
        p, q = x.numerator, x.denominator
        if q & (q - 1) == 0:
            v = from_man_exp(p, -(q.bit_length() - 1))
            return v, v
        return from_rational(p, q, prec, round_floor), from_rational(p, q, prec, round_ceiling)
    if isinstance(x, float):
        if x != x or x in (float("inf"), float("-inf")):
            raise ValueError("cannot enclose non-finite float")
        v = from_float(x)
        return v, v
    if isinstance(x, tuple) and len(x) == 4:
        return x, x
    raise TypeError(f"cannot convert {type(x).__name__} to Interval")


def _min(*vals):
    best = vals[0]
    for v in vals[1:]:
        if mpf_lt(v, best):
            best = v
    return best


def _max(*vals):
    best = vals[0]
    for v in vals[1:]:
        if mpf_gt(v, best):
            best = v
    return best


def _widen(v, wp, prec, absolute=None):
    """Enclose a value computed at ``wp`` bits by a round-to-nearest routine."""
    err = mpf_shift(mpf_abs(v), -(wp - _MARGIN))
    if absolute is not None:
        err = mpf_add(err, absolute, prec, round_ceiling)
    return mpf_sub(v, err, prec, round_floor), mpf_add(v, err, prec, round_ceiling)


class Interval:
    """Closed interval [lo, hi] with dyadic endpoints."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi=None):
        prec = _PREC.get()
        a, b = _exact_pair(lo, prec)
        if hi is None:
            self.lo, self.hi = a, b
        else:
            c, d = _exact_pair(hi, prec)
            self.lo, self.hi = a, d
        if mpf_gt(self.lo, self.hi):
            raise ValueError("interval with lo > hi")

    @classmethod
    def _raw(cls, lo, hi):
        obj = cls.__new__(cls)
        obj.lo = lo
        obj.hi = hi
        return obj

    # ---- construction helpers -------------------------------------------
    @classmethod
    def hull(cls, *items) -> "Interval":
        prec = _PREC.get()
        pairs = [_exact_pair(x, prec) for x in items]
        return cls._raw(_min(*[p[0] for p in pairs]), _max(*[p[1] for p in pairs]))

    @classmethod
    def pi(cls) -> "Interval":
        prec = _PREC.get()
        wp = prec + _GUARD
        return cls._raw(*_widen(mpf_pi(wp, round_nearest), wp, prec))

    @classmethod
    def sqrt5(cls) -> "Interval":
        return cls(5).sqrt()

    # ---- inspection ----------------------------------------------------------
    def lower(self) -> Fraction:
        return Fraction(*to_rational(self.lo))

    def upper(self) -> Fraction:
        return Fraction(*to_rational(self.hi))

    def lo_float(self) -> float:
        return to_float(self.lo, rnd=round_floor)

    def hi_float(self) -> float:
        return to_float(self.hi, rnd=round_ceiling)

    def mid(self) -> float:
        return to_float(mpf_shift(mpf_add(self.lo, self.hi), -1))

    def width(self) -> "Interval":
        prec = _PREC.get()
        return Interval._raw(mpf_sub(self.hi, self.lo, prec, round_floor),
                             mpf_sub(self.hi, self.lo, prec, round_ceiling))

    def width_float(self) -> float:
        return to_float(mpf_sub(self.hi, self.lo, 53, round_ceiling), rnd=round_ceiling)

    def is_point(self) -> bool:
        return self.lo == self.hi

    def contains(self, x) -> bool:
        a, b = _exact_pair(x, max(_PREC.get(), 256))
        return mpf_le(self.lo, a) and mpf_le(b, self.hi)

    def contains_zero(self) -> bool:
        return mpf_le(self.lo, fzero) and mpf_le(fzero, self.hi)

    def intersects(self, other) -> bool:
        a, b = _exact_pair(other, _PREC.get())
        return mpf_le(self.lo, b) and mpf_le(a, self.hi)

    def intersect(self, other) -> "Interval":
        a, b = _exact_pair(other, _PREC.get())
        lo, hi = _max(self.lo, a), _min(self.hi, b)
        if mpf_gt(lo, hi):
            raise ValueError("empty intersection")
        return Interval._raw(lo, hi)

    # certain comparisons: True only when decided for every pair of points
    def lt(self, other) -> bool:
        a, _ = _exact_pair(other, _PREC.get())
        return mpf_lt(self.hi, a)

    def gt(self, other) -> bool:
        _, b = _exact_pair(other, _PREC.get())
        return mpf_gt(self.lo, b)

    def le(self, other) -> bool:
        a, _ = _exact_pair(other, _PREC.get())
        return mpf_le(self.hi, a)

    def ge(self, other) -> bool:
        _, b = _exact_pair(other, _PREC.get())
        return mpf_ge(self.lo, b)

    def positive(self) -> bool:
        return mpf_gt(self.lo, fzero)

    def negative(self) -> bool:
        return mpf_lt(self.hi, fzero)

    # ---- arithmetic ---------------------------------------------------------
    def __add__(self, other):
        prec = _PREC.get()
        try:
            a, b = _exact_pair(other, prec)
        except TypeError:
            return NotImplemented
        return Interval._raw(mpf_add(self.lo, a, prec, round_floor),
                             mpf_add(self.hi, b, prec, round_ceiling))

    __radd__ = __add__

    def __sub__(self, other):
        prec = _PREC.get()
        try:
            a, b = _exact_pair(other, prec)
        except TypeError:
            return NotImplemented
        return Interval._raw(mpf_sub(self.lo, b, prec, round_floor),
                             mpf_sub(self.hi, a, prec, round_ceiling))

    def __rsub__(self, other):
        prec = _PREC.get()
        a, b = _exact_pair(other, prec)
        return Interval._raw(mpf_sub(a, self.hi, prec, round_floor),
                             mpf_sub(b, self.lo, prec, round_ceiling))

    def __neg__(self):
        return Interval._raw(mpf_neg(self.hi), mpf_neg(self.lo))

    def __pos__(self):
        return self

    def __mul__(self, other):
        prec = _PREC.get()
        try:
            c, d = _exact_pair(other, prec)
        except TypeError:
            return NotImplemented
        a, b = self.lo, self.hi
        zero = fzero
        if mpf_ge(a, zero) and mpf_ge(c, zero):
            return Interval._raw(mpf_mul(a, c, prec, round_floor), mpf_mul(b, d, prec, round_ceiling))
        if mpf_le(b, zero) and mpf_le(d, zero):
            return Interval._raw(mpf_mul(b, d, prec, round_floor), mpf_mul(a, c, prec, round_ceiling))
        los = [mpf_mul(x, y, prec, round_floor) for x in (a, b) for y in (c, d)]
        his = [mpf_mul(x, y, prec, round_ceiling) for x in (a, b) for y in (c, d)]
        return Interval._raw(_min(*los), _max(*his))

    __rmul__ = __mul__

    def __truediv__(self, other):
        prec = _PREC.get()
        try:
            c, d = _exact_pair(other, prec)
        except TypeError:
            return NotImplemented
        if mpf_le(c, fzero) and mpf_le(fzero, d):
            raise ZeroDivisionError("interval division by an interval containing 0")
        a, b = self.lo, self.hi
        los = [mpf_div(x, y, prec, round_floor) for x in (a, b) for y in (c, d)]
        his = [mpf_div(x, y, prec, round_ceiling) for x in (a, b) for y in (c, d)]
        return Interval._raw(_min(*los), _max(*his))

    def __rtruediv__(self, other):
        return Interval(other) / self

    def __pow__(self, n: int):
        if not isinstance(n, int) or n < 0:
            return NotImplemented
        if n == 0:
            return Interval(1)
        if n % 2 == 0:
            base = abs(self)
        else:
            base = self
        result = Interval(1)
        acc = base
        k = n
        while k:
            if k & 1:
                result = result * acc
            k >>= 1
            if k:
                acc = acc * acc if mpf_ge(acc.lo, fzero) else abs(acc) * abs(acc)
        return result

    def __abs__(self):
        if mpf_ge(self.lo, fzero):
            return self
        if mpf_le(self.hi, fzero):
            return -self
        return Interval._raw(fzero, _max(mpf_neg(self.lo), self.hi))

    def square(self) -> "Interval":
        return abs(self) * abs(self)

    def scale2(self, k: int) -> "Interval":
        """Exact multiplication by 2**k."""
        return Interval._raw(mpf_shift(self.lo, k), mpf_shift(self.hi, k))

    # ---- elementary functions ----------------------------------------------
    def sqrt(self) -> "Interval":
        if mpf_lt(self.lo, fzero):
            raise ValueError("sqrt of an interval with negative part")
        prec = _PREC.get()
        return Interval._raw(mpf_sqrt(self.lo, prec, round_floor), mpf_sqrt(self.hi, prec, round_ceiling))

    def log(self) -> "Interval":
        if not mpf_gt(self.lo, fzero):
            raise ValueError("log of an interval that is not strictly positive")
        prec = _PREC.get()
        wp = prec + _GUARD
        lo = _widen(mpf_log(self.lo, wp, round_nearest), wp, prec)[0] if self.lo != fone else fzero
        hi = _widen(mpf_log(self.hi, wp, round_nearest), wp, prec)[1] if self.hi != fone else fzero
        return Interval._raw(lo, hi)

    def exp(self) -> "Interval":
        prec = _PREC.get()
        wp = prec + _GUARD
        lo = _widen(mpf_exp(self.lo, wp, round_nearest), wp, prec)[0]
        hi = _widen(mpf_exp(self.hi, wp, round_nearest), wp, prec)[1]
        if mpf_lt(lo, fzero):
            lo = fzero
        return Interval._raw(lo, hi)

    def cos_sin(self) -> tuple["Interval", "Interval"]:
        """Enclosures of (cos x, sin x) using a midpoint plus Lipschitz bound."""
        prec = _PREC.get()
        wp = prec + _GUARD
        m = mpf_shift(mpf_add(self.lo, self.hi, wp, round_nearest), -1)
        rad = _max(mpf_sub(self.hi, m, wp, round_ceiling), mpf_sub(m, self.lo, wp, round_ceiling))
        c, s = mpf_cos_sin(m, wp, round_nearest)
        tiny = mpf_shift(fone, -wp)
        clo, chi = _widen(c, wp, prec, mpf_add(rad, tiny, prec, round_ceiling))
        slo, shi = _widen(s, wp, prec, mpf_add(rad, tiny, prec, round_ceiling))
        one, mone = fone, mpf_neg(fone)
        clo, chi = _max(clo, mone), _min(chi, one)
        slo, shi = _max(slo, mone), _min(shi, one)
        return Interval._raw(clo, chi), Interval._raw(slo, shi)

    # ---- misc ---------------------------------------------------------------
    def __repr__(self):
        return f"Interval({format_interval(self, 12)})"

    def __eq__(self, other):
        if not isinstance(other, Interval):
            return NotImplemented
        return self.lo == other.lo and self.hi == other.hi

    def __hash__(self):
        return hash((self.lo, self.hi))


def ln2() -> Interval:
    return Interval(2).log()


# ---------------------------------------------------------------------------
# output helpers


def _decimal_bound(v, digits: int, up: bool) -> decimal.Decimal:
    """Round an mpf to ``digits`` significant decimals, down or up."""
    if v == finf:
        return decimal.Decimal("Infinity")
    if v == fninf:
        return decimal.Decimal("-Infinity")
    sign, man, exp, bc = v
    if not man:
        return decimal.Decimal(0)
    man = int(man)
    if sign:
        man = -man
    # rough decimal exponent; the digit count is allowed to be off by one
    e10 = int((bc + exp - 1) * 0.30102999566398)
    k = digits - 1 - e10
    if exp >= 0:
        num = man << exp
        if k >= 0:
            scaled, exact = num * 10 ** k, True
        else:
            q, r = divmod(num, 10 ** (-k))
            scaled, exact = q, r == 0
    else:
        num = man * 10 ** k if k >= 0 else man
        den = 1 << (-exp)
        if k < 0:
            den *= 10 ** (-k)
        q, r = divmod(num, den)
        scaled, exact = q, r == 0
    if up and not exact:
        scaled += 1
    ctx = decimal.Context(prec=digits + 8)
    return decimal.Decimal(scaled).scaleb(-k, ctx)


def format_interval(iv: Interval, digits: int = 17) -> str:
    lo = _decimal_bound(iv.lo, digits, up=False)
    hi = _decimal_bound(iv.hi, digits, up=True)
    return f"[{lo}, {hi}]"


def dyadic_string(x) -> str:
    """Exact 'p/2^k' notation for a dyadic value (Fraction, int or mpf)."""
    if isinstance(x, tuple):
        p, q = to_rational(x)
        x = Fraction(p, q)
    x = Fraction(x)
    q = x.denominator
    if q & (q - 1):
        raise ValueError(f"{x} is not dyadic")
    return f"{x.numerator}/2^{q.bit_length() - 1}"


def parse_dyadic(text: str) -> Fraction:
    text = text.strip()
    if "/2^" not in text:
        return Fraction(int(text))
    p, k = text.split("/2^")
    k = int(k)
    if k < 0:
        raise ValueError("negative dyadic exponent")
    return Fraction(int(p), 1 << k)


# ---------------------------------------------------------------------------
# complex rectangles


class ComplexInterval:
    """Axis-aligned rectangle re + i*im of real intervals."""

    __slots__ = ("re", "im")

    def __init__(self, re, im=0):
        self.re = re if isinstance(re, Interval) else Interval(re)
        self.im = im if isinstance(im, Interval) else Interval(im)

    @classmethod
    def coerce(cls, z) -> "ComplexInterval":
        if isinstance(z, ComplexInterval):
            return z
        if isinstance(z, complex):
            return cls(z.real, z.imag)
        if isinstance(z, tuple) and len(z) == 2:
            return cls(z[0], z[1])
        return cls(z, 0)

    @classmethod
    def exp_i(cls, x) -> "ComplexInterval":
        """e^{i x} for a real interval x."""
        c, s = Interval(x).cos_sin() if not isinstance(x, Interval) else x.cos_sin()
        return cls(c, s)

    @classmethod
    def unit_root(cls, theta) -> "ComplexInterval":
        """e^{2 pi i theta}; exact for theta in (1/4) Z."""
        if isinstance(theta, (int, Fraction)):
            t = Fraction(theta) % 1
            exact = {Fraction(0): (1, 0), Fraction(1, 4): (0, 1),
                     Fraction(1, 2): (-1, 0), Fraction(3, 4): (0, -1)}
            if t in exact:
                return cls(*exact[t])
            theta = Interval(t)
        return cls.exp_i(Interval.pi().scale2(1) * theta)

    def __add__(self, other):
        o = ComplexInterval.coerce(other)
        return ComplexInterval(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = ComplexInterval.coerce(other)
        return ComplexInterval(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return ComplexInterval.coerce(other) - self

    def __neg__(self):
        return ComplexInterval(-self.re, -self.im)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, Interval, float)):
            return ComplexInterval(self.re * other, self.im * other)
        o = ComplexInterval.coerce(other)
        return ComplexInterval(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def square(self) -> "ComplexInterval":
        return ComplexInterval(self.re.square() - self.im.square(), (self.re * self.im).scale2(1))

    def abs2(self) -> Interval:
        return self.re.square() + self.im.square()

    def __abs__(self) -> Interval:
        return self.abs2().sqrt()

    def conj(self) -> "ComplexInterval":
        return ComplexInterval(self.re, -self.im)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, Interval, float)):
            return ComplexInterval(self.re / other, self.im / other)
        o = ComplexInterval.coerce(other)
        d = o.abs2()
        n = self * o.conj()
        return ComplexInterval(n.re / d, n.im / d)

    def __rtruediv__(self, other):
        return ComplexInterval.coerce(other) / self

    def __pow__(self, n: int):
        result = ComplexInterval(1, 0)
        acc = self
        while n:
            if n & 1:
                result = result * acc
            n >>= 1
            if n:
                acc = acc.square()
        return result

    def contains(self, z) -> bool:
        z = complex(z) if not isinstance(z, (tuple, ComplexInterval)) else z
        if isinstance(z, complex):
            return self.re.contains(z.real) and self.im.contains(z.imag)
        o = ComplexInterval.coerce(z)
        return self.re.contains(o.re) and self.im.contains(o.im)

    def contains_zero(self) -> bool:
        return self.re.contains_zero() and self.im.contains_zero()

    def mid(self) -> complex:
        return complex(self.re.mid(), self.im.mid())

    def radius_float(self) -> float:
        return max(self.re.width_float(), self.im.width_float())

    def __repr__(self):
        return f"ComplexInterval({self.re!r}, {self.im!r})"

