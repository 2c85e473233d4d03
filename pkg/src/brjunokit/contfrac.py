"""Continued fractions [a_1, a_2, ...] = 1/(a_1 + 1/(a_2 + ...)) in (0, 1].

A continued fraction is a finite digit prefix plus a tail kind: all ones,
terminating, or unspecified.  Expansions with an all-ones tail have every
remainder alpha_i = [a_i, a_{i+1}, ...] in Q(sqrt 5), which makes them exact.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .golden import THETA_STAR, GoldenFieldElement
from .intervals import Interval, precision


class Tail(enum.Enum):
    ALL_ONES = "ones"
    TERMINATING = "terminating"
    UNSPECIFIED = "unspecified"


class ValueUndetermined(ValueError):
    """Raised when an operation needs the value of an unspecified tail."""


@dataclass(frozen=True)
class Convergent:
    p: int
    q: int
    index: int

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.p, self.q)


@dataclass(frozen=True)
class ContinuedFraction:
    prefix: tuple
    tail: Tail = Tail.ALL_ONES

    def __post_init__(self):
        digits = tuple(self.prefix)
        for d in digits:
            if isinstance(d, bool) or not isinstance(d, int):
                raise TypeError(f"digit {d!r} is not an integer")
            if d < 1:
                raise ValueError(f"digit {d} must be >= 1")
        if self.tail is Tail.TERMINATING and not digits:
            raise ValueError("a terminating continued fraction needs at least one digit")
        object.__setattr__(self, "prefix", digits)

    # ---- constructors -------------------------------------------------------
    @classmethod
    def golden(cls) -> "ContinuedFraction":
        return cls((), Tail.ALL_ONES)

    @classmethod
    def ones_tail(cls, digits: Sequence[int]) -> "ContinuedFraction":
        return cls(tuple(digits), Tail.ALL_ONES)

    @classmethod
    def from_rational(cls, x) -> "ContinuedFraction":
        """Canonical expansion of a rational in (0, 1]: last digit >= 2 unless x = 1."""
        x = Fraction(x)
        if not 0 < x <= 1:
            raise ValueError("rational must lie in (0, 1]")
        digits = []
        p, q = x.numerator, x.denominator
        while p:
            a, r = divmod(q, p)
            digits.append(a)
            q, p = p, r
        return cls(tuple(digits), Tail.TERMINATING)

    # ---- digits -------------------------------------------------------------
    def __len__(self):
        return len(self.prefix)

    def digit(self, i: int) -> int:
        """The i-th digit a_i (1-based)."""
        if i < 1:
            raise IndexError("digits are indexed from 1")
        if i <= len(self.prefix):
            return self.prefix[i - 1]
        if self.tail is Tail.ALL_ONES:
            return 1
        if self.tail is Tail.TERMINATING:
            raise IndexError(f"digit {i} is past the end of a terminating expansion")
        raise ValueUndetermined("digit lies in an unspecified tail")

    def digits(self, n: int) -> list:
        return [self.digit(i) for i in range(1, n + 1)]

    def core_length(self) -> int:
        """Prefix length after dropping trailing ones (all-ones tails only)."""
        n = len(self.prefix)
        if self.tail is Tail.ALL_ONES:
            while n and self.prefix[n - 1] == 1:
                n -= 1
        return n

    def extended(self, digits: Sequence[int]) -> "ContinuedFraction":
        return ContinuedFraction(self.prefix + tuple(digits), self.tail)

    def truncated(self, n: int) -> "ContinuedFraction":
        """[a_1, ..., a_n; ones]."""
        return ContinuedFraction(tuple(self.digits(n)), Tail.ALL_ONES)

    def canonical(self) -> "ContinuedFraction":
        if self.tail is Tail.TERMINATING and len(self.prefix) > 1 and self.prefix[-1] == 1:
            d = self.prefix[:-2] + (self.prefix[-2] + 1,)
            return ContinuedFraction(d, Tail.TERMINATING)
        return self

    def __str__(self):
        return format_cf(self)

    # ---- exact values -------------------------------------------------------
    def _require_value(self):
        if self.tail is Tail.UNSPECIFIED:
            raise ValueUndetermined("value of a continued fraction with unspecified tail")

    def exact_value(self):
        """Fraction for terminating expansions, GoldenFieldElement for all-ones tails."""
        return self.alpha(1)

    def alpha(self, i: int):
        """alpha_i = [a_i, a_{i+1}, ...] exactly."""
        self._require_value()
        if i < 1:
            raise IndexError("alpha is indexed from 1")
        n = len(self.prefix)
        if self.tail is Tail.TERMINATING:
            if i > n:
                raise IndexError(f"alpha_{i} vanishes past a terminating expansion")
            x = Fraction(0)
            for d in reversed(self.prefix[i - 1:]):
                x = 1 / (d + x)
            return x
        if i > n:
            return THETA_STAR
        x = THETA_STAR
        for d in reversed(self.prefix[i - 1:]):
            x = (x + d).reciprocal()
        return x

    def alphas(self, count: int) -> list:
        """Exact [alpha_1, ..., alpha_count]."""
        self._require_value()
        n = len(self.prefix)
        if self.tail is Tail.TERMINATING:
            if count > n:
                raise IndexError("alpha vanishes past a terminating expansion")
            x = Fraction(0)
            out = []
            for d in reversed(self.prefix):
                x = 1 / (d + x)
                out.append(x)
            out.reverse()
            return out[:count]
        x = THETA_STAR
        out = []
        for d in reversed(self.prefix):
            x = (x + d).reciprocal()
            out.append(x)
        out.reverse()
        out.extend([THETA_STAR] * max(0, count - n))
        return out[:count]

    def alpha_enclosures(self, count: int) -> list:
        """Interval enclosures of alpha_1..alpha_count at the working precision.

        Uses the backward recursion alpha_j = 1/(a_j + alpha_{j+1}), which is a
        contraction, so rounding errors do not accumulate.
        """
        self._require_value()
        n = len(self.prefix)
        if self.tail is Tail.TERMINATING:
            if count > n:
                raise IndexError("alpha vanishes past a terminating expansion")
            x = Interval(0)
            start = n
        else:
            x = theta_star_interval()
            start = max(n, count)
        out = [None] * start
        one = Interval(1)
        for j in range(start, 0, -1):
            x = one / (x + self.digit(j))
            out[j - 1] = x
        return out[:count]


# ---------------------------------------------------------------------------
# text notation

_CF_RE = re.compile(r"^\s*\[(.*)\]\s*$")


def parse(text: str) -> ContinuedFraction:
    """Parse '[1,1,1,20;ones]', '[1,1,1,...]', '[2]' or '[1,3;*]'."""
    m = _CF_RE.match(text)
    if not m:
        raise ValueError(f"not a continued fraction: {text!r}")
    body = m.group(1).replace(" ", "")
    tail = Tail.TERMINATING
    strip_ones = False
    if ";" in body:
        body, marker = body.split(";", 1)
        if marker in ("ones", "1", "1,1,1,..."):
            tail = Tail.ALL_ONES
        elif marker in ("*", "?", "unspecified"):
            tail = Tail.UNSPECIFIED
        else:
            raise ValueError(f"unknown tail marker {marker!r}")
    else:
        for ell in ("…", "..."):
            if body.endswith(ell):
                body = body[: -len(ell)].rstrip(",")
                tail = Tail.ALL_ONES
                strip_ones = True
                break
    parts = [p for p in body.split(",")] if body else []
    digits = []
    for p in parts:
        if not re.fullmatch(r"[+-]?\d+", p):
            raise ValueError(f"bad digit {p!r}")
        digits.append(int(p))
    if strip_ones:
        while digits and digits[-1] == 1:
            digits.pop()
    return ContinuedFraction(tuple(digits), tail)


def format_cf(cf: ContinuedFraction) -> str:
    body = ",".join(str(d) for d in cf.prefix)
    if cf.tail is Tail.TERMINATING:
        return f"[{body}]"
    if cf.tail is Tail.UNSPECIFIED:
        return f"[{body};*]"
    if not body:
        return "[1,1,1,...]"
    return f"[{body};ones]"


# ---------------------------------------------------------------------------
# convergents and values


def convergents(cf: ContinuedFraction, n: int) -> list:
    """p_k/q_k = [a_1, ..., a_k] for k = 1..n.

    Seeds p_{-1} = 1, p_0 = 0, q_{-1} = 0, q_0 = 1, then
    q_k = a_k q_{k-1} + q_{k-2}.
    """
    if n < 0:
        raise ValueError("n must be non-negative")
    if cf.tail is Tail.TERMINATING and n > len(cf.prefix):
        raise IndexError(f"only {len(cf.prefix)} digits available")
    p0, p1 = 1, 0
    q0, q1 = 0, 1
    out = []
    for k in range(1, n + 1):
        a = cf.digit(k)
        p0, p1 = p1, a * p1 + p0
        q0, q1 = q1, a * q1 + q0
        out.append(Convergent(p1, q1, k))
    return out


def denominators(cf: ContinuedFraction, n: int) -> list:
    """[q_0, q_1, ..., q_n] with q_0 = 1."""
    return [1] + [c.q for c in convergents(cf, n)]


_THETA_CACHE: dict = {}


def theta_star_interval() -> Interval:
    """Enclosure of (sqrt5 - 1)/2 at the working precision."""
    from .intervals import working_precision

    prec = working_precision()
    iv = _THETA_CACHE.get(prec)
    if iv is None:
        iv = (Interval.sqrt5() - 1).scale2(-1)
        _THETA_CACHE[prec] = iv
    return iv


def value(cf: ContinuedFraction, k: int = 53) -> Interval:
    """Enclosure of the value with width at most 2**-k."""
    if cf.tail is Tail.UNSPECIFIED:
        raise ValueUndetermined("value of a continued fraction with unspecified tail")
    x = cf.exact_value()
    if isinstance(x, Fraction):
        q = x.denominator
        if q & (q - 1) == 0:
            return Interval(x)
        with precision(k + 4):
            return Interval(x)
    return x.to_interval(k)


def alpha(cf: ContinuedFraction, i: int):
    return cf.alpha(i)


def consecutive_products_below_half(cf: ContinuedFraction, count: int) -> bool:
    """Exact check of alpha_{k-1} alpha_k < 1/2 for 2 <= k <= count."""
    al = cf.alphas(count)
    half = Fraction(1, 2)
    for k in range(1, len(al)):
        prod = al[k - 1] * al[k]
        if isinstance(prod, GoldenFieldElement):
            if not prod < half:
                return False
        elif not prod < half:
            return False
    return True
