"""Exact arithmetic in the quadratic field Q(sqrt 5)."""

from __future__ import annotations

from fractions import Fraction

from .intervals import Interval, precision, working_precision


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


class GoldenFieldElement:
    """a + b*sqrt(5) with rational a, b."""

    __slots__ = ("a", "b")

    def __init__(self, a=0, b=0):
        self.a = _frac(a)
        self.b = _frac(b)

    @classmethod
    def coerce(cls, x) -> "GoldenFieldElement":
        if isinstance(x, GoldenFieldElement):
            return x
        return cls(x, 0)

    # field operations
    def __add__(self, other):
        o = GoldenFieldElement.coerce(other)
        return GoldenFieldElement(self.a + o.a, self.b + o.b)

    __radd__ = __add__

    def __sub__(self, other):
        o = GoldenFieldElement.coerce(other)
        return GoldenFieldElement(self.a - o.a, self.b - o.b)

    def __rsub__(self, other):
        return GoldenFieldElement.coerce(other) - self

    def __neg__(self):
        return GoldenFieldElement(-self.a, -self.b)

    def __mul__(self, other):
        o = GoldenFieldElement.coerce(other)
        return GoldenFieldElement(self.a * o.a + 5 * self.b * o.b, self.a * o.b + self.b * o.a)

    __rmul__ = __mul__

    def norm(self) -> Fraction:
        return self.a * self.a - 5 * self.b * self.b

    def conjugate(self) -> "GoldenFieldElement":
        return GoldenFieldElement(self.a, -self.b)

    def reciprocal(self) -> "GoldenFieldElement":
        n = self.norm()
        if n == 0:
            # sqrt 5 is irrational, so the norm vanishes only at zero
            raise ZeroDivisionError("reciprocal of zero in Q(sqrt 5)")
        return GoldenFieldElement(self.a / n, -self.b / n)

    def __truediv__(self, other):
        return self * GoldenFieldElement.coerce(other).reciprocal()

    def __rtruediv__(self, other):
        return GoldenFieldElement.coerce(other) * self.reciprocal()

    # exact order
    def sign(self) -> int:
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 with 5 b^2
        return sa if self.a * self.a > 5 * self.b * self.b else sb

    def __eq__(self, other):
        try:
            o = GoldenFieldElement.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.a == o.a and self.b == o.b

    def __hash__(self):
        return hash((self.a, self.b))

    def __lt__(self, other):
        return (self - other).sign() < 0

    def __le__(self, other):
        return (self - other).sign() <= 0

    def __gt__(self, other):
        return (self - other).sign() > 0

    def __ge__(self, other):
        return (self - other).sign() >= 0

    def is_rational(self) -> bool:
        return self.b == 0

    def to_interval(self, bits: int | None = None) -> Interval:
        """Outward enclosure with width at most 2**-bits (default: working precision)."""
        target = working_precision() if bits is None else bits
        if self.b == 0:
            with precision(max(target + 4, 16)):
                return Interval(self.a)
        size = max(abs(self.a), abs(self.b), Fraction(1))
        extra = int(size.numerator).bit_length() - int(size.denominator).bit_length() + 8
        prec = target + max(extra, 0) + 8
        while True:
            with precision(prec):
                iv = Interval(self.a) + Interval(self.b) * Interval.sqrt5()
                if iv.width_float() <= 2.0 ** -target:
                    return iv
            prec *= 2

    def __float__(self):
        return self.to_interval(60).mid()

    def __repr__(self):
        return f"GoldenFieldElement({self.a}, {self.b})"


SQRT5 = GoldenFieldElement(0, 1)
THETA_STAR = GoldenFieldElement(Fraction(-1, 2), Fraction(1, 2))   # (sqrt5 - 1)/2
PHI = GoldenFieldElement(Fraction(1, 2), Fraction(1, 2))           # (sqrt5 + 1)/2
