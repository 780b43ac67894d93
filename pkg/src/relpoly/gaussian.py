"""Exact Gaussian-rational arithmetic.

Values are pairs of big rationals (re, im) backed by gmpy2.mpq, so every
operation is exact and zero tests are sound.  This is the parameter field for
everything that carries a correctness claim; big-float mode lives in
bigcomplex.py and is opt-in.
"""

from __future__ import annotations

from gmpy2 import mpq

__all__ = ["GQ", "gq", "parse_gaussian", "format_rational", "format_gaussian"]

_ZERO = mpq(0)
_ONE = mpq(1)


class GQ:
    """A Gaussian rational re + im*i with exact rational coordinates."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is type(_ZERO) else mpq(re)
        self.im = im if type(im) is type(_ZERO) else mpq(im)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_complex(z: complex, max_den: int = 10**6) -> "GQ":
        """Nearest Gaussian rational with denominators bounded by max_den."""
        from fractions import Fraction

        r = Fraction(z.real).limit_denominator(max_den)
        i = Fraction(z.imag).limit_denominator(max_den)
        return GQ(mpq(r.numerator, r.denominator), mpq(i.numerator, i.denominator))

    # -- predicates --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.re and not self.im

    def is_real(self) -> bool:
        return not self.im

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GQ(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GQ(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return GQ(other.re - self.re, other.im - self.im)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        a, b, c, d = self.re, self.im, other.re, other.im
        if not b and not d:
            return GQ(a * c, _ZERO)
        return GQ(a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        c, d = other.re, other.im
        if not d:
            if not c:
                raise ZeroDivisionError("division by zero Gaussian rational")
            return GQ(self.re / c, self.im / c)
        n = c * c + d * d
        a, b = self.re, self.im
        return GQ((a * c + b * d) / n, (b * c - a * d) / n)

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __neg__(self):
        return GQ(-self.re, -self.im)

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return (GQ(1) / self) ** (-n)
        out = GQ(_ONE, _ZERO)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def conj(self) -> "GQ":
        return GQ(self.re, -self.im)

    def norm2(self):
        """|z|^2 as an exact rational."""
        return self.re * self.re + self.im * self.im

    # -- comparisons -------------------------------------------------------

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return not self.is_zero()

    # -- conversions -------------------------------------------------------

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __float__(self):
        if self.im:
            raise ValueError("non-real Gaussian rational")
        return float(self.re)

    def __repr__(self):
        return f"GQ({self.re!s}, {self.im!s})"

    def __str__(self):
        return format_gaussian(self)


def _coerce(x):
    if isinstance(x, GQ):
        return x
    if isinstance(x, (int, type(_ZERO))):
        return GQ(x)
    return NotImplemented


def gq(re, im=0) -> GQ:
    """Shorthand constructor; accepts ints, mpq, Fractions or strings."""
    return GQ(mpq(re), mpq(im))


def format_rational(q) -> str:
    q = mpq(q)
    if q.denominator == 1:
        return str(q.numerator)
    return f"{q.numerator}/{q.denominator}"


def format_gaussian(z: GQ) -> str:
    """Serialize as "a/b" for real values, "a/b+c/di" otherwise."""
    if not z.im:
        return format_rational(z.re)
    re_s = format_rational(z.re)
    im_s = format_rational(abs(z.im))
    sign = "+" if z.im > 0 else "-"
    return f"{re_s}{sign}{im_s}i"


def parse_gaussian(text: str) -> GQ:
    """Parse "a/b", "a/b+c/di", "3i", "-i", and friends.

    Raises ValueError on anything else (never falls back to floats).
    """
    s = text.strip().replace(" ", "")
    if not s:
        raise ValueError("empty parameter string")
    if not all(ch in "0123456789/+-iI" for ch in s):
        raise ValueError(
            f"{text!r} rejected in exact mode; use integer a/b (+c/d i) form or float mode"
        )
    if s[-1] in "iI":
        # split off the trailing imaginary term
        body = s[:-1]
        # find the split point: last +/- not at position 0 and not in an exponent
        idx = None
        for k in range(len(body) - 1, 0, -1):
            if body[k] in "+-" and body[k - 1] not in "+-/":
                idx = k
                break
        if idx is None:
            re_part, im_part = "0", body
        else:
            re_part, im_part = body[:idx], body[idx:]
        if im_part in ("", "+"):
            im_part = "1"
        elif im_part == "-":
            im_part = "-1"
        elif im_part.startswith("+"):
            im_part = im_part[1:]
        try:
            return GQ(mpq(re_part) if re_part else mpq(0), mpq(im_part))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"bad Gaussian rational {text!r}") from exc
    try:
        return GQ(mpq(s), mpq(0))
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"bad Gaussian rational {text!r}") from exc
