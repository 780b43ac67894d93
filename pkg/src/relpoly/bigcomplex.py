"""Arbitrary-precision complex floats and a small complex interval helper.

BigComplex is the opt-in float mode: every value carries the precision (in
bits) it was computed at, and precision is never allowed below 64.  CIv is a
rectangle-style complex interval over mpmath.iv used where a magnitude claim
has to be certified rather than observed (roots-of-unity certificates).
"""

from __future__ import annotations

import mpmath
from mpmath import mpf

__all__ = ["BigComplex", "CIv"]

MIN_PRECISION = 64


class BigComplex:
    """Complex number with arbitrary-precision float coordinates."""

    __slots__ = ("re", "im", "prec")

    def __init__(self, re, im=0, prec: int = 64):
        if prec < MIN_PRECISION:
            raise ValueError(f"precision {prec} below minimum {MIN_PRECISION}")
        self.prec = prec
        with mpmath.workprec(prec):
            self.re = mpf(re) if not isinstance(re, mpf) else re
            self.im = mpf(im) if not isinstance(im, mpf) else im

    @staticmethod
    def from_gq(z, prec: int = 64) -> "BigComplex":
        with mpmath.workprec(prec):
            return BigComplex(
                mpmath.mpf(z.re.numerator) / mpmath.mpf(z.re.denominator),
                mpmath.mpf(z.im.numerator) / mpmath.mpf(z.im.denominator),
                prec,
            )

    def _binop(self, other, fn):
        if isinstance(other, (int, float, mpf)):
            other = BigComplex(other, 0, self.prec)
        prec = max(self.prec, other.prec)
        with mpmath.workprec(prec):
            a = mpmath.mpc(self.re, self.im)
            b = mpmath.mpc(other.re, other.im)
            c = fn(a, b)
        return BigComplex(c.real, c.imag, prec)

    def __add__(self, other):
        return self._binop(other, lambda a, b: a + b)

    __radd__ = __add__

    def __sub__(self, other):
        return self._binop(other, lambda a, b: a - b)

    def __rsub__(self, other):
        return self._binop(other, lambda a, b: b - a)

    def __mul__(self, other):
        return self._binop(other, lambda a, b: a * b)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binop(other, lambda a, b: a / b)

    def __neg__(self):
        return BigComplex(-self.re, -self.im, self.prec)

    def __abs__(self):
        with mpmath.workprec(self.prec):
            return abs(mpmath.mpc(self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __eq__(self, other):
        if not isinstance(other, BigComplex):
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __repr__(self):
        return f"BigComplex({self.re!r}, {self.im!r}, prec={self.prec})"

    def __str__(self):
        import mpmath

        digits = max(6, int(self.prec * 0.301) - 2)
        re_s = mpmath.nstr(self.re, digits)
        if self.im == 0:
            return re_s
        sign = "+" if self.im >= 0 else "-"
        return f"{re_s}{sign}{mpmath.nstr(abs(self.im), digits)}i"

    def to_mpc(self):
        return mpmath.mpc(self.re, self.im)


class CIv:
    """Complex interval: a rectangle re x im of mpmath.iv intervals.

    Only the operations needed for certified polynomial evaluation are
    provided.  All endpoints are outward rounded by mpmath.iv itself.
    """

    __slots__ = ("re", "im")

    def __init__(self, re, im):
        self.re = mpmath.iv.mpf(re)
        self.im = mpmath.iv.mpf(im)

    @staticmethod
    def from_rational(q) -> "CIv":
        return CIv(
            mpmath.iv.mpf(int(q.numerator)) / mpmath.iv.mpf(int(q.denominator)),
            mpmath.iv.mpf(0),
        )

    @staticmethod
    def root_of_unity(k: int) -> "CIv":
        """Certified enclosure of e^{2 pi i / k}."""
        theta = 2 * mpmath.iv.pi / k
        return CIv(mpmath.iv.cos(theta), mpmath.iv.sin(theta))

    def __add__(self, other):
        return CIv(self.re + other.re, self.im + other.im)

    def __sub__(self, other):
        return CIv(self.re - other.re, self.im - other.im)

    def __mul__(self, other):
        return CIv(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __truediv__(self, other):
        n = other.re * other.re + other.im * other.im
        num = self * CIv(other.re, -other.im)
        return CIv(num.re / n, num.im / n)

    def abs2(self):
        return self.re * self.re + self.im * self.im

    def abs_lower(self) -> float:
        """Certified lower bound on |z|."""
        m2 = self.abs2()
        lo = m2.a
        if lo < 0:
            return 0.0
        return float(mpmath.sqrt(mpmath.mpf(lo)))

    def abs_upper(self) -> float:
        m2 = self.abs2()
        return float(mpmath.sqrt(mpmath.mpf(m2.b)))

    def width(self) -> float:
        return max(float(self.re.delta), float(self.im.delta))

    def __repr__(self):
        return f"CIv({self.re}, {self.im})"
