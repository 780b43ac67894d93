"""Rational-coefficient polynomials, gcd, numeric roots, rational reconstruction.

Coefficients are exact big rationals in ascending-degree order; the leading
coefficient of a nonzero polynomial is nonzero.  Root finding is the one
numeric operation here: it returns BigComplex approximations together with a
certified residual target rather than pretending to be exact.
"""

from __future__ import annotations

from fractions import Fraction

import mpmath
from gmpy2 import mpq

from .bigcomplex import BigComplex
from .gaussian import GQ, format_rational

__all__ = [
    "RatPoly",
    "poly_gcd",
    "poly_roots",
    "rational_reconstruct",
    "reconstruct_real",
    "AlgebraicBound",
]


class RatPoly:
    """Univariate polynomial with exact rational coefficients (ascending)."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=()):
        cs = [c if type(c) is type(mpq()) else mpq(c) for c in coeffs]
        while cs and not cs[-1]:
            cs.pop()
        self.coeffs = tuple(cs)

    # -- basics --------------------------------------------------------------

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self):
        return bool(self.coeffs)

    def __eq__(self, other):
        if isinstance(other, RatPoly):
            return self.coeffs == other.coeffs
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        if self.is_zero():
            return "RatPoly(0)"
        terms = [f"{format_rational(c)}*p^{k}" for k, c in enumerate(self.coeffs) if c]
        return "RatPoly(" + " + ".join(terms) + ")"

    # -- ring operations -------------------------------------------------------

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [mpq(0)] * (n - len(self.coeffs))
        for k, c in enumerate(other.coeffs):
            a[k] += c
        return RatPoly(a)

    __radd__ = __add__

    def __sub__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [mpq(0)] * (n - len(self.coeffs))
        for k, c in enumerate(other.coeffs):
            a[k] -= c
        return RatPoly(a)

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __neg__(self):
        return RatPoly([-c for c in self.coeffs])

    def __mul__(self, other):
        other = _as_poly(other)
        if self.is_zero() or other.is_zero():
            return RatPoly()
        out = [mpq(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if not a:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return RatPoly(out)

    __rmul__ = __mul__

    def divmod(self, other: "RatPoly"):
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        quot = [mpq(0)] * max(0, len(rem) - len(other.coeffs) + 1)
        d = other.degree
        lead = other.coeffs[-1]
        for k in range(len(rem) - 1, d - 1, -1):
            if not rem[k]:
                continue
            q = rem[k] / lead
            quot[k - d] = q
            for j, b in enumerate(other.coeffs):
                rem[k - d + j] -= q * b
        return RatPoly(quot), RatPoly(rem)

    def monic(self) -> "RatPoly":
        if self.is_zero():
            return self
        lead = self.coeffs[-1]
        return RatPoly([c / lead for c in self.coeffs])

    def derivative(self) -> "RatPoly":
        return RatPoly([k * c for k, c in enumerate(self.coeffs)][1:])

    # -- evaluation --------------------------------------------------------------

    def eval_gq(self, z: GQ) -> GQ:
        acc = GQ(0)
        for c in reversed(self.coeffs):
            acc = acc * z + GQ(c)
        return acc

    def eval_mpc(self, z, prec: int = 64):
        with mpmath.workprec(prec):
            acc = mpmath.mpc(0)
            zc = z.to_mpc() if isinstance(z, BigComplex) else mpmath.mpc(z)
            for c in reversed(self.coeffs):
                acc = acc * zc + mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator)
            return acc

    def eval_civ(self, z):
        """Certified interval evaluation (z a CIv)."""
        from .bigcomplex import CIv

        acc = CIv(0, 0)
        for c in reversed(self.coeffs):
            acc = acc * z + CIv.from_rational(c)
        return acc

    # -- heights -------------------------------------------------------------

    def usual_height(self):
        """Largest coefficient in absolute value."""
        return max((abs(c) for c in self.coeffs), default=mpq(0))

    def length(self):
        """Sum of absolute values of the coefficients."""
        return sum((abs(c) for c in self.coeffs), mpq(0))

    # -- serialization ----------------------------------------------------------

    def to_json(self):
        return [format_rational(c) for c in self.coeffs]

    @staticmethod
    def from_json(data) -> "RatPoly":
        return RatPoly([mpq(s) for s in data])


def _as_poly(x) -> RatPoly:
    if isinstance(x, RatPoly):
        return x
    return RatPoly([mpq(x)])


def poly_gcd(a: RatPoly, b: RatPoly) -> RatPoly:
    """Monic gcd over the rationals; errors when both inputs are zero."""
    if a.is_zero() and b.is_zero():
        raise ValueError("gcd of two zero polynomials is undefined")
    x, y = a, b
    while not y.is_zero():
        _, r = x.divmod(y)
        x, y = y, r
    return x.monic()


def poly_roots(q: RatPoly, precision: int = 64) -> list[BigComplex]:
    """All complex roots with multiplicity, as BigComplex at `precision` bits.

    Each returned z satisfies |q(z)| <= 2^(-precision/2) * L(q); work happens
    at inflated precision and is retried higher if the residual target fails.
    """
    if q.is_zero():
        raise ValueError("zero polynomial has no well-defined roots")
    if q.degree < 1:
        raise ValueError("constant polynomial has no roots")
    target = mpmath.mpf(2) ** (-precision / 2) * mpmath.mpf(
        q.length().numerator
    ) / mpmath.mpf(q.length().denominator)
    coeffs_desc = [
        mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator)
        for c in reversed(q.coeffs)
    ]
    work = precision * 2 + 20
    for _ in range(6):
        with mpmath.workprec(work):
            cs = [mpmath.mpf(c) for c in coeffs_desc]
            try:
                roots = mpmath.polyroots(cs, maxsteps=200, extraprec=work)
            except mpmath.libmp.NoConvergence:
                work *= 2
                continue
            ok = all(abs(q.eval_mpc(r, prec=work)) <= target for r in roots)
        if ok:
            return [BigComplex(r.real, r.imag, max(precision, 64)) for r in roots]
        work *= 2
    raise ArithmeticError("root residual target not reached; polynomial may be ill-conditioned")


# -- rational reconstruction ---------------------------------------------------


def _best_convergent(x: Fraction, den_bound: int) -> Fraction:
    """Largest-denominator continued-fraction convergent with den <= bound."""
    a0 = x.numerator // x.denominator
    p_prev, q_prev = 1, 0
    p_cur, q_cur = a0, 1
    num = x.numerator - a0 * x.denominator
    den = x.denominator
    while num:
        a_k, rem = divmod(den, num)
        den, num = num, rem
        p_nxt = a_k * p_cur + p_prev
        q_nxt = a_k * q_cur + q_prev
        if q_nxt > den_bound:
            break
        p_prev, q_prev, p_cur, q_cur = p_cur, q_cur, p_nxt, q_nxt
    return Fraction(p_cur, q_cur)


def reconstruct_real(x, den_bound: int):
    """Unique rational with denominator <= den_bound within 1/(2*den_bound^2) of x.

    x may be a Fraction, mpq, float, or mpmath mpf (all are exactly dyadic or
    rational already).  Raises ArithmeticError when no candidate qualifies.
    """
    if isinstance(x, mpmath.mpf):
        x = Fraction(*mpmath.libmp.to_rational(x._mpf_))
    elif not isinstance(x, Fraction):
        x = Fraction(x.numerator, x.denominator) if isinstance(x, type(mpq())) else Fraction(x)
    cand = _best_convergent(x, den_bound)
    if abs(x - cand) * 2 * den_bound * den_bound > 1:
        raise ArithmeticError(
            f"reconstruction failed: no rational with denominator <= {den_bound} near {float(x)}"
        )
    return mpq(cand.numerator, cand.denominator)


def rational_reconstruct(x, den_bound: int) -> GQ:
    """Coordinate-wise Gaussian-rational reconstruction of a BigComplex/complex."""
    if isinstance(x, BigComplex):
        re, im = x.re, x.im
    elif isinstance(x, GQ):
        re, im = Fraction(x.re.numerator, x.re.denominator), Fraction(
            x.im.numerator, x.im.denominator
        )
    else:
        z = complex(x)
        re, im = z.real, z.imag
    return GQ(reconstruct_real(re, den_bound), reconstruct_real(im, den_bound))


# -- height data for the reduction ---------------------------------------------


class AlgebraicBound:
    """Degree, log-height and magnitude bound for a Gaussian-rational parameter.

    For p = (u + v i)/b in lowest terms the minimal polynomial is b*x - u when
    v = 0 and (b*x - u)^2 + v^2 (divided by its content) otherwise; the
    absolute logarithmic height is (1/d) * log(lead * max(1,|p|)^d), carried
    here as the exact rational W = (lead * max(1,|p|^2)^(d/2))^(2/d) so that
    exp-of-height powers stay exact.
    """

    __slots__ = ("degree", "height_base2", "logC", "C")

    def __init__(self, degree: int, height_base2, C: int):
        import math

        if degree < 1:
            raise ValueError("degree must be >= 1")
        if C <= 1:
            raise ValueError("C must exceed 1")
        self.degree = degree
        # exact rational with h(p) = (1/2) log(height_base2)
        self.height_base2 = height_base2
        self.C = C
        self.logC = Fraction(math.ceil(math.log(C) * 10**9), 10**9)

    def __repr__(self):
        return f"AlgebraicBound(d={self.degree}, C={self.C})"


def parameter_height_data(p: GQ):
    """(d, W) with h(p) = (1/2) log W, W exact rational; d the degree of p."""
    import math

    u, v = p.re, p.im
    b = u.denominator * v.denominator // math.gcd(int(u.denominator), int(v.denominator))
    if not v:
        # minimal polynomial b*x - u*b/den(u); in lowest terms den(u)*x - num(u)
        lead = u.denominator
        mval = max(mpq(1), abs(u))
        return 1, mpq(lead) ** 2 * mval ** 2
    un = u.numerator * (b // u.denominator)
    vn = v.numerator * (b // v.denominator)
    # (b x)^2 - 2 un (b x) + un^2 + vn^2, content g
    g = math.gcd(math.gcd(int(b * b), int(2 * un * b)), int(un * un + vn * vn))
    lead = b * b // g
    norm2 = p.norm2()
    mval2 = max(mpq(1), norm2)
    return 2, mpq(lead) * mval2
