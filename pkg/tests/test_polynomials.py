"""Polynomial algebra, roots with certified residuals, rational reconstruction."""

import random
from fractions import Fraction

import mpmath
import pytest
from gmpy2 import mpq

from relpoly.gaussian import GQ, gq
from relpoly.locus import unity_graph
from relpoly.polynomials import (
    RatPoly,
    poly_gcd,
    poly_roots,
    rational_reconstruct,
    reconstruct_real,
)
from relpoly.reliability import eval_delcon_symbolic


def test_gcd_examples():
    # gcd(p^2-1, p-1) = p-1
    assert poly_gcd(RatPoly([-1, 0, 1]), RatPoly([-1, 1])) == RatPoly([1, -1]).monic()
    # gcd(p, p+1) = 1
    assert poly_gcd(RatPoly([0, 1]), RatPoly([1, 1])) == RatPoly([1])
    with pytest.raises(ValueError):
        poly_gcd(RatPoly(), RatPoly())


def test_gcd_divides_inputs(rng):
    for _ in range(25):
        a = RatPoly([mpq(rng.randint(-5, 5)) for _ in range(rng.randint(1, 5))])
        b = RatPoly([mpq(rng.randint(-5, 5)) for _ in range(rng.randint(1, 5))])
        if a.is_zero() and b.is_zero():
            continue
        g = poly_gcd(a, b)
        for q in (a, b):
            if q.is_zero():
                continue
            _, rem = q.divmod(g)
            assert rem.is_zero()


def test_gcd_unity_graph_five():
    # gcd(R(G_5;p), p^5 - 1) = p - 1 with G_5 from the stored matrix
    R = eval_delcon_symbolic(unity_graph(5).graph)
    unity = RatPoly([-1, 0, 0, 0, 0, 1])
    assert poly_gcd(R, unity) == RatPoly([-1, 1]).monic()


def test_roots_known():
    roots = poly_roots(RatPoly([1, 0, 1]), precision=100)
    assert len(roots) == 2
    vals = sorted((complex(r) for r in roots), key=lambda z: z.imag)
    assert abs(vals[0] - (-1j)) < 1e-30 and abs(vals[1] - 1j) < 1e-30
    # p - 1 -> {1}
    roots = poly_roots(RatPoly([-1, 1]), precision=80)
    assert len(roots) == 1 and abs(complex(roots[0]) - 1) < 1e-20


def test_roots_triangle_factorization():
    # (1-p)^2 (1+2p): roots {1 (x2), -1/2}; this is R(K3;p) by brute force
    q = RatPoly([1, -2, 1]) * RatPoly([1, 2])
    roots = sorted(poly_roots(q, precision=60), key=lambda z: float(z.re))
    assert abs(complex(roots[0]) - (-0.5)) < 1e-12
    assert abs(complex(roots[1]) - 1) < 1e-6 and abs(complex(roots[2]) - 1) < 1e-6


def test_roots_reconstruct_polynomial(rng):
    # product of (p - z_i) times lead reproduces the coefficients
    for _ in range(10):
        coeffs = [mpq(rng.randint(-4, 4)) for _ in range(rng.randint(2, 6))]
        q = RatPoly(coeffs)
        if q.degree < 1:
            continue
        prec = 80
        roots = poly_roots(q, precision=prec)
        with mpmath.workprec(200):
            # rebuild prod (p - z_i) by convolution, ascending coefficients
            poly = [mpmath.mpc(1)]
            for r in roots:
                z = r.to_mpc()
                shifted = [mpmath.mpc(0)] + poly
                poly = [
                    shifted[i] - z * (poly[i] if i < len(poly) else 0)
                    for i in range(len(shifted))
                ]
            lead = mpmath.mpf(q.coeffs[-1].numerator) / mpmath.mpf(q.coeffs[-1].denominator)
            tol = float(mpmath.mpf(2) ** (-prec / 2)) * float(q.length())
            for k, c in enumerate(q.coeffs):
                got = poly[k] * lead
                want = mpmath.mpf(c.numerator) / mpmath.mpf(c.denominator)
                assert abs(got - want) <= tol * 4 + 1e-18


def test_roots_errors():
    with pytest.raises(ValueError):
        poly_roots(RatPoly())
    with pytest.raises(ValueError):
        poly_roots(RatPoly([3]))


def test_reconstruct_examples():
    assert reconstruct_real(Fraction(3333333333, 10**10), 100) == mpq(1, 3)
    assert reconstruct_real(Fraction(0), 100) == 0
    z = rational_reconstruct(complex(-3 / 7, 2 / 5), 100)
    assert z == gq("-3/7", "2/5")


def test_reconstruct_failure():
    with pytest.raises(ArithmeticError):
        reconstruct_real(Fraction(1, 150), 100)  # no den<=100 rational is close enough


def test_reconstruct_roundtrip_randomized(rng):
    # identity on >= 1000 Gaussian rationals with den <= bound, through floats
    # carrying >= 2 log2(bound) + 8 bits (double precision suffices here)
    bound = 99
    for _ in range(1000):
        num = rng.randint(-500, 500)
        den = rng.randint(1, bound)
        x = Fraction(num, den)
        got = reconstruct_real(float(x), bound)
        assert got == mpq(num, den)
