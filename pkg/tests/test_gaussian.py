"""Field arithmetic and serialization of Gaussian rationals."""

from fractions import Fraction

from gmpy2 import mpq
from hypothesis import given, strategies as st

from relpoly.gaussian import GQ, format_gaussian, gq, parse_gaussian

rationals = st.fractions(
    min_value=Fraction(-50), max_value=Fraction(50), max_denominator=40
)
gaussians = st.builds(
    lambda a, b: GQ(mpq(a.numerator, a.denominator), mpq(b.numerator, b.denominator)),
    rationals,
    rationals,
)


@given(gaussians, gaussians, gaussians)
def test_field_axioms(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a + b == b + a
    assert a * b == b * a
    if not a.is_zero():
        assert a * (GQ(1) / a) == GQ(1)
        assert (b / a) * a == b


@given(gaussians)
def test_parse_format_roundtrip(z):
    assert parse_gaussian(format_gaussian(z)) == z


def test_parse_forms():
    assert parse_gaussian("-1/2") == gq("-1/2")
    assert parse_gaussian("1/3+2/7i") == gq("1/3", "2/7")
    assert parse_gaussian("-2/3-1/9i") == gq("-2/3", "-1/9")
    assert parse_gaussian("3i") == gq(0, 3)
    assert parse_gaussian("-i") == gq(0, -1)


def test_parse_rejects_floats():
    for bad in ("0.5", "1e-3", "", "x", "1/0"):
        try:
            parse_gaussian(bad)
        except ValueError:
            continue
        raise AssertionError(f"{bad!r} should not parse")


def test_norm_and_conj():
    z = gq("3/4", "-2/5")
    assert z.norm2() == mpq(9, 16) + mpq(4, 25)
    assert z * z.conj() == GQ(z.norm2())
    assert (z ** 3) == z * z * z
