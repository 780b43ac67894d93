import random

import pytest
from gmpy2 import mpq

from relpoly.gaussian import GQ


@pytest.fixture
def rng():
    return random.Random(20240817)


def random_gq(rng, span=9, den=9, complex_ok=True):
    re = mpq(rng.randint(-span, span), rng.randint(1, den))
    im = mpq(rng.randint(-span, span), rng.randint(1, den)) if complex_ok else mpq(0)
    return GQ(re, im)


def random_parameter(rng, avoid=()):
    """Random Gaussian-rational p avoiding 0, 1 and given values."""
    while True:
        p = random_gq(rng, span=6, den=7)
        if p != GQ(0) and p != GQ(1) and all(p != a for a in avoid):
            return p
