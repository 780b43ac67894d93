"""Edge interactions, the involution f_p, the composition map g, pentagon template.

The effective interaction y = (1-p)S/R + 1 and the virtual interaction
yhat = R/S + 1 are carried as extended values (INF is first class), and all
Mobius evaluation is projective so poles never leak special cases upward.
"""

from __future__ import annotations

import math

from gmpy2 import is_square, isqrt, mpq

from .gaussian import GQ
from .graphs import Multigraph, TwoTerminal
from .reliability import RelPair, eval_multivariate

__all__ = [
    "INF",
    "Mobius",
    "InteractionPoint",
    "FixedPointReport",
    "interactions_of",
    "f_map",
    "g_map",
    "classify_fixed",
    "classify_point",
    "closed_forms",
    "pentagon_template",
    "pentagon_F",
    "pentagon_F_pipeline",
    "pentagon_circle_sq",
]


class _Infinity:
    """The point at infinity on the Riemann sphere."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INF"

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("relpoly-INF")


INF = _Infinity()


def is_inf(x) -> bool:
    return x is INF


class Mobius:
    """z -> (a z + b)/(c z + d) with exact coefficients and ad - bc != 0."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d):
        self.a, self.b, self.c, self.d = (_as_gq(x) for x in (a, b, c, d))
        if (self.a * self.d - self.b * self.c).is_zero():
            raise ValueError("degenerate Mobius map (zero determinant)")

    def det(self) -> GQ:
        return self.a * self.d - self.b * self.c

    def __call__(self, z):
        if z is INF:
            if self.c.is_zero():
                return INF
            return self.a / self.c
        num = self.a * z + self.b
        den = self.c * z + self.d
        if den.is_zero():
            return INF
        return num / den

    def compose(self, other: "Mobius") -> "Mobius":
        """self after other (matrix product)."""
        return Mobius(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "Mobius":
        return Mobius(self.d, -self.b, -self.c, self.a)

    def derivative_at(self, z):
        """M'(z) = det / (cz + d)^2 for finite z off the pole."""
        den = self.c * z + self.d
        if den.is_zero():
            raise ZeroDivisionError("derivative at the pole")
        return self.det() / (den * den)

    def __repr__(self):
        return f"Mobius({self.a!s}, {self.b!s}, {self.c!s}, {self.d!s})"


def _as_gq(x) -> GQ:
    if isinstance(x, GQ):
        return x
    return GQ(mpq(x))


class InteractionPoint:
    """Effective and virtual interactions of one graph at one parameter."""

    __slots__ = ("y", "yhat")

    def __init__(self, y, yhat):
        self.y = y
        self.yhat = yhat

    def __repr__(self):
        return f"InteractionPoint(y={self.y!r}, yhat={self.yhat!r})"


def interactions_of(pair: RelPair) -> InteractionPoint:
    """y and yhat from an exact (R, S) pair; errors when R = S = 0."""
    R, S, p = pair.R, pair.S, pair.at
    r0 = R.is_zero() if isinstance(R, GQ) else not R
    s0 = S.is_zero() if isinstance(S, GQ) else not S
    if r0 and s0:
        raise ArithmeticError("interaction undefined: R and S both vanish")
    one = GQ(1)
    if r0:
        y = INF
    else:
        y = (one - p) * S / R + one
    if s0:
        yhat = INF
    else:
        yhat = R / S + one
    if not r0 and not s0 and not (p == GQ(1)):
        assert f_map(p)(y) == yhat, "f_p(y) != yhat; pair is inconsistent"
    return InteractionPoint(y, yhat)


def f_map(p) -> Mobius:
    """The involution f_p(z) = 1 + (1-p)/(z-1) = (z-p)/(z-1)."""
    p = _as_gq(p)
    if p == GQ(1):
        raise ValueError("f_p undefined at p = 1")
    return Mobius(GQ(1), -p, GQ(1), GQ(-1))


def g_map(p, y_base) -> Mobius:
    """Composition dynamics g(z) = (z*y0 - p)/(y0 + z - 1 - p).

    g(y_H) is the effective interaction of H composed in parallel with the
    base gadget; fixed points are 1 and p.
    """
    p = _as_gq(p)
    y0 = _as_gq(y_base)
    if y0 == GQ(1) or y0 == p:
        raise ValueError("g degenerates when the base interaction is 1 or p")
    return Mobius(y0, -p, GQ(1), y0 - GQ(1) - p)


# -- fixed point classification ---------------------------------------------------


class FixedPointReport:
    __slots__ = ("points", "multipliers", "classes", "parabolic")

    def __init__(self, points, multipliers, classes, parabolic=False):
        self.points = points
        self.multipliers = multipliers
        self.classes = classes
        self.parabolic = parabolic

    def __repr__(self):
        return (
            f"FixedPointReport(points={self.points!r}, multipliers={self.multipliers!r}, "
            f"classes={self.classes!r}, parabolic={self.parabolic})"
        )


def _gq_sqrt(z: GQ):
    """Exact square root in Q[i] when it exists, else None."""

    def rat_sqrt(q):
        if q < 0:
            return None
        n, d = q.numerator, q.denominator
        if is_square(n) and is_square(d):
            return mpq(isqrt(n), isqrt(d))
        return None

    a, b = z.re, z.im
    if not b:
        r = rat_sqrt(a)
        if r is not None:
            return GQ(r, 0)
        r = rat_sqrt(-a)
        if r is not None:
            return GQ(0, r)
        return None
    r2 = rat_sqrt(a * a + b * b)
    if r2 is None:
        return None
    x = rat_sqrt((a + r2) / 2)
    if x is None or not x:
        return None
    return GQ(x, b / (2 * x))


def _abs_float(z) -> float:
    if z is INF:
        return math.inf
    return math.hypot(float(z.re), float(z.im))


def _classify_mult(lam) -> str:
    mag = _abs_float(lam)
    if abs(mag - 1.0) < 1e-12:
        return "neutral"
    return "attracting" if mag < 1.0 else "repelling"


def classify_fixed(m: Mobius) -> FixedPointReport:
    """Fixed points with multipliers; exact where the discriminant allows.

    A single fixed point (parabolic map) is reported as neutral.  When c = 0
    the point at infinity is fixed with multiplier a/d inverted in the 1/z
    chart.
    """
    a, b, c, d = m.a, m.b, m.c, m.d
    if c.is_zero():
        # affine: z -> (a/d) z + b/d
        alpha = a / d
        if alpha == GQ(1):
            if (b / d).is_zero():
                return FixedPointReport([INF], [GQ(1)], ["neutral"], parabolic=True)
            return FixedPointReport([INF], [GQ(1)], ["neutral"], parabolic=True)
        z1 = (b / d) / (GQ(1) - alpha)
        lam1 = alpha
        lam_inf = GQ(1) / alpha
        return FixedPointReport(
            [z1, INF], [lam1, lam_inf], [_classify_mult(lam1), _classify_mult(lam_inf)]
        )
    # c z^2 + (d - a) z - b = 0
    disc = (d - a) * (d - a) + GQ(4) * b * c
    if disc.is_zero():
        z = (a - d) / (GQ(2) * c)
        return FixedPointReport([z], [GQ(1)], ["neutral"], parabolic=True)
    root = _gq_sqrt(disc)
    if root is not None:
        z1 = ((a - d) + root) / (GQ(2) * c)
        z2 = ((a - d) - root) / (GQ(2) * c)
        l1 = m.derivative_at(z1)
        l2 = m.derivative_at(z2)
        return FixedPointReport([z1, z2], [l1, l2], [_classify_mult(l1), _classify_mult(l2)])
    # irrational fixed points: classify in floats
    ac, bc, cc, dc = (complex(x) for x in (a, b, c, d))
    discc = complex(disc)
    rootc = discc ** 0.5
    det = ac * dc - bc * cc
    out_pts, out_mults, out_cls = [], [], []
    for sign in (1, -1):
        z = ((ac - dc) + sign * rootc) / (2 * cc)
        lam = det / (cc * z + dc) ** 2
        out_pts.append(z)
        out_mults.append(lam)
        mag = abs(lam)
        out_cls.append(
            "neutral" if abs(mag - 1) < 1e-12 else ("attracting" if mag < 1 else "repelling")
        )
    return FixedPointReport(out_pts, out_mults, out_cls)


# -- activity / exceptional classification ----------------------------------------


def classify_point(pair: RelPair, real_mode: bool = False) -> str:
    """One of "exceptional", "zero-witness", "active", "inactive".

    exceptional: R = -S (interactions degenerate there).
    zero-witness: R = 0 with S != 0 (yhat = 1).
    active: 1 < |yhat| < infinity and yhat non-real (real mode: yhat < -1).
    """
    R, S = pair.R, pair.S
    if (R + S).is_zero():
        return "exceptional"
    if R.is_zero():
        return "zero-witness"
    ip = interactions_of(pair)
    yh = ip.yhat
    if yh is INF:
        return "inactive"
    if real_mode:
        if yh.is_real() and yh.re < -1:
            return "active"
        return "inactive"
    if yh.is_real():
        return "inactive"
    if yh.norm2() > 1:
        return "active"
    return "inactive"


# -- closed forms -------------------------------------------------------------------


def closed_forms(yhat, n: int, m: int):
    """yhat of the n-fold series of the m-fold parallel of a gadget.

    Parallel multiplies yhat (exclusion: {0, INF} is indeterminate); series
    averages toward 1: (1/n) yhat + (n-1)/n.
    """
    if n < 1 or m < 1:
        raise ValueError("composition counts must be >= 1")
    if yhat is INF:
        par = INF
    elif yhat.is_zero() and m > 1:
        par = GQ(0)
    else:
        par = yhat ** m
    if par is INF:
        if n == 1:
            return INF
        return INF  # (1/n)*INF + (n-1)/n stays INF projectively
    return par / n + GQ(n - 1) / n


def yhat_parallel(a, b):
    """Pointwise product of virtual interactions; {0, INF} is excluded."""
    a_inf, b_inf = a is INF, b is INF
    if a_inf and b_inf:
        return INF
    if a_inf or b_inf:
        other = b if a_inf else a
        if other.is_zero():
            raise ArithmeticError("indeterminate parallel interaction 0 * INF")
        return INF
    return a * b


def y_series(a, b):
    """Pointwise series rule y1 + y2 - 1; doubly-infinite input is excluded."""
    if a is INF and b is INF:
        raise ArithmeticError("series interaction undefined when both inputs are INF")
    if a is INF or b is INF:
        return INF
    return a + b - GQ(1)


# -- pentagon template ----------------------------------------------------------------

# vertices s=0, 1, 2, 3, t=4; labels: group 1 and group 2 edges
_PENTAGON_A1 = [(0, 2), (0, 3), (1, 2), (1, 3), (2, 4), (3, 4)]
_PENTAGON_A2 = [(0, 1), (1, 4), (2, 3)]


def pentagon_template():
    """(two-terminal template, group-1 edge indices, group-2 edge indices)."""
    edges = _PENTAGON_A1 + _PENTAGON_A2
    g = TwoTerminal(Multigraph(5, edges), 0, 4)
    idx1 = list(range(len(_PENTAGON_A1)))
    idx2 = list(range(len(_PENTAGON_A1), len(edges)))
    return g, idx1, idx2


def pentagon_F(y1, y2):
    """Closed-form virtual interaction of the pentagon template.

    Group-1 edges carry a gadget with virtual interaction y1, group-2 edges
    one with y2; poles are reported projectively as INF.
    """
    y1 = _as_gq(y1)
    y2 = _as_gq(y2)
    num = (
        (y1 ** 5 + y1 ** 4 + y1 ** 3 + y1 ** 2 + y1 + 1) * y2 ** 3
        - GQ(2) * (y1 ** 2 + y1 + 1) * y2 ** 2
        - GQ(2) * y1 ** 2
        - (y1 ** 3 + y1 ** 2 + GQ(2) * y1 + 2) * y2
        + GQ(2) * y1
        + GQ(6)
    )
    den = GQ(2) * (
        (y1 ** 3 + y1 ** 2 + GQ(2) * y1 + 2) * y2 ** 2
        + (GQ(2) * y1 ** 2 - GQ(5) * y1 - 9) * y2
        - GQ(6) * y1
        + GQ(12)
    )
    if den.is_zero():
        return INF
    return num / den


def pentagon_F_pipeline(y1: GQ, y2: GQ):
    """Same value through substitute -> multivariate reliability -> interaction.

    Independent re-derivation of the closed form: each group-i edge gets
    failure parameter 1/y_i, and the template's multivariate virtual
    interaction is returned.
    """
    g, idx1, idx2 = pentagon_template()
    ps = [None] * g.m
    for i in idx1:
        ps[i] = GQ(1) / y1
    for i in idx2:
        ps[i] = GQ(1) / y2
    pair = eval_multivariate(g, ps)
    if pair.S.is_zero():
        return INF
    return pair.R / pair.S + GQ(1)


def pentagon_circle_sq(t: float) -> float:
    """|F(e^{it}, e^{-it})|^2 on the unit circle.

    Near t = 0 the raw quotient is 0/0 and loses digits to the 1 - cos(t)
    cancellation well before that; the factored form (with the common factor
    cancelled, as in the threshold analysis) takes over on that whole
    neighborhood.
    """
    c = math.cos(t)
    s = math.sin(t)
    if 1.0 - c < 1e-2:
        return (1.0 + c) * (9.0 - 8.0 * c * c) / (2.0 * (13.0 - 12.0 * c))
    num = 8.0 * s ** 4 + s ** 2
    den = 2.0 * (12.0 * c * c - 25.0 * c + 13.0)
    return num / den
