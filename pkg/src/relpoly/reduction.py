"""Desk-scale simulation of the approximation-to-exact reduction.

A simulated 0.25-oracle answers magnitude (abs mode) or argument (arg mode)
queries about reliability values, adversarially perturbed to the envelope
edge and arbitrary when the true value is zero.  compute_ratio recovers the
exact edge ratio R(F;p)/R(F-e;p) from such answers alone: targeted
interactions are constructed, the shifted linear form is probed, a
constraint sieve shrinks the region containing the ratio, and bounded-
denominator rational reconstruction pins it exactly.  telescope then chains
the ratios into R(F;p).

The oracle side of the simulation knows the exact reliabilities (it is
simulating the world); the recovery side sees only oracle answers, graph
connectivity, and the constructor.
"""

from __future__ import annotations

import math
from hashlib import blake2b

import mpmath
from gmpy2 import mpq

from .constructor import CoverCertificate, construct_point, precompute
from .gaussian import GQ
from .graphs import Multigraph, TwoTerminal, realize, substitute
from .polynomials import AlgebraicBound, parameter_height_data, reconstruct_real
from .reliability import eval_delcon, eval_sp, eval_weighted, pair_of

__all__ = [
    "ApproxOracle",
    "RatioAnswer",
    "simulated_oracle",
    "shifted_eval",
    "height_bound",
    "delta_bound",
    "direct_bounds",
    "box_shrink",
    "compute_ratio",
    "telescope",
    "reduce_graph",
    "BoxShrinkError",
]

_HASH_PRIME = 2**61 - 1


class BoxShrinkError(RuntimeError):
    """Envelope-inconsistent answers or an exhausted query budget."""


class RatioAnswer:
    __slots__ = ("r", "b")

    def __init__(self, r: GQ, b: int):
        self.r = r
        self.b = b

    def __repr__(self):
        return f"RatioAnswer(r={self.r!s}, b={self.b})"


# -- the simulated oracle ---------------------------------------------------------


def _value_hash(v: GQ, seed: int, mode: str) -> int:
    key = (
        int(v.re.numerator) % _HASH_PRIME,
        int(v.re.denominator) % _HASH_PRIME,
        int(v.im.numerator) % _HASH_PRIME,
        int(v.im.denominator) % _HASH_PRIME,
        seed,
        mode,
    )
    return int.from_bytes(blake2b(repr(key).encode(), digest_size=8).digest(), "big")


def _abs_mpf(v: GQ, prec: int = 80):
    with mpmath.workprec(prec):
        n2 = v.norm2()
        return mpmath.sqrt(mpmath.mpf(n2.numerator) / mpmath.mpf(n2.denominator))


def _arg_float(v: GQ, prec: int = 80) -> float:
    with mpmath.workprec(prec):
        re = mpmath.mpf(v.re.numerator) / mpmath.mpf(v.re.denominator)
        im = mpmath.mpf(v.im.numerator) / mpmath.mpf(v.im.denominator)
        return float(mpmath.atan2(im, re))


class ApproxOracle:
    """Adversarial 0.25-approximation oracle over a fixed parameter.

    abs mode answers are e^{+-envelope} multiples of |R(H;p)| (worst-case
    rounding, the sign seeded per queried value); arg answers are shifted by
    +-envelope.  A true value of zero yields an arbitrary seeded answer.
    """

    def __init__(self, p: GQ, mode: str, seed: int, envelope: float = 0.25, edge_cap: int = 10**6):
        if mode not in ("abs", "arg"):
            raise ValueError("mode must be abs or arg")
        self.p = p
        self.mode = mode
        self.seed = seed
        self.envelope = envelope
        self.edge_cap = edge_cap

    def exact_value(self, H: Multigraph) -> GQ:
        if H.m > self.edge_cap:
            raise ValueError("graph exceeds the oracle's evaluation cap")
        return eval_weighted(H.n, [(u, v, self.p) for u, v in H.edges])

    def answer(self, H: Multigraph):
        """Oracle response for a literal multigraph."""
        return self.answer_value(self.exact_value(H))

    def answer_value(self, v: GQ):
        h = _value_hash(v, self.seed, self.mode)
        if v.is_zero():
            # an approximation of 0 can be anything
            if self.mode == "abs":
                return mpmath.mpf(math.exp((h % 4001) / 100.0 - 20.0))
            return (h % 6283) / 1000.0 - math.pi
        if self.mode == "abs":
            eta = self.envelope if h & 1 else -self.envelope
            return _abs_mpf(v) * mpmath.mpf(math.exp(eta))
        eta = self.envelope if h & 1 else -self.envelope
        ang = _arg_float(v) + eta
        return math.atan2(math.sin(ang), math.cos(ang))


def simulated_oracle(p: GQ, mode: str, seed: int, envelope: float = 0.25) -> ApproxOracle:
    if p == GQ(0) or p == GQ(1):
        raise ValueError("p in {0,1} is excluded")
    return ApproxOracle(p, mode, seed, envelope)


def shifted_eval(H, e_idx: int, g_expr, pair_g, oracle: ApproxOracle, g0: TwoTerminal):
    """Adjusted oracle answer for the shifted linear form.

    Substitutes the gadget into edge e, asks the oracle once about the
    substituted graph, and multiplies by the exact (1-p)/R(G;p) factor, so
    the result 0.25-approximates R(H;p) + (y_G - (p+1)) R(H minus e;p).
    """
    if pair_g.R.is_zero():
        raise ValueError("gadget reliability must be nonzero")
    graph = H.graph if isinstance(H, TwoTerminal) else H
    sub = substitute(graph, {e_idx: realize(g_expr, g0)})
    raw = oracle.answer(sub if isinstance(sub, Multigraph) else sub.graph)
    p = oracle.p
    factor = (GQ(1) - p) / pair_g.R
    if oracle.mode == "abs":
        return raw * _abs_mpf(factor)
    ang = raw + _arg_float(factor)
    return math.atan2(math.sin(ang), math.cos(ang))


class LinearForm:
    """Simulation-side harness for one (host, edge): serves adjusted answers.

    Knows the exact A = R(F-e;p) and B = R(F;p) (the oracle side may), and
    answers queries at exact constructed interaction points without
    materializing the substituted graph: the |R(G;p)| factor cancels against
    the shifted-evaluation adjustment, so the answer depends only on the
    linear form's exact value at the queried point.
    """

    def __init__(self, F: Multigraph, e_idx: int, oracle: ApproxOracle):
        self.oracle = oracle
        p = oracle.p
        u, v = F.edges[e_idx]
        if u == v:
            raise ValueError("loop edges are handled before linear queries")
        self.B = eval_delcon(F, p)
        deleted = Multigraph(F.n, [e for i, e in enumerate(F.edges) if i != e_idx])
        self.A = eval_delcon(deleted, p)
        self.queries = 0

    def query(self, x: GQ):
        """Adjusted oracle answer approximating |A x + B| (abs) or its arg."""
        self.queries += 1
        v = self.A * x + self.B
        return self.oracle.answer_value(v)


# -- bounds -----------------------------------------------------------------------


def height_bound(m: int, p: GQ) -> AlgebraicBound:
    """Lemma-style magnitude bound: C = ceil(exp(d m (log 4 + h(p)))).

    Computed exactly: with h(p) = (1/2) log W for the exact rational W, the
    bound is 4^{dm} W^{dm/2}, an exact rational power.
    """
    d, W = parameter_height_data(p)
    e2 = d * m  # exponent of 4 is d*m; exponent of W is d*m/2
    val = mpq(4) ** e2 * _rat_pow_half(W, e2)
    C = int(math.ceil(val)) if val == int(val) else int(val) + 1
    if C <= 1:
        C = 2
    return AlgebraicBound(d, W, C)


def _rat_pow_half(W: mpq, e2: int) -> mpq:
    """W^(e2/2) as an exact rational when possible, else rounded up safely."""
    from gmpy2 import is_square, isqrt

    if e2 % 2 == 0:
        return W ** (e2 // 2)
    base = W ** ((e2 - 1) // 2)
    if is_square(W.numerator) and is_square(W.denominator):
        return base * mpq(isqrt(W.numerator), isqrt(W.denominator))
    # multiply by an upper bound on sqrt(W)
    f = math.sqrt(float(W)) * (1 + 1e-9)
    up = mpq(f)
    while up * up < W:
        up *= mpq(2**20 + 1, 2**20)
    return base * up


def delta_bound(ab: AlgebraicBound) -> mpq:
    """delta = exp(-(d^2+5d)) C^-2, the box accuracy of the ratio pipeline."""
    d = ab.degree
    f = math.exp(-(d * d + 5 * d)) * (1 - 1e-9)
    return mpq(f) / (mpq(ab.C) * ab.C)


def direct_bounds(m: int, p: GQ):
    """(Cd, den_bound) for Gaussian-rational p: |ratio| <= Cd and both
    coordinate denominators divide |A b^m|^2 <= den_bound (den_bound = Cd
    itself when p is real, since the scaled values are plain integers)."""
    b = int(p.re.denominator)
    bi = int(p.im.denominator)
    b = b * bi // math.gcd(b, bi)
    mag = math.sqrt(float(p.norm2())) + math.sqrt(float((GQ(1) - p).norm2()))
    Cd = int(math.ceil((b * mag * (1 + 1e-12)) ** m)) + 1
    den = Cd if p.is_real() else Cd * Cd
    return Cd, den


# -- region sieve ------------------------------------------------------------------


class _Cells:
    """Dyadic quadtree region (intervals when 1-D) with lossless coalescing.

    Cells are (level, ix, iy) over the root box [-S, S]^dim; splitting and
    sibling-merging are exact in integer coordinates, so repeated refinement
    never drifts or double-counts.
    """

    def __init__(self, S: float, real_mode: bool, cap: int = 900):
        self.S = S
        self.real = real_mode
        self.cap = cap
        self.cells = {(0, 0, 0)}

    def empty(self) -> bool:
        return not self.cells

    def _rect(self, cell):
        l, ix, iy = cell
        w = 2.0 * self.S / (1 << l)
        x0 = -self.S + ix * w
        if self.real:
            return x0, x0 + w, 0.0, 0.0
        y0 = -self.S + iy * w
        return x0, x0 + w, y0, y0 + w

    def bbox(self):
        rects = [self._rect(c) for c in self.cells]
        x0 = min(r[0] for r in rects)
        x1 = max(r[1] for r in rects)
        if self.real:
            return x0, x1, 0.0, 0.0
        y0 = min(r[2] for r in rects)
        y1 = max(r[3] for r in rects)
        return x0, x1, y0, y1

    def diam(self) -> float:
        if self.empty():
            return 0.0
        x0, x1, y0, y1 = self.bbox()
        return max(x1 - x0, y1 - y0)

    def area(self) -> float:
        dim = 1 if self.real else 2
        return sum((2.0 * self.S / (1 << c[0])) ** dim for c in self.cells)

    def largest_center(self):
        c = min(self.cells, key=lambda c: (c[0], c[1], c[2]))
        x0, x1, y0, y1 = self._rect(c)
        return (x0 + x1) / 2, (y0 + y1) / 2, (x1 - x0) / 2

    def refine(self, min_width: float):
        """Split every cell wider than min_width (full levels, cap-guarded)."""
        changed = True
        while changed and len(self.cells) < self.cap:
            changed = False
            for cell in list(self.cells):
                l, ix, iy = cell
                w = 2.0 * self.S / (1 << l)
                if w <= min_width * 1.0001:
                    continue
                self.cells.discard(cell)
                if self.real:
                    self.cells.add((l + 1, 2 * ix, 0))
                    self.cells.add((l + 1, 2 * ix + 1, 0))
                else:
                    for dx in (0, 1):
                        for dy in (0, 1):
                            self.cells.add((l + 1, 2 * ix + dx, 2 * iy + dy))
                changed = True
                if len(self.cells) >= self.cap:
                    break

    def apply(self, classify):
        kills = [c for c in self.cells if classify(self._cell_geom(c)) == "kill"]
        for c in kills:
            self.cells.discard(c)

    def _cell_geom(self, cell):
        x0, x1, y0, y1 = self._rect(cell)
        half = (x1 - x0) / 2
        return ((x0 + x1) / 2, (y0 + y1) / 2, half)

    def coalesce(self):
        """Merge complete sibling groups into their parent (lossless)."""
        merged = True
        while merged:
            merged = False
            parents = {}
            for (l, ix, iy) in self.cells:
                if l == 0:
                    continue
                parents.setdefault((l - 1, ix // 2, iy // 2), []).append((l, ix, iy))
            need = 2 if self.real else 4
            for parent, kids in parents.items():
                if len(kids) == need:
                    for k in kids:
                        self.cells.discard(k)
                    self.cells.add(parent)
                    merged = True


def _cell_dist_range(cell, zf, real_mode):
    """(min, max) distance from a point to an axis cell (exactly in floats)."""
    cx, cy, h = cell
    if real_mode:
        dx = max(abs(zf.real - cx) - h, 0.0)
        dmax = abs(zf.real - cx) + h
        return dx, dmax
    dx = max(abs(zf.real - cx) - h, 0.0)
    dy = max(abs(zf.imag - cy) - h, 0.0)
    dmin = math.hypot(dx, dy)
    dmax = math.hypot(abs(zf.real - cx) + h, abs(zf.imag - cy) + h)
    return dmin, dmax


def _circ(a: float) -> float:
    """Wrap an angle difference into (-pi, pi]."""
    return math.atan2(math.sin(a), math.cos(a))


class _Probe:
    __slots__ = ("x", "xf", "ans")

    def __init__(self, x: GQ, ans, anchor: GQ):
        self.x = x
        self.xf = complex(x - anchor)
        self.ans = ans


def box_shrink(
    linear_query,
    delta,
    C: int,
    mode: str = "abs",
    real_mode: bool = False,
    x_bound: int | None = None,
    max_queries: int = 30000,
    trace: dict | None = None,
):
    """Locate x* = -B/A from 0.25-approximate answers to |A x + B| queries.

    linear_query(y0, eps) -> (x, answer) with x the exact constructed point
    within eps of y0.  Returns ("A=0", None) or ("A!=0", y: GQ) with
    x* in B_inf(y, delta/2).

    Geometry runs in float coordinates relative to an exact anchor that
    re-centers as the region shrinks (exact subtraction happens before the
    float conversion, so arbitrarily deep zooms stay sharp).  The sieve is
    conservative: honest answers keep x* alive; a poisoned answer (query
    value exactly zero, possible only when the constructed point coincides
    with x*) is excused by the final consistency pass over all probes.
    """
    delta_f = float(delta)
    Cd = x_bound if x_bound is not None else C
    ENV = 0.2501  # envelope with a hair of slack for mpf->float conversions
    probes: list[_Probe] = []
    qcount = [0]
    anchor = GQ(0)
    seen_points: set = set()

    def ask(y0: GQ, eps, required: bool = True):
        # a repeated probe point carries no new information (the oracle is
        # deterministic), so force fresh points by tightening the accuracy
        # and nudging the target at the original scale
        eps0 = mpq(eps)
        eps = eps0
        nudges = [
            GQ(0),
            GQ(eps0 / 3),
            GQ(-eps0 / 2) if real_mode else GQ(0, eps0 / 2),
            GQ(2 * eps0 / 3) if real_mode else GQ(-eps0 / 2, eps0 / 3),
            GQ(-eps0) if real_mode else GQ(eps0 / 2, -eps0 / 2),
        ]
        for attempt in range(5):
            if qcount[0] >= max_queries:
                raise BoxShrinkError("query budget exhausted")
            qcount[0] += 1
            x, ans = linear_query(y0 + nudges[attempt], eps)
            if x not in seen_points:
                seen_points.add(x)
                pr = _Probe(x, ans, anchor)
                probes.append(pr)
                return pr
            eps = eps / 64
        if required:
            raise BoxShrinkError("could not obtain a fresh probe point")
        return None

    def snap_abs(xf: float, yf: float, scale: float) -> GQ:
        """Anchor + dyadic offset, never exactly zero (relative coords in)."""
        from fractions import Fraction

        k = max(0, int(-math.log2(max(scale, 1e-300))) + 8)
        den = 2**k
        re = mpq(round(xf * den), den) + mpq(Fraction(0))
        im = mpq(0) if real_mode else mpq(round(yf * den), den)
        out = anchor + GQ(re, im)
        if out.is_zero():
            out = out + GQ(mpq(1, den * 4))
        return out

    # -- far calibration probe: certified |A| interval (abs), arg reference (arg)
    far = ask(GQ(3 * Cd), mpq(Cd))
    state = {"ref": far, "dist_lo": abs(far.xf) - Cd, "dist_hi": abs(far.xf) + Cd}

    def a_bounds():
        q = state["ref"].ans
        aub = float(q) * math.exp(ENV) / state["dist_lo"]
        alb = float(q) * math.exp(-ENV) / state["dist_hi"]
        return alb, aub

    # -- arg mode: one-shot A = 0 test from opposing far bearings
    if mode == "arg":
        left = ask(GQ(-3 * Cd), mpq(Cd))
        d = abs(_circ(far.ans - left.ans))
        if d < math.pi / 2 - 0.02:
            outcome = _consistent_outcome(probes, mode, None, delta_f)
            if trace is not None:
                trace.update(queries=qcount[0], outcome="A=0")
            if outcome is None:
                return ("A=0", None)
            return ("A!=0", outcome)

    region = _Cells(float(Cd) * 1.0001, real_mode)
    frame = float(Cd)
    stall = 0
    round_idx = 0
    prev_area = region.area()
    while True:
        diam = region.diam()
        if region.empty():
            cand = _consistent_outcome(probes, mode, None, delta_f)
            if trace is not None:
                trace.update(queries=qcount[0], outcome="A=0" if cand is None else "excused")
            return ("A=0", None) if cand is None else ("A!=0", cand)
        if diam <= delta_f / 2 or (diam < delta_f and stall > 4):
            break
        # re-anchor long before float resolution runs out
        if diam <= frame * 1e-6 and diam > 0:
            from fractions import Fraction

            x0c, x1c, y0c, y1c = region.bbox()
            shift = GQ(
                mpq(Fraction((x0c + x1c) / 2)),
                mpq(0) if real_mode else mpq(Fraction((y0c + y1c) / 2)),
            )
            anchor = anchor + shift
            for pr in probes:
                pr.xf = complex(pr.x - anchor)
            frame = diam * 0.7501
            region = _Cells(frame, real_mode)
            stall = 0
            prev_area = region.area()
            state["dist_lo"] = max(state["dist_lo"] - diam, state["dist_lo"] * 0.5)
            continue
        # recalibrate once the region is far smaller than the reference range
        if mode == "abs" and diam > 0 and diam < state["dist_lo"] / 400.0:
            x0c, x1c, y0c, y1c = region.bbox()
            ctr = complex((x0c + x1c) / 2, (y0c + y1c) / 2)
            d_new = max(64.0 * diam, delta_f * 16)
            tgt = snap_abs(ctr.real + d_new, ctr.imag, d_new / 64)
            pr = ask(tgt, mpq(max(d_new / 64, delta_f / 64)))
            rad = math.hypot(x1c - x0c, y1c - y0c) / 2
            state.update(
                ref=pr,
                dist_lo=max(abs(pr.xf - ctr) - rad, 1e-300),
                dist_hi=abs(pr.xf - ctr) + rad,
            )
        # probe cell centers, rotating among the coarsest cells so that a
        # fruitless ring does not pin the sieve to one point
        cells_sorted = sorted(region.cells)[:8]
        cell = cells_sorted[round_idx % len(cells_sorted)]
        cx, cy, h = region._cell_geom(cell)
        round_idx += 1
        eps_q = max(diam / 32.0, delta_f / 64.0)
        pr = ask(snap_abs(cx, cy, eps_q), eps_q, required=False)
        if pr is None:
            stall += 1
            if stall > 40:
                raise BoxShrinkError(
                    f"no fresh probes at diameter {diam:.3e} after {qcount[0]} queries"
                )
            continue
        if mode == "abs":
            alb, aub = a_bounds()
            rlo = float(pr.ans) * math.exp(-ENV) / aub
            rhi = float(pr.ans) * math.exp(ENV) / alb

            def classify(cell, pr=pr, rlo=rlo, rhi=rhi):
                dmin, dmax = _cell_dist_range(cell, pr.xf, real_mode)
                if dmax < rlo * (1 - 1e-9):
                    return "kill"
                if dmin > rhi * (1 + 1e-9):
                    return "kill"
                return "keep"

            ring_w = max(rhi - rlo, delta_f / 8)
            region.refine(max(min(ring_w / 4, diam / 16), delta_f / 8))
            region.apply(classify)
        else:
            ref = state["ref"]
            dhat = _circ(pr.ans - ref.ans)

            def classify(cell, pr=pr, ref=ref, dhat=dhat):
                return _arg_classify(cell, pr, ref, dhat, real_mode)

            region.refine(max(diam / 16, delta_f / 8))
            region.apply(classify)
        region.coalesce()
        area = region.area()
        stall = stall + 1 if area > prev_area * 0.8 else 0
        prev_area = area
        if stall > 40:
            raise BoxShrinkError(
                f"region stopped shrinking at diameter {region.diam():.3e} "
                f"after {qcount[0]} queries"
            )
    from fractions import Fraction

    x0c, x1c, y0c, y1c = region.bbox()
    center = complex((x0c + x1c) / 2, (y0c + y1c) / 2)
    cand = _consistent_outcome(probes, mode, center, delta_f)
    if cand is None:
        raise BoxShrinkError("final candidate inconsistent with stored answers")
    if cand == "center":
        cand = anchor + GQ(
            mpq(Fraction(center.real)),
            mpq(0) if real_mode else mpq(Fraction(center.imag)),
        )
    if trace is not None:
        trace.update(queries=qcount[0], outcome="A!=0")
    return ("A!=0", cand)


def _arg_classify(cell, pr: _Probe, ref: _Probe, dhat: float, real_mode: bool) -> str:
    """Kill the cell when arg((x_i - x)/(x_ref - x)) provably misses the band.

    Conservative: keeps the cell when the probe or reference lies inside or
    the principal-value branch may wrap across it.
    """
    cx, cy, h = cell
    corners = (
        [(cx - h, 0.0), (cx + h, 0.0)]
        if real_mode
        else [(cx - h, cy - h), (cx - h, cy + h), (cx + h, cy - h), (cx + h, cy + h), (cx, cy)]
    )
    dmin_p, _ = _cell_dist_range(cell, pr.xf, real_mode)
    dmin_r, _ = _cell_dist_range(cell, ref.xf, real_mode)
    if dmin_p <= 0 or dmin_r <= 0:
        return "keep"
    grad = (1.0 / dmin_p + 1.0 / dmin_r) * h * (2.0 if not real_mode else 1.0)
    phis = []
    for (px, py) in corners:
        z = complex(px, py)
        val = (pr.xf - z) / (ref.xf - z)
        phis.append(_circ(math.atan2(val.imag, val.real) - dhat))
    if max(phis) - min(phis) > math.pi:
        return "keep"  # possible branch wrap across the cell
    lo = min(phis) - grad
    hi = max(phis) + grad
    band = 0.502
    if hi < -band or lo > band:
        return "kill"
    return "keep"


def _consistent_outcome(probes, mode: str, center, delta: float = 0.0):
    """Candidate x* consistent with every stored probe (relative coords).

    Probes within 64*delta of the candidate are excused: the candidate's own
    box uncertainty makes them unadjudicable, and that ball also contains
    the only possible poisoned probe (one whose point coincides with x*).
    Tries the region center first (returns "center"), then each probe point
    itself (returns its exact GQ), else None.
    """

    def consistent(xc, excuse=None) -> bool:
        lo = None
        hi = None
        ref_arg = None
        near = 64.0 * delta
        for pr in probes:
            if excuse is not None and pr is excuse:
                continue
            d = abs(pr.xf - xc)
            if d <= near:
                continue
            if mode == "abs":
                scale = float(pr.ans) / d
                lo = scale if lo is None else min(lo, scale)
                hi = scale if hi is None else max(hi, scale)
            else:
                rel = _circ(pr.ans - math.atan2((pr.xf - xc).imag, (pr.xf - xc).real))
                if ref_arg is None:
                    ref_arg = rel
                elif abs(_circ(rel - ref_arg)) > 0.53 * 2:
                    return False
        if mode == "abs" and lo is not None and hi > lo * math.exp(2 * 0.2501) * 1.03:
            return False
        return True

    if center is not None and consistent(center):
        return "center"
    winners = []
    for pr in probes:
        if consistent(pr.xf, excuse=pr):
            winners.append(pr)
    if len(winners) == 1:
        return winners[0].x
    return None


# -- ratio recovery and telescoping ---------------------------------------------------


def compute_ratio(
    F: Multigraph,
    e_idx: int,
    oracle: ApproxOracle,
    cert: CoverCertificate,
    trace: dict | None = None,
) -> RatioAnswer:
    """Exact ratio answer for one edge, per the three-case output contract."""
    p = oracle.p
    u, v = F.edges[e_idx]
    if u == v:
        # a loop never affects reliability: R(F) = R(F-e)
        return RatioAnswer(GQ(1), 1)
    deleted = Multigraph(F.n, [e for i, e in enumerate(F.edges) if i != e_idx])
    if not deleted.is_connected():
        # R(F-e;p) = 0 structurally; contraction is the right move
        return RatioAnswer(GQ(1) - p, 0)
    lf = LinearForm(F, e_idx, oracle)
    m = F.m
    ab = height_bound(m, p)
    Cd, den_bound = direct_bounds(m, p)
    delta = mpq(1, 4 * den_bound * den_bound)
    paper_delta = delta_bound(ab)
    if paper_delta < delta:
        # the paper's delta serves the replaced minimal-polynomial recovery;
        # reconstruction at the direct denominator bound needs only `delta`
        pass

    def linear_query(y0: GQ, eps):
        x = construct_point(cert, y0, eps)
        return x, lf.query(x)

    outcome, payload = box_shrink(
        linear_query,
        delta,
        ab.C,
        mode=oracle.mode,
        real_mode=cert.real_mode and p.is_real(),
        x_bound=Cd,
        trace=trace,
    )
    if trace is not None:
        trace["oracle_queries"] = lf.queries
    if outcome == "A=0":
        return RatioAnswer(GQ(1) - p, 0)
    re = reconstruct_real(payload.re, den_bound)
    im = mpq(0) if payload.im == 0 else reconstruct_real(payload.im, den_bound)
    xstar = GQ(re, im)
    return RatioAnswer(-xstar, 1)


def _to_fraction(x: float):
    from fractions import Fraction

    return Fraction(x)


def _contract_multigraph(g: Multigraph, e_idx: int) -> Multigraph:
    u, v = g.edges[e_idx]
    lo, hi = (u, v) if u < v else (v, u)

    def relabel(x):
        if x == hi:
            x = lo
        return x - 1 if x > hi else x

    edges = [
        (relabel(a), relabel(b))
        for i, (a, b) in enumerate(g.edges)
        if i != e_idx
    ]
    return Multigraph(g.n - 1, edges)


def telescope(F: Multigraph, ratio_fn, p: GQ):
    """R(F;p) as c * prod r_i over a delete/contract chain to an edgeless graph."""
    g = F
    prod = GQ(1)
    steps = []
    while g.m:
        ans = ratio_fn(g, 0)
        steps.append((g.edges[0], ans.r, ans.b))
        if ans.b == 1:
            g = Multigraph(g.n, g.edges[1:])
        else:
            g = _contract_multigraph(g, 0)
        prod = prod * ans.r
    c = GQ(1) if g.n == 1 else GQ(0)
    return c * prod, steps


def reduce_graph(F: Multigraph, p: GQ, mode: str, seed: int, cert: CoverCertificate | None = None):
    """Full pipeline: simulated oracle -> per-edge ratios -> exact R(F;p)."""
    oracle = simulated_oracle(p, mode, seed)
    if cert is None:
        from .graphs import K2

        cert = precompute(K2, p)
    traces = []

    def ratio_fn(g, e_idx):
        tr: dict = {}
        ans = compute_ratio(g, e_idx, oracle, cert, trace=tr)
        traces.append(tr)
        return ans

    value, steps = telescope(F, ratio_fn, p)
    return {"R": value, "steps": steps, "traces": traces}
