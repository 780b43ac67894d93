"""Locus sampling and certification: activity scans, the zero atlas,
roots-of-unity certificates, and the unit-circle threshold constant.

The atlas enumerates series-parallel expressions by leaf count with
deduplication on the exact (R, S) polynomial pair (the loci only depend on
those), and reports every zero with a verified residual.  Unity certificates
re-run the appendix computation natively: exact symbolic R, exact gcd, and
interval-certified |yhat| > 1 at e^{2 pi i/k}.
"""

from __future__ import annotations

import math

import mpmath
import numpy as np
from gmpy2 import mpq

from .bigcomplex import CIv
from .gaussian import GQ
from .graphs import K2, Multigraph, SPExpr, TwoTerminal, merge_terminals, parse_sp
from .interactions import classify_point, interactions_of
from .polynomials import RatPoly, poly_gcd
from .reliability import RelPair, brute_force, eval_delcon_symbolic, eval_sp, symbolic

__all__ = [
    "LocusSample",
    "grid_points",
    "UnityCertificate",
    "ATLAS_CONFIG",
    "UNITY_MATRICES",
    "unity_graph",
    "activity_scan",
    "zero_atlas",
    "atlas_coverage",
    "verify_unity",
    "unit_threshold",
]

# Desk-scale proxy configuration for the density claim; these are artifact
# choices, not paper claims.
ATLAS_CONFIG = {
    "max_leaves": 14,
    "grid": 20,
    "exclusion_distance": 0.1,
    "coverage_threshold": 0.8,
    "cell_rule": "center in closed unit disk, distance(center, [0,1]) >= exclusion",
}


class LocusSample:
    __slots__ = ("point", "classification", "witness", "witness_value", "residual")

    def __init__(self, point, classification, witness=None, witness_value=None, residual=None):
        self.point = point
        self.classification = classification
        self.witness = witness
        self.witness_value = witness_value
        self.residual = residual

    def __repr__(self):
        return f"LocusSample({self.point!r}, {self.classification!r}, witness={self.witness!s})"

    def to_row(self):
        """CSV row: re, im, class, witness, residual."""
        if isinstance(self.point, GQ):
            re, im = float(self.point.re), float(self.point.im)
        else:
            z = complex(self.point)
            re, im = z.real, z.imag
        wit = str(self.witness) if self.witness is not None else ""
        res = repr(float(self.residual)) if self.residual is not None else ""
        return [repr(re), repr(im), self.classification, wit, res]


# -- activity scan ---------------------------------------------------------------


def _word_stream(limit: int):
    """SP expressions by nondecreasing leaf count, deduplicated structurally.

    Includes the targeted (e^{|n})^{*m} family early: those drive the density
    argument, so they make good witnesses cheap.
    """
    yielded = 0
    e = SPExpr.leaf()
    for n in range(1, 7):
        for m in range(1, 7):
            par = e if n == 1 else SPExpr.parallel(*[e] * n)
            expr = par if m == 1 else SPExpr.series(*[par] * m)
            yield expr
            yielded += 1
            if yielded >= limit:
                return
    levels = {1: [e]}
    seen = {e}
    size = 2
    while True:
        cur = []
        for i in range(1, size // 2 + 1):
            j = size - i
            for a in levels[i]:
                for b in levels[j]:
                    for expr in (SPExpr.series(a, b), SPExpr.parallel(a, b)):
                        if expr not in seen:
                            seen.add(expr)
                            cur.append(expr)
                            yield expr
                            yielded += 1
                            if yielded >= limit:
                                return
        levels[size] = cur
        size += 1


def grid_points(region, grid: int, real_mode: bool = False):
    """Exact Gaussian-rational cell centers of a grid over the region."""
    re0, re1, im0, im1 = region
    points = []
    for i in range(grid):
        for j in range(grid):
            re = mpq(re0) + (mpq(re1) - mpq(re0)) * mpq(2 * i + 1, 2 * grid)
            im = mpq(im0) + (mpq(im1) - mpq(im0)) * mpq(2 * j + 1, 2 * grid)
            points.append(GQ(re, im if not real_mode else 0))
    return points


def activity_scan(
    g0: TwoTerminal,
    region=(-1.5, 1.5, -1.5, 1.5),
    grid: int = 8,
    budget: int = 2000,
    real_mode: bool = False,
    points=None,
) -> list[LocusSample]:
    """Search composition words of g0 for activity witnesses on a grid.

    Grid points are exact Gaussian rationals, so exceptional points (R = -S)
    are flagged exactly.  "inactive-at-budget" is not a certificate of
    inactivity: the word budget is a heuristic cutoff.
    """
    if budget > 10**4:
        raise ValueError("word budget capped at 10^4 per point")
    if points is None:
        points = grid_points(region, grid, real_mode)
    out = []
    for p in points:
        if p == GQ(0) or p == GQ(1):
            out.append(LocusSample(p, "inactive-at-budget"))
            continue
        base_pair = brute_force(g0, p)
        if (base_pair.R + base_pair.S).is_zero():
            out.append(LocusSample(p, "exceptional"))
            continue
        found = None
        for expr in _word_stream(budget):
            pair = eval_sp(expr, base_pair)
            if pair.R.is_zero() and pair.S.is_zero():
                continue
            cls = classify_point(pair, real_mode=real_mode)
            if cls == "active":
                # re-verify from scratch before trusting the witness
                chk = eval_sp(expr, brute_force(g0, p))
                assert classify_point(chk, real_mode=real_mode) == "active"
                found = LocusSample(p, "active", witness=expr, witness_value=interactions_of(pair).yhat)
                break
            if cls == "zero-witness" and found is None:
                found = LocusSample(p, "zero-witness", witness=expr)
                break
        out.append(found if found is not None else LocusSample(p, "inactive-at-budget"))
    return out


# -- zero atlas --------------------------------------------------------------------


def _pair_levels(base: TwoTerminal, max_leaves: int):
    """(R, S) integer polynomial pairs by leaf count, deduplicated.

    Stored as int64 numpy arrays; coefficients stay below 4^max_leaves, far
    inside int64 for the atlas cap.
    """
    sym_R = eval_delcon_symbolic(base.graph)
    sym_S = symbolic(base).S
    den = 1
    for c in list(sym_R.coeffs) + list(sym_S.coeffs):
        den = den * c.denominator // math.gcd(den, int(c.denominator))
    bR = np.array([int(c * den) for c in sym_R.coeffs], dtype=np.int64)
    bS = np.zeros(max(len(sym_S.coeffs), 1), dtype=np.int64)
    for k, c in enumerate(sym_S.coeffs):
        bS[k] = int(c * den)

    def key(R, S):
        return (R.tobytes(), S.tobytes())

    def padded_add(a, b):
        n = max(len(a), len(b))
        out = np.zeros(n, dtype=np.int64)
        out[: len(a)] += a
        out[: len(b)] += b
        return out

    def padded_sub(a, b):
        n = max(len(a), len(b))
        out = np.zeros(n, dtype=np.int64)
        out[: len(a)] += a
        out[: len(b)] -= b
        return out

    levels = {1: {key(bR, bS): (bR, bS)}}
    for n in range(2, max_leaves + 1):
        cur = {}
        for i in range(1, n // 2 + 1):
            j = n - i
            for R1, S1 in levels[i].values():
                T1 = padded_add(R1, S1)
                for R2, S2 in levels[j].values():
                    Rs = np.convolve(R1, R2)
                    Ss = padded_add(np.convolve(R1, S2), np.convolve(R2, S1))
                    cur[key(Rs, Ss)] = (Rs, Ss)
                    Sp = np.convolve(S1, S2)
                    Rp = padded_sub(np.convolve(T1, padded_add(R2, S2)), Sp)
                    cur[key(Rp, Sp)] = (Rp, Sp)
        levels[n] = cur
    return levels


def _deflate_unit_root(coeffs: np.ndarray):
    """Divide by (p - 1) while the coefficient sum vanishes (root at 1)."""
    ia = coeffs
    k = 0
    while len(ia) > 1 and int(ia.sum()) == 0:
        desc = ia[::-1]
        out = np.empty(len(desc) - 1, dtype=np.int64)
        acc = 0
        for idx in range(len(desc) - 1):
            acc += int(desc[idx])
            out[idx] = acc
        ia = out[::-1].copy()
        k += 1
    return ia, k


def zero_atlas(base: TwoTerminal = K2, max_leaves: int = 14, precision: int = 40):
    """All reliability zeros of SP compositions of the base, with residuals.

    Returns (samples, stats).  Each sample is a LocusSample classified
    "zero" whose residual is the verified |R(z)| at the reported point.
    """
    if max_leaves > 16:
        raise ValueError("atlas enumeration capped at 16 leaves")
    levels = _pair_levels(base, max_leaves)
    r_polys = {}
    for lvl in levels.values():
        for R, _ in lvl.values():
            r_polys.setdefault(R.tobytes(), R)
    samples = []
    target_scale = 2.0 ** (-precision / 2)
    for arr in r_polys.values():
        deflated, mult1 = _deflate_unit_root(arr)
        if len(deflated) <= 1:
            continue
        roots = np.roots(deflated[::-1].astype(np.float64))
        if precision > 40:
            roots = _polish(deflated, roots, precision)
        # residuals on the deflated polynomial, scaled by its length
        length = float(np.abs(deflated).sum())
        vals = np.polyval(deflated[::-1].astype(np.float64), roots)
        for z, v in zip(roots, vals):
            res = abs(v)
            if res <= target_scale * length:
                samples.append(LocusSample(complex(z), "zero", residual=res))
    stats = {
        "pairs": sum(len(l) for l in levels.values()),
        "distinct_R": len(r_polys),
        "zeros": len(samples),
        "max_leaves": max_leaves,
        "precision": precision,
    }
    return samples, stats


def _polish(coeffs: np.ndarray, roots, precision: int):
    """Newton polish at doubled working precision via mpmath."""
    desc = [int(c) for c in coeffs[::-1]]
    dcoeffs = [c * k for k, c in enumerate(coeffs.tolist())][1:]
    ddesc = [int(c) for c in dcoeffs[::-1]]
    out = []
    with mpmath.workprec(2 * precision + 20):
        for z in roots:
            zz = mpmath.mpc(complex(z))
            for _ in range(6):
                fv = mpmath.polyval(desc, zz)
                dv = mpmath.polyval(ddesc, zz)
                if dv == 0:
                    break
                step = fv / dv
                zz -= step
                if abs(step) < mpmath.mpf(2) ** (-precision):
                    break
            out.append(complex(zz))
    return np.array(out)


def atlas_coverage(samples, config=None):
    """Fraction of eligible grid cells containing at least one zero."""
    cfg = dict(ATLAS_CONFIG)
    if config:
        cfg.update(config)
    N = cfg["grid"]
    excl = cfg["exclusion_distance"]
    centers = set()
    for i in range(N):
        for j in range(N):
            cx = -1 + (i + 0.5) * 2 / N
            cy = -1 + (j + 0.5) * 2 / N
            if cx * cx + cy * cy > 1:
                continue
            dx = 0.0 if 0 <= cx <= 1 else min(abs(cx), abs(cx - 1))
            if math.hypot(dx, cy) < excl:
                continue
            centers.add((i, j))
    hits = set()
    for s in samples:
        z = complex(s.point)
        i = math.floor((z.real + 1) * N / 2)
        j = math.floor((z.imag + 1) * N / 2)
        if 0 <= i < N and 0 <= j < N:
            hits.add((i, j))
    covered = sum(1 for c in centers if c in hits)
    return covered, len(centers), covered / len(centers)


# -- roots-of-unity certificates ------------------------------------------------------

UNITY_MATRICES = {
    9: [[0, 0, 1, 1, 8], [0, 0, 1, 1, 8], [1, 1, 0, 8, 2], [1, 1, 8, 0, 2], [8, 8, 2, 2, 0]],
    8: [[0, 0, 1, 1, 7], [0, 0, 1, 1, 7], [1, 1, 0, 7, 2], [1, 1, 7, 0, 2], [7, 7, 2, 2, 0]],
    7: [[0, 0, 1, 1, 6], [0, 0, 1, 1, 6], [1, 1, 0, 6, 2], [1, 1, 6, 0, 2], [6, 6, 2, 2, 0]],
    6: [
        [0, 0, 1, 1, 1, 5],
        [0, 0, 1, 1, 1, 5],
        [1, 1, 0, 5, 5, 5],
        [1, 1, 5, 0, 5, 2],
        [1, 1, 5, 5, 0, 2],
        [5, 5, 5, 2, 2, 0],
    ],
    5: [
        [0, 0, 1, 1, 1, 4],
        [0, 0, 1, 1, 1, 4],
        [1, 1, 0, 4, 4, 2],
        [1, 1, 4, 0, 4, 2],
        [1, 1, 4, 4, 0, 3],
        [4, 4, 2, 2, 3, 0],
    ],
}


def unity_graph(k: int) -> TwoTerminal:
    """The fixed multigraph for e^{2 pi i/k}; terminals are the two
    non-adjacent vertices (0 and 1 in the stored matrices)."""
    if k not in UNITY_MATRICES:
        raise ValueError("k must be in {5,...,9}")
    text = "\n".join(" ".join(str(x) for x in row) for row in UNITY_MATRICES[k])
    return TwoTerminal(Multigraph.from_adjacency_text(text), 0, 1)


class UnityCertificate:
    __slots__ = ("k", "graph", "yhat_lower", "yhat_upper", "gcd_result", "precision", "r_abs_lower")

    def __init__(self, k, graph, yhat_lower, yhat_upper, gcd_result, precision, r_abs_lower):
        self.k = k
        self.graph = graph
        self.yhat_lower = yhat_lower
        self.yhat_upper = yhat_upper
        self.gcd_result = gcd_result
        self.precision = precision
        self.r_abs_lower = r_abs_lower

    def to_json(self):
        return {
            "k": self.k,
            "edges": self.graph.graph.m,
            "yhat_abs_interval": [self.yhat_lower, self.yhat_upper],
            "gcd": self.gcd_result.to_json(),
            "precision_bits": self.precision,
            "r_abs_lower": self.r_abs_lower,
        }


def verify_unity(k: int, precision: int = 256, max_precision: int = 1024) -> UnityCertificate:
    """Certify gcd(R(G_k;p), p^k - 1) = p - 1 and |yhat(e^{2 pi i/k})| > 1.

    The gcd is exact; the modulus claim is certified by complex interval
    arithmetic, retried at doubled precision while the enclosure is too wide.
    """
    tt = unity_graph(k)
    R = eval_delcon_symbolic(tt.graph)
    R_hat = eval_delcon_symbolic(merge_terminals(tt))
    S = R_hat - R
    unity = RatPoly([-1] + [0] * (k - 1) + [1])
    g = poly_gcd(R, unity)
    if g != RatPoly([-1, 1]).monic():
        raise ArithmeticError(f"gcd(R(G_{k};p), p^{k}-1) != p-1: got {g.to_json()}")
    prec = precision
    saved = mpmath.iv.prec
    try:
        while prec <= max_precision:
            mpmath.iv.prec = prec
            z0 = CIv.root_of_unity(k)
            Rv = R.eval_civ(z0)
            Sv = S.eval_civ(z0)
            yh = Rv / Sv + CIv(1, 0)
            lo, hi = yh.abs_lower(), yh.abs_upper()
            r_lo = Rv.abs_lower()
            if lo > 1.0 and r_lo > 0.0:
                return UnityCertificate(k, tt, lo, hi, g.monic(), prec, r_lo)
            prec *= 2
    finally:
        mpmath.iv.prec = saved
    raise ArithmeticError(f"could not certify |yhat| > 1 for k={k} below {max_precision} bits")


# -- unit-circle threshold constant ----------------------------------------------------


def unit_threshold():
    """The crossing constant (5*sqrt(2) - 4)/4 as certified algebraic data.

    Returns dict with the defining polynomial 8x^2 + 16x - 17, a 1e-30
    enclosure of its root in [0,1], and t* = arccos of it.
    """
    poly = RatPoly([-17, 16, 8])
    with mpmath.workprec(200):
        val = (5 * mpmath.sqrt(2) - 4) / 4
        lo = val - mpmath.mpf(10) ** -31
        hi = val + mpmath.mpf(10) ** -31
        # certify by sign change of the defining polynomial
        plo = poly.eval_mpc(lo, prec=200).real
        phi = poly.eval_mpc(hi, prec=200).real
        if not (plo < 0 < phi):
            raise ArithmeticError("threshold enclosure failed the sign test")
        tstar = mpmath.acos(val)
    return {
        "poly": poly,
        "value": val,
        "enclosure": (lo, hi),
        "width": mpmath.mpf(2) * mpmath.mpf(10) ** -31,
        "t_star": tstar,
    }
