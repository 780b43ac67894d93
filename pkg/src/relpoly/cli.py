"""Command-line entry point: `rel <subcommand>`.

Machine-readable JSON on stdout by default (CSV where documented), exact
rationals serialized as "num/den" strings, deterministic given seeds.

Exit codes: 0 success, 2 parse error (graph, SP-DSL, parameter), 3 cap
violation, 4 certification failure, 5 precondition or domain error.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from decimal import Decimal
from fractions import Fraction

from gmpy2 import mpq

from .bigcomplex import BigComplex
from .gaussian import GQ, format_gaussian, format_rational, parse_gaussian
from .graphs import K2, Multigraph, SPExpr, SPSyntaxError, TwoTerminal, parse_sp, realize
from .interactions import INF, classify_point, interactions_of

EXIT_PARSE = 2
EXIT_CAP = 3
EXIT_CERT = 4
EXIT_PRECONDITION = 5


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _parse_p(text: str, float_mode: bool, precision: int):
    if float_mode:
        try:
            parts = text.replace("i", "j")
            z = complex(parts) if "j" in parts else complex(float(parts), 0.0)
        except ValueError as exc:
            raise CliError(f"bad float parameter {text!r}", EXIT_PARSE) from exc
        return BigComplex(z.real, z.imag, precision)
    try:
        return parse_gaussian(text)
    except ValueError as exc:
        raise CliError(
            f"exact mode requires a Gaussian rational parameter, got {text!r}", EXIT_PARSE
        ) from exc


def _parse_rational(text: str) -> mpq:
    try:
        if "/" in text:
            return mpq(text)
        return mpq(Fraction(Decimal(text)))
    except Exception as exc:
        raise CliError(f"bad rational {text!r}", EXIT_PARSE) from exc


def _load_graph(path: str):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CliError(f"cannot read graph {path}: {exc}", EXIT_PARSE) from exc
    try:
        if "s" in data and "t" in data:
            return TwoTerminal.from_json(data)
        return Multigraph.from_json(data)
    except (KeyError, ValueError, TypeError) as exc:
        raise CliError(f"bad graph file {path}: {exc}", EXIT_PARSE) from exc


def _fmt_value(v) -> str:
    if v is INF:
        return "inf"
    if isinstance(v, GQ):
        return format_gaussian(v)
    return str(v)


def _emit(data, fmt: str = "json"):
    if fmt == "json":
        json.dump(data, sys.stdout, sort_keys=True, indent=2)
        sys.stdout.write("\n")
    else:
        raise CliError(f"unsupported format {fmt!r} here", EXIT_PARSE)


def _emit_samples(samples, fmt: str, meta: dict, out=None):
    stream = open(out, "w", newline="") if out else sys.stdout
    try:
        if fmt == "csv":
            w = csv.writer(stream)
            w.writerow(["re", "im", "class", "witness", "residual"])
            for s in samples:
                w.writerow(s.to_row())
        else:
            rows = []
            for s in samples:
                re_s, im_s, cls, wit, res = s.to_row()
                rows.append(
                    {
                        "re": float(re_s),
                        "im": float(im_s),
                        "class": cls,
                        "witness": wit,
                        "residual": float(res) if res else None,
                    }
                )
            payload = {"schema": "relpoly-tiles-v1", "samples": rows}
            payload.update(meta)
            json.dump(payload, stream, sort_keys=True, indent=2)
            stream.write("\n")
    finally:
        if out:
            stream.close()


# -- subcommands -----------------------------------------------------------------


def _cmd_eval(args):
    from .reliability import BRUTE_FORCE_EDGE_CAP, brute_force, eval_delcon, symbolic

    g = _load_graph(args.graph)
    if args.symbolic:
        if not isinstance(g, TwoTerminal):
            raise CliError("--symbolic needs a two-terminal graph (s, t fields)", EXIT_PARSE)
        try:
            pair = symbolic(g)
        except ValueError as exc:
            raise CliError(str(exc), EXIT_CAP) from exc
        _emit(pair.to_json())
        return 0
    p = _parse_p(args.p, args.float, args.precision_bits)
    if isinstance(g, TwoTerminal):
        if g.graph.m <= BRUTE_FORCE_EDGE_CAP:
            pair = brute_force(g, p)
            _emit({"R": _fmt_value(pair.R), "S": _fmt_value(pair.S)})
        else:
            raise CliError(f"graph exceeds the {BRUTE_FORCE_EDGE_CAP}-edge cap", EXIT_CAP)
    else:
        R = eval_delcon(g, p)
        _emit({"R": _fmt_value(R)})
    return 0


def _cmd_sp_eval(args):
    from .reliability import brute_force, eval_sp

    expr = _parse_expr(args.sp)
    base = _load_graph(args.base) if args.base else K2
    p = _parse_p(args.p, args.float, args.precision_bits)
    pair = eval_sp(expr, brute_force(base, p))
    _emit({"R": _fmt_value(pair.R), "S": _fmt_value(pair.S), "leaves": expr.leaf_count()})
    return 0


def _parse_expr(text: str) -> SPExpr:
    try:
        return parse_sp(text)
    except SPSyntaxError as exc:
        raise CliError(f"bad SP expression: {exc}", EXIT_PARSE) from exc


def _cmd_interact(args):
    from .reliability import brute_force, eval_sp

    expr = _parse_expr(args.sp)
    base = _load_graph(args.base) if args.base else K2
    p = _parse_p(args.p, args.float, args.precision_bits)
    pair = eval_sp(expr, brute_force(base, p))
    try:
        ip = interactions_of(pair)
    except ArithmeticError as exc:
        raise CliError(str(exc), EXIT_PRECONDITION) from exc
    _emit(
        {
            "y": _fmt_value(ip.y),
            "yhat": _fmt_value(ip.yhat),
            "classification": classify_point(pair, real_mode=args.real_mode),
        }
    )
    return 0


def _cmd_construct(args):
    from .constructor import ConstructError, PreconditionError, construct_interaction, precompute

    g0 = _load_graph(args.g0) if args.g0 else K2
    if not isinstance(g0, TwoTerminal):
        raise CliError("--g0 must be a two-terminal graph", EXIT_PARSE)
    p = _parse_p(args.p, False, 0)
    y0 = _parse_p(args.target, False, 0)
    eps = _parse_rational(args.eps)
    try:
        cert = precompute(g0, p)
        res = construct_interaction(cert, y0, eps)
    except PreconditionError as exc:
        raise CliError(str(exc), EXIT_PRECONDITION) from exc
    except ConstructError as exc:
        raise CliError(str(exc), EXIT_CERT) from exc
    _emit(
        {
            "expr": str(res.expr),
            "y": _fmt_value(res.y),
            "R": _fmt_value(res.pair.R),
            "S": _fmt_value(res.pair.S),
            "error_sq": format_rational(res.error2),
            "eps_sq": format_rational(eps * eps),
            "size": res.size,
            "case": res.case,
        }
    )
    return 0


def _cmd_reduce(args):
    from .constructor import PreconditionError, precompute
    from .reduction import BoxShrinkError, reduce_graph

    g = _load_graph(args.graph)
    graph = g.graph if isinstance(g, TwoTerminal) else g
    p = _parse_p(args.p, False, 0)
    try:
        cert = precompute(K2, p)
        out = reduce_graph(graph, p, args.oracle_mode, args.seed, cert=cert)
    except PreconditionError as exc:
        raise CliError(str(exc), EXIT_PRECONDITION) from exc
    except BoxShrinkError as exc:
        raise CliError(str(exc), EXIT_CERT) from exc
    steps = [
        {"edge": list(e), "r": _fmt_value(r), "b": b} for e, r, b in out["steps"]
    ]
    _emit(
        {
            "R": _fmt_value(out["R"]),
            "steps": steps,
            "oracle_mode": args.oracle_mode,
            "seed": args.seed,
            "queries": sum(t.get("queries", 0) for t in out["traces"]),
        }
    )
    return 0


def _cmd_scan(args):
    from .locus import activity_scan

    g0 = _load_graph(args.g0) if args.g0 else K2
    region = tuple(float(x) for x in args.region.split(","))
    if len(region) != 4:
        raise CliError("--region needs re0,re1,im0,im1", EXIT_PARSE)
    if args.budget > 10**4:
        raise CliError("budget capped at 10^4 words per point", EXIT_CAP)
    samples = _parallel_scan(g0, region, args.grid, args.budget, args.real_mode, args.jobs)
    meta = {
        "kind": "activity-scan",
        "region": {"re0": region[0], "re1": region[1], "im0": region[2], "im1": region[3]},
        "metadata": {"grid": args.grid, "budget": args.budget, "real_mode": args.real_mode},
    }
    _emit_samples(samples, args.format, meta, args.out)
    return 0


def _parallel_scan(g0, region, grid, budget, real_mode, jobs):
    from .locus import activity_scan, grid_points

    if jobs <= 1:
        return activity_scan(g0, region, grid, budget, real_mode)
    # chunk the exact grid points across workers; merge preserves point order
    import multiprocessing as mp

    points = grid_points(region, grid, real_mode)
    chunk = max(1, (len(points) + jobs - 1) // jobs)
    tasks = [
        (g0, budget, real_mode, points[k : k + chunk]) for k in range(0, len(points), chunk)
    ]
    with mp.Pool(jobs) as pool:
        chunks = pool.starmap(_scan_chunk, tasks)
    return [s for ch in chunks for s in ch]


def _scan_chunk(g0, budget, real_mode, points):
    from .locus import activity_scan

    return activity_scan(g0, budget=budget, real_mode=real_mode, points=points)


def _cmd_zeros(args):
    from .locus import ATLAS_CONFIG, atlas_coverage, zero_atlas

    base = _load_graph(args.base) if args.base else K2
    if args.max_leaves > 16:
        raise CliError("atlas enumeration capped at 16 leaves", EXIT_CAP)
    samples, stats = zero_atlas(base, args.max_leaves, args.precision)
    covered, eligible, ratio = atlas_coverage(samples)
    stats.update(covered_cells=covered, eligible_cells=eligible, coverage=ratio)
    meta = {
        "kind": "zero-atlas",
        "region": {"re0": -1.0, "re1": 1.0, "im0": -1.0, "im1": 1.0},
        "metadata": {
            "max_leaves": args.max_leaves,
            "precision": args.precision,
            "config": {k: v for k, v in ATLAS_CONFIG.items() if k != "cell_rule"},
        },
        "stats": stats,
    }
    _emit_samples(samples, args.format, meta, args.out)
    return 0


def _cmd_verify_unity(args):
    from .locus import verify_unity

    try:
        cert = verify_unity(args.k, precision=args.precision)
    except (ArithmeticError, ValueError) as exc:
        print(json.dumps({"ok": False, "error": str(exc)}))
        return EXIT_CERT
    out = cert.to_json()
    out["ok"] = True
    _emit(out)
    return 0


def _cmd_verify_pentagon(args):
    import math
    import random

    from .interactions import pentagon_F, pentagon_F_pipeline, pentagon_circle_sq
    from .locus import unit_threshold

    rng = random.Random(args.seed)
    mismatches = 0
    for _ in range(args.samples):
        y1 = GQ(mpq(rng.randint(-9, 9), rng.randint(1, 7)), mpq(rng.randint(-9, 9), rng.randint(1, 7)))
        y2 = GQ(mpq(rng.randint(-9, 9), rng.randint(1, 7)), mpq(rng.randint(-9, 9), rng.randint(1, 7)))
        if y1.is_zero() or y2.is_zero():
            continue
        a = pentagon_F(y1, y2)
        b = pentagon_F_pipeline(y1, y2)
        if not (a is INF and b is INF) and a != b:
            mismatches += 1
    th = unit_threshold()
    tstar = float(th["t_star"])
    curve_err = 0.0
    import mpmath

    with mpmath.workprec(120):
        for k in range(1000):
            t = -math.pi + 2 * math.pi * (k + 0.5) / 1000
            z1 = mpmath.exp(1j * mpmath.mpf(t))
            z2 = mpmath.conj(z1)
            num = ((z1**5 + z1**4 + z1**3 + z1**2 + z1 + 1) * z2**3 - 2 * (z1**2 + z1 + 1) * z2**2
                   - 2 * z1**2 - (z1**3 + z1**2 + 2 * z1 + 2) * z2 + 2 * z1 + 6)
            den = 2 * ((z1**3 + z1**2 + 2 * z1 + 2) * z2**2 + (2 * z1**2 - 5 * z1 - 9) * z2 - 6 * z1 + 12)
            ref = abs(num / den) ** 2
            curve_err = max(curve_err, abs(float(ref) - pentagon_circle_sq(t)))
    ok = mismatches == 0 and curve_err < 1e-12
    result = {
        "ok": ok,
        "exact_mismatches": mismatches,
        "curve_max_err": curve_err,
        "threshold": float(th["value"]),
        "t_star": tstar,
    }
    if args.curve_out:
        pts = []
        n = 600
        for k in range(n + 1):
            t = math.pi * k / n
            pts.append({"t": t, "value": pentagon_circle_sq(t)})
        with open(args.curve_out, "w") as fh:
            json.dump(
                {
                    "schema": "relpoly-curve-v1",
                    "kind": "pentagon-circle",
                    "t_star": tstar,
                    "threshold_constant": float(th["value"]),
                    "samples": pts,
                },
                fh,
                sort_keys=True,
                indent=2,
            )
            fh.write("\n")
    _emit(result)
    return 0 if ok else EXIT_CERT


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="rel", description=__doc__)
    ap.add_argument("--format", choices=["json", "csv"], default="json")
    default_bits = int(os.environ.get("REL_PRECISION_BITS", "64"))
    sub = ap.add_subparsers(dest="cmd", required=True)

    def common(p):
        p.add_argument("--float", action="store_true", help="big-float mode")
        p.add_argument("--precision-bits", type=int, default=default_bits)

    g = sub.add_parser("eval", help="R,S of a graph at p")
    g.add_argument("--graph", required=True)
    g.add_argument("--p", default="0")
    g.add_argument("--symbolic", action="store_true")
    common(g)
    g.set_defaults(fn=_cmd_eval)

    g = sub.add_parser("sp-eval", help="R,S of an SP expression at p")
    g.add_argument("--sp", required=True)
    g.add_argument("--p", required=True)
    g.add_argument("--base", help="base gadget JSON (default: single edge)")
    common(g)
    g.set_defaults(fn=_cmd_sp_eval)

    g = sub.add_parser("interact", help="edge interactions of an SP expression")
    g.add_argument("--sp", required=True)
    g.add_argument("--p", required=True)
    g.add_argument("--base")
    g.add_argument("--real-mode", action="store_true")
    common(g)
    g.set_defaults(fn=_cmd_interact)

    g = sub.add_parser("construct", help="hit a target interaction with an SP graph")
    g.add_argument("--g0", help="base gadget JSON (default: single edge)")
    g.add_argument("--p", required=True)
    g.add_argument("--target", required=True)
    g.add_argument("--eps", required=True)
    g.set_defaults(fn=_cmd_construct)

    g = sub.add_parser("reduce", help="recover exact R from a simulated 0.25-oracle")
    g.add_argument("--graph", required=True)
    g.add_argument("--p", required=True)
    g.add_argument("--oracle-mode", choices=["abs", "arg"], default="abs")
    g.add_argument("--seed", type=int, default=0)
    g.set_defaults(fn=_cmd_reduce)

    g = sub.add_parser("scan", help="activity scan over a parameter grid")
    g.add_argument("--g0")
    g.add_argument("--region", default="-1.5,1.5,-1.5,1.5")
    g.add_argument("--grid", type=int, default=8)
    g.add_argument("--budget", type=int, default=2000)
    g.add_argument("--real-mode", action="store_true")
    g.add_argument("--jobs", type=int, default=1)
    g.add_argument("--out")
    g.set_defaults(fn=_cmd_scan)

    g = sub.add_parser("zeros", help="zero atlas by SP enumeration")
    g.add_argument("--base")
    g.add_argument("--max-leaves", type=int, default=14)
    g.add_argument("--precision", type=int, default=40)
    g.add_argument("--jobs", type=int, default=1)
    g.add_argument("--out")
    g.set_defaults(fn=_cmd_zeros)

    g = sub.add_parser("verify-unity", help="roots-of-unity certificate for k in 5..9")
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--precision", type=int, default=256)
    g.set_defaults(fn=_cmd_verify_unity)

    g = sub.add_parser("verify-pentagon", help="pentagon closed-form checks")
    g.add_argument("--samples", type=int, default=50)
    g.add_argument("--seed", type=int, default=7)
    g.add_argument("--curve-out")
    g.set_defaults(fn=_cmd_verify_pentagon)

    if argv is None:
        argv = sys.argv[1:]
    # glue values that look like options onto their flag ("--p -1/2" etc.)
    glued = []
    value_flags = {"--p", "--target", "--eps", "--region"}
    k = 0
    while k < len(argv):
        tok = argv[k]
        if tok in value_flags and k + 1 < len(argv):
            glued.append(f"{tok}={argv[k + 1]}")
            k += 2
        else:
            glued.append(tok)
            k += 1
    args = ap.parse_args(glued)
    if getattr(args, "precision_bits", 64) < 64 and getattr(args, "float", False):
        print("precision must be >= 64 bits in float mode", file=sys.stderr)
        return EXIT_PARSE
    try:
        return args.fn(args)
    except CliError as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return EXIT_CAP if "cap" in str(exc) else EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
