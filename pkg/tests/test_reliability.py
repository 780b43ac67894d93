"""Evaluator equivalences and the composition/substitution identity suite."""

import itertools

import pytest
from gmpy2 import mpq

from conftest import random_parameter
from relpoly.gaussian import GQ, gq
from relpoly.graphs import (
    K2,
    Multigraph,
    SPExpr,
    TwoTerminal,
    merge_terminals,
    parse_sp,
    realize,
    substitute,
)
from relpoly.polynomials import RatPoly
from relpoly.reliability import (
    RelPair,
    brute_force,
    eval_delcon,
    eval_multivariate,
    eval_sp,
    eval_weighted,
    symbolic,
)

TRIANGLE = TwoTerminal(Multigraph(3, [(0, 1), (0, 2), (1, 2)]), 0, 1)
PATH2 = realize(parse_sp("e*e"), K2)


def random_multigraph(rng, nmax=5, mmax=8):
    n = rng.randint(2, nmax)
    pairs = list(itertools.combinations(range(n), 2))
    return Multigraph(n, [rng.choice(pairs) for _ in range(rng.randint(1, mmax))])


def random_expr(rng, leaves):
    if leaves == 1:
        return SPExpr.leaf(rng.random() < 0.25)
    k = rng.randint(1, leaves - 1)
    a, b = random_expr(rng, k), random_expr(rng, leaves - k)
    return SPExpr.series(a, b) if rng.random() < 0.5 else SPExpr.parallel(a, b)


def test_brute_examples():
    p = gq("5/7", "2/3")
    pair = brute_force(K2, p)
    assert pair.R == GQ(1) - p and pair.S == p
    assert brute_force(TRIANGLE, gq("1/2")).R == gq("1/2")
    pair = brute_force(PATH2, gq("1/3"))
    assert pair.R == (GQ(1) - gq("1/3")) ** 2
    assert pair.S == GQ(2) * gq("1/3") * (GQ(1) - gq("1/3"))


def test_brute_cap():
    big = Multigraph(2, [(0, 1)] * 25)
    with pytest.raises(ValueError):
        brute_force(TwoTerminal(big, 0, 1), gq("1/2"))


def test_delcon_tree_and_disconnected():
    tree = Multigraph(4, [(0, 1), (1, 2), (2, 3)])
    p = gq("3/11", "1/2")
    assert eval_delcon(tree, p) == (GQ(1) - p) ** 3
    assert eval_delcon(Multigraph(3, [(0, 1)]), p) == GQ(0)
    # loops are irrelevant
    assert eval_delcon(Multigraph(2, [(0, 1), (0, 0)]), p) == GQ(1) - p


def test_delcon_matches_brute(rng):
    for _ in range(40):
        g = random_multigraph(rng)
        tt = TwoTerminal(g, 0, 1)
        p = random_parameter(rng)
        assert eval_delcon(g, p) == brute_force(tt, p).R


def test_eval_sp_matches_brute(rng):
    for _ in range(40):
        x = random_expr(rng, rng.randint(1, 12))
        p = random_parameter(rng)
        pair = eval_sp(x, brute_force(K2, p))
        ref = brute_force(realize(x, K2), p)
        assert pair.R == ref.R and pair.S == ref.S


def test_eval_weighted_matches(rng):
    for _ in range(20):
        g = random_multigraph(rng, mmax=7)
        p = random_parameter(rng)
        assert eval_weighted(g.n, [(u, v, p) for u, v in g.edges]) == eval_delcon(g, p)


def test_symbolic_examples():
    pair = symbolic(K2)
    assert pair.R == RatPoly([1, -1]) and pair.S == RatPoly([0, 1])
    assert symbolic(TRIANGLE).R == RatPoly([1, -2, 1]) * RatPoly([1, 2])
    assert symbolic(PATH2).S == RatPoly([0, 2, -2])


def test_symbolic_normalization(rng):
    # R(G;0) = 1 for connected G; R(G;1) = 0 when |V| >= 2; deg <= |E|
    for _ in range(15):
        g = random_multigraph(rng, mmax=7)
        if not g.is_connected():
            continue
        R = symbolic(TwoTerminal(g, 0, 1)).R
        assert R.eval_gq(GQ(0)) == GQ(1)
        assert R.eval_gq(GQ(1)) == GQ(0)
        assert R.degree <= g.m


def test_multivariate_examples():
    p1, p2 = gq("1/3"), gq("2/7", "1/5")
    pair = eval_multivariate(PATH2, [p1, p2])
    assert pair.R == (GQ(1) - p1) * (GQ(1) - p2)
    # all parameters equal specializes to brute force
    g = realize(parse_sp("(e|e)*e"), K2)
    p = gq("2/5", "1/9")
    mv = eval_multivariate(g, [p] * g.graph.m)
    bf = brute_force(g, p)
    assert mv.R == bf.R and mv.S == bf.S
    pair = eval_multivariate(K2, [p1])
    assert pair.R == GQ(1) - p1 and pair.S == p1
    with pytest.raises(ValueError):
        eval_multivariate(K2, [p1, p2])


# -- identity suite (series/parallel recursions, del-con, gadgets) ----------------


def test_series_parallel_recursions(rng):
    # S(par) = S1 S2, R(ser) = R1 R2, R(par) and S(ser) by the pair rule
    for _ in range(30):
        x1 = random_expr(rng, rng.randint(1, 6))
        x2 = random_expr(rng, rng.randint(1, 6))
        p = random_parameter(rng)
        g1, g2 = realize(x1, K2), realize(x2, K2)
        a, b = brute_force(g1, p), brute_force(g2, p)
        ser = brute_force(realize(SPExpr.series(x1, x2), K2), p)
        par = brute_force(realize(SPExpr.parallel(x1, x2), K2), p)
        assert ser.R == a.R * b.R
        assert ser.S == a.R * b.S + b.R * a.S
        assert par.S == a.S * b.S
        assert par.R == a.R * b.S + b.R * a.S + a.R * b.R


def test_deletion_contraction(rng):
    # R(G) = p R(G-e) + (1-p) R(G/e), S likewise for e != {s,t}
    from relpoly.reduction import _contract_multigraph

    for _ in range(30):
        g = random_multigraph(rng, mmax=7)
        p = random_parameter(rng)
        u, v = g.edges[0]
        if u == v:
            continue
        R = eval_delcon(g, p)
        R_del = eval_delcon(Multigraph(g.n, g.edges[1:]), p)
        R_con = eval_delcon(_contract_multigraph(g, 0), p)
        assert R == p * R_del + (GQ(1) - p) * R_con


def test_single_replacement_identity(rng):
    # R(H(G)_e) = S(G) R(H-e) + R(G) R(H/e)
    from relpoly.reduction import _contract_multigraph

    for _ in range(30):
        host = realize(random_expr(rng, rng.randint(2, 4)), K2)
        gadget = realize(random_expr(rng, rng.randint(1, 4)), K2)
        p = random_parameter(rng)
        e = 0
        u, v = host.graph.edges[e]
        if u == v:
            continue
        sub = substitute(host, {e: gadget})
        gpair = brute_force(gadget, p)
        lhs = eval_delcon(sub.graph, p)
        R_del = eval_delcon(Multigraph(host.n, host.graph.edges[1:]), p)
        R_con = eval_delcon(_contract_multigraph(host.graph, 0), p)
        assert lhs == gpair.S * R_del + gpair.R * R_con


def test_shifted_linear_identity(rng):
    # (1-p)/R(G) * R(H(G)_e) = R(H) + (y_G - (p+1)) R(H-e)
    for _ in range(30):
        host = realize(random_expr(rng, rng.randint(2, 4)), K2)
        gadget = realize(random_expr(rng, rng.randint(1, 4)), K2)
        p = random_parameter(rng)
        gpair = brute_force(gadget, p)
        if gpair.R.is_zero():
            continue
        sub = substitute(host, {0: gadget})
        y = (GQ(1) - p) * gpair.S / gpair.R + GQ(1)
        lhs = (GQ(1) - p) / gpair.R * eval_delcon(sub.graph, p)
        R_host = eval_delcon(host.graph, p)
        R_del = eval_delcon(Multigraph(host.n, host.graph.edges[1:]), p)
        assert lhs == R_host + (y - (p + GQ(1))) * R_del


def test_full_substitution_identity(rng):
    # R(H(G)) = (R_G + S_G)^{|E(H)|} R(H; 1/yhat_G)
    for _ in range(25):
        host = realize(random_expr(rng, rng.randint(2, 4)), K2)
        gadget = realize(random_expr(rng, rng.randint(1, 3)), K2)
        if host.graph.m * gadget.graph.m > 14:
            continue
        p = random_parameter(rng)
        gpair = brute_force(gadget, p)
        if gpair.S.is_zero() or (gpair.R + gpair.S).is_zero():
            continue
        yhat = gpair.R / gpair.S + GQ(1)
        if yhat.is_zero():
            continue
        sub = substitute(host, gadget)
        lhs = eval_delcon(sub.graph, p)
        rhs = (gpair.R + gpair.S) ** host.graph.m * brute_force(host, GQ(1) / yhat).R
        assert lhs == rhs


def test_multivariate_substitution_identity(rng):
    # yhat_{H(G_1..G_m)}(p) = yhat_H(p_i = 1/yhat_{G_i}(p))
    for _ in range(25):
        host = realize(random_expr(rng, rng.randint(2, 3)), K2)
        p = random_parameter(rng)
        gadgets = []
        ok = True
        for _e in range(host.graph.m):
            gad = realize(random_expr(rng, rng.randint(1, 3)), K2)
            pair = brute_force(gad, p)
            if pair.S.is_zero() or (pair.R / pair.S + GQ(1)).is_zero():
                ok = False
                break
            gadgets.append((gad, pair))
        if not ok:
            continue
        sub = substitute(host, {i: g for i, (g, _) in enumerate(gadgets)})
        spair = brute_force(TwoTerminal(sub.graph, sub.s, sub.t), p)
        if spair.S.is_zero():
            continue
        lhs = spair.R / spair.S + GQ(1)
        ps = [GQ(1) / (pair.R / pair.S + GQ(1)) for _, pair in gadgets]
        mv = eval_multivariate(host, ps)
        if mv.S.is_zero():
            continue
        rhs = mv.R / mv.S + GQ(1)
        assert lhs == rhs


def test_zero_forces_unit_interaction(rng):
    # whenever R vanishes off the exceptional set, tripling in parallel gives
    # yhat^3 = 1 (through yhat = 1 with S != 0)
    p = gq("-1/2")
    tripled = parse_sp("((e*e)|e)|((e*e)|e)|((e*e)|e)")
    pair = eval_sp(tripled, brute_force(K2, p))
    single = eval_sp(parse_sp("(e*e)|e"), brute_force(K2, p))
    assert single.R.is_zero() and not single.S.is_zero()
    yhat = pair.R / pair.S + GQ(1)
    assert yhat == GQ(1)
