"""Graph core: DSL parsing, composition arithmetic, substitution, merging."""

import pytest

from relpoly.graphs import (
    K2,
    Multigraph,
    SPExpr,
    SPSyntaxError,
    TwoTerminal,
    compose,
    is_isomorphic,
    merge_terminals,
    parse_sp,
    print_sp,
    realize,
    substitute,
    transpose,
)


def random_expr(rng, leaves):
    if leaves == 1:
        return SPExpr.leaf(rng.random() < 0.3)
    k = rng.randint(1, leaves - 1)
    a = random_expr(rng, k)
    b = random_expr(rng, leaves - k)
    return SPExpr.series(a, b) if rng.random() < 0.5 else SPExpr.parallel(a, b)


def test_parse_examples():
    e = parse_sp("e|e")
    assert e.kind == "parallel" and len(e.children) == 2
    e = parse_sp("(e*e)|e")
    assert e.kind == "parallel" and e.children[0].kind == "series"
    e = parse_sp("e^T*e")
    assert e.kind == "series" and e.children[0].kind == "eT"


def test_parse_errors():
    for bad, off in (("", 0), ("e|", 2), ("(e*e", 4), ("x", 0)):
        with pytest.raises(SPSyntaxError) as exc:
            parse_sp(bad)
        assert exc.value.offset == off


def test_print_roundtrip(rng):
    for _ in range(60):
        x = random_expr(rng, rng.randint(1, 12))
        assert parse_sp(print_sp(x)) == x
    for _ in range(30):
        x = random_expr(rng, rng.randint(1, 12))
        assert is_isomorphic(realize(parse_sp(print_sp(x)), K2), realize(x, K2))


def test_compose_counts(rng):
    # series: sum n_i - (k-1); parallel: sum n_i - 2(k-1)
    s = compose("series", [K2, K2])
    assert s.n == 3 and s.graph.m == 2
    par = compose("parallel", [K2, K2])
    assert par.n == 2 and par.graph.m == 2
    for _ in range(20):
        parts = [realize(random_expr(rng, rng.randint(1, 4)), K2) for _ in range(rng.randint(2, 4))]
        k = len(parts)
        s = compose("series", parts)
        assert s.n == sum(g.n for g in parts) - (k - 1)
        par = compose("parallel", parts)
        assert par.n == sum(g.n for g in parts) - 2 * (k - 1)


def test_realize_examples():
    assert realize(parse_sp("e"), K2) == K2
    tri = realize(parse_sp("(e*e)|e"), K2)
    assert is_isomorphic(tri.graph, Multigraph(3, [(0, 1), (0, 2), (1, 2)]))
    theta = realize(parse_sp("e|e|e"), K2)
    assert theta.n == 2 and theta.graph.m == 3


def test_realize_transpose_closure(rng):
    for _ in range(20):
        x = random_expr(rng, rng.randint(1, 8))
        direct = realize(x.transposed(), K2)
        swapped = transpose(realize(x, K2))
        assert is_isomorphic(direct, swapped)


def test_leaf_edge_count(rng):
    base = realize(parse_sp("e*e|e"), K2)  # 3-edge base
    for _ in range(20):
        x = random_expr(rng, rng.randint(1, 8))
        g = realize(x, base)
        assert g.graph.m == x.leaf_count() * base.graph.m


def test_substitute_examples():
    path2 = realize(parse_sp("e*e"), K2)
    # K2(G)_e = G
    out = substitute(K2, {0: path2})
    assert is_isomorphic(out.graph, path2.graph)
    # triangle with every edge replaced by a 2-path is a 6-cycle
    tri = TwoTerminal(Multigraph(3, [(0, 1), (0, 2), (1, 2)]), 0, 1)
    out = substitute(tri, path2)
    assert out.graph.n == 6 and out.graph.m == 6
    assert is_isomorphic(out.graph, Multigraph(6, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)]))


def test_substitute_counts(rng):
    # n(H(G)) = n(H) + sum (n(G_i) - 2) over replaced edges
    host = realize(parse_sp("(e|e)*e"), K2)
    for _ in range(10):
        gadget = realize(random_expr(rng, rng.randint(1, 5)), K2)
        out = substitute(host, gadget)
        assert out.graph.n == host.n + host.graph.m * (gadget.n - 2)


def test_substitute_loop_rejected():
    loopy = Multigraph(2, [(0, 0), (0, 1)])
    with pytest.raises(ValueError):
        substitute(loopy, {0: K2})


def test_merge_terminals():
    m = merge_terminals(K2)
    assert m.n == 1 and m.edges == ((0, 0),)
    path2 = realize(parse_sp("e*e"), K2)
    m = merge_terminals(path2)
    assert m.n == 2 and sorted(m.edges) == [(0, 1), (0, 1)]
    g = realize(parse_sp("(e*e)|e*e"), K2)
    assert merge_terminals(g).n == g.n - 1


def test_serialization_roundtrip():
    g = realize(parse_sp("(e|e)*e"), K2)
    assert TwoTerminal.from_json(g.to_json()) == g
    mat = g.graph.to_adjacency_text()
    assert Multigraph.from_adjacency_text(mat) == g.graph
