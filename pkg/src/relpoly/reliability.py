"""Reliability and split-reliability evaluation by three independent routes.

brute_force enumerates all edge subsets and is the oracle everything else is
tested against.  eval_delcon is the production evaluator: deletion and
contraction over bundled parallel edges, memoized on canonically labeled
minors.  eval_sp runs the series/parallel pair recursion in linear time over
an expression.  All routes are exact over whatever field the parameter lives
in (Gaussian rationals or RatPoly for symbolic work).
"""

from __future__ import annotations

from gmpy2 import mpq

from .gaussian import GQ
from .graphs import Multigraph, SPExpr, TwoTerminal, canonical_key, merge_terminals
from .polynomials import RatPoly

__all__ = [
    "RelPair",
    "RelPolyPair",
    "brute_force",
    "subset_counts",
    "eval_delcon",
    "eval_delcon_symbolic",
    "eval_sp",
    "eval_weighted",
    "eval_multivariate",
    "symbolic",
    "pair_of",
    "BRUTE_FORCE_EDGE_CAP",
]

BRUTE_FORCE_EDGE_CAP = 24
DELCON_SUPPORT_CAP = 24


class RelPair:
    """(R, S) of a two-terminal graph at a fixed parameter."""

    __slots__ = ("R", "S", "at")

    def __init__(self, R, S, at):
        self.R = R
        self.S = S
        self.at = at

    def __eq__(self, other):
        if not isinstance(other, RelPair):
            return NotImplemented
        return self.R == other.R and self.S == other.S and self.at == other.at

    def __repr__(self):
        return f"RelPair(R={self.R!s}, S={self.S!s}, at={self.at!s})"


class RelPolyPair:
    """(R, S) as exact polynomials in the failure probability."""

    __slots__ = ("R", "S")

    def __init__(self, R: RatPoly, S: RatPoly):
        self.R = R
        self.S = S

    def __eq__(self, other):
        if not isinstance(other, RelPolyPair):
            return NotImplemented
        return self.R == other.R and self.S == other.S

    def __repr__(self):
        return f"RelPolyPair(R={self.R!r}, S={self.S!r})"

    def to_json(self):
        return {"R": self.R.to_json(), "S": self.S.to_json()}


# -- brute force over all edge subsets ------------------------------------------

_COUNTS_CACHE: dict = {}


def subset_counts(g: TwoTerminal):
    """(connected_count[k], split_count[k]) over subsets of size k.

    One 2^m enumeration per graph; values at any parameter are then two
    Horner passes.  This is the literal definition, kept dumb on purpose.
    """
    key = (g.graph, g.s, g.t)
    hit = _COUNTS_CACHE.get(key)
    if hit is not None:
        return hit
    graph, s, t = g.graph, g.s, g.t
    m = graph.m
    if m > BRUTE_FORCE_EDGE_CAP:
        raise ValueError(f"brute force capped at {BRUTE_FORCE_EDGE_CAP} edges, got {m}")
    n = graph.n
    edges = graph.edges
    conn = [0] * (m + 1)
    split = [0] * (m + 1)
    for mask in range(1 << m):
        parent = list(range(n))

        def find(x, parent=parent):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        k = 0
        mm = mask
        idx = 0
        while mm:
            if mm & 1:
                k += 1
                u, v = edges[idx]
                ru, rv = find(u), find(v)
                if ru != rv:
                    parent[ru] = rv
            mm >>= 1
            idx += 1
        roots = {find(v) for v in range(n)}
        if len(roots) == 1:
            conn[k] += 1
        elif len(roots) == 2 and find(s) != find(t):
            split[k] += 1
    out = (conn, split)
    if len(_COUNTS_CACHE) > 4096:
        _COUNTS_CACHE.clear()
    _COUNTS_CACHE[key] = out
    return out


def _counts_value(counts, m, p):
    """sum_k counts[k] * (1-p)^k * p^(m-k), field-generic."""
    one = _one_like(p)
    q = one - p
    # powers of p and q
    p_pows = [one]
    q_pows = [one]
    for _ in range(m):
        p_pows.append(p_pows[-1] * p)
        q_pows.append(q_pows[-1] * q)
    total = None
    for k, c in enumerate(counts):
        if not c:
            continue
        term = q_pows[k] * p_pows[m - k]
        if c != 1:
            term = term * c
        total = term if total is None else total + term
    return total if total is not None else (p - p)


def _one_like(p):
    if isinstance(p, GQ):
        return GQ(1)
    if isinstance(p, RatPoly):
        return RatPoly([1])
    from .bigcomplex import BigComplex

    if isinstance(p, BigComplex):
        return BigComplex(1, 0, p.prec)
    return mpq(1)


def brute_force(g: TwoTerminal, p) -> RelPair:
    """Exact (R, S) by summing over all 2^m edge subsets."""
    conn, split = subset_counts(g)
    m = g.graph.m
    return RelPair(_counts_value(conn, m, p), _counts_value(split, m, p), p)


def eval_multivariate(g: TwoTerminal, p_per_edge) -> RelPair:
    """Exact multivariate (R, S): one failure parameter per edge."""
    graph, s, t = g.graph, g.s, g.t
    m = graph.m
    if len(p_per_edge) != m:
        raise ValueError(f"expected {m} edge parameters, got {len(p_per_edge)}")
    if m > BRUTE_FORCE_EDGE_CAP:
        raise ValueError(f"multivariate evaluation capped at {BRUTE_FORCE_EDGE_CAP} edges")
    n = graph.n
    edges = graph.edges
    one = _one_like(p_per_edge[0]) if m else GQ(1)
    up = [one - p for p in p_per_edge]
    R = None
    S = None
    for mask in range(1 << m):
        parent = list(range(n))

        def find(x, parent=parent):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        w = one
        for idx in range(m):
            if mask >> idx & 1:
                u, v = edges[idx]
                ru, rv = find(u), find(v)
                if ru != rv:
                    parent[ru] = rv
                w = w * up[idx]
            else:
                w = w * p_per_edge[idx]
        roots = {find(v) for v in range(n)}
        if len(roots) == 1:
            R = w if R is None else R + w
        elif len(roots) == 2 and find(s) != find(t):
            S = w if S is None else S + w
    zero = one - one
    return RelPair(R if R is not None else zero, S if S is not None else zero, tuple(p_per_edge))


# -- deletion-contraction over bundles -------------------------------------------


class _Bundled:
    """Working form for del-con: vertex count + {support edge: multiplicity}."""

    __slots__ = ("n", "bund")

    def __init__(self, n, bund):
        self.n = n
        self.bund = bund

    @staticmethod
    def from_graph(g: Multigraph) -> "_Bundled":
        bund = {}
        for u, v in g.edges:
            if u == v:
                continue  # loops never affect connectivity
            key = (u, v) if u < v else (v, u)
            bund[key] = bund.get(key, 0) + 1
        return _Bundled(g.n, bund)

    def to_multigraph(self) -> Multigraph:
        edges = []
        for (u, v), k in self.bund.items():
            edges.extend([(u, v)] * k)
        return Multigraph(self.n, edges)

    def contract(self, u, v) -> "_Bundled":
        """Identify v into u, dropping loops and adding parallel multiplicities."""
        lo, hi = (u, v) if u < v else (v, u)

        def relabel(x):
            if x == hi:
                x = lo
            return x - 1 if x > hi else x

        bund = {}
        for (a, b), k in self.bund.items():
            if (a, b) == (lo, hi):
                continue
            ra, rb = relabel(a), relabel(b)
            if ra == rb:
                continue
            key = (ra, rb) if ra < rb else (rb, ra)
            bund[key] = bund.get(key, 0) + k
        return _Bundled(self.n - 1, bund)

    def delete(self, u, v) -> "_Bundled":
        bund = dict(self.bund)
        del bund[(u, v) if u < v else (v, u)]
        return _Bundled(self.n, bund)

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self.bund:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
        root = find(0)
        return all(find(v) == root for v in range(self.n))


class DelConEvaluator:
    """Memoized deletion-contraction at a fixed parameter (or over RatPoly).

    The memo is instance-local: concurrent use wants one evaluator per task,
    and entries are only published after they are complete.
    """

    def __init__(self, p, memo_cap: int = 200000):
        self.p = p
        self.one = _one_like(p)
        self._ppow = {0: self.one, 1: p}
        self.memo = {}
        self.memo_cap = memo_cap

    def p_pow(self, k: int):
        hit = self._ppow.get(k)
        if hit is None:
            half = self.p_pow(k // 2)
            hit = half * half
            if k & 1:
                hit = hit * self.p
            self._ppow[k] = hit
        return hit

    def eval(self, g: Multigraph):
        b = _Bundled.from_graph(g)
        if len(b.bund) > DELCON_SUPPORT_CAP:
            raise ValueError(
                f"deletion-contraction capped at {DELCON_SUPPORT_CAP} distinct edges, got {len(b.bund)}"
            )
        return self._rec(b)

    def _rec(self, b: _Bundled):
        if b.n <= 1:
            return self.one
        if not b.is_connected():
            return self.one - self.one
        key = canonical_key(b.to_multigraph())
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        # bridges force contraction with an up-probability factor
        val = None
        for (u, v), k in b.bund.items():
            if not b.delete(u, v).is_connected():
                val = (self.one - self.p_pow(k)) * self._rec(b.contract(u, v))
                break
        if val is None:
            # branch on a bundle at a max-degree vertex
            deg = {}
            for (u, v), k in b.bund.items():
                deg[u] = deg.get(u, 0) + 1
                deg[v] = deg.get(v, 0) + 1
            (u, v), k = max(b.bund.items(), key=lambda item: deg[item[0][0]] + deg[item[0][1]])
            down = self.p_pow(k)
            val = down * self._rec(b.delete(u, v)) + (self.one - down) * self._rec(b.contract(u, v))
        if len(self.memo) < self.memo_cap:
            self.memo[key] = val
        return val


_DELCON_CACHE: dict = {}


def eval_delcon(g, p) -> GQ:
    """Exact all-terminal reliability by memoized deletion-contraction."""
    if isinstance(g, TwoTerminal):
        g = g.graph
    ev = _DELCON_CACHE.get(p if isinstance(p, GQ) else None)
    if ev is None or ev.p != p:
        ev = DelConEvaluator(p)
        if isinstance(p, GQ):
            if len(_DELCON_CACHE) > 64:
                _DELCON_CACHE.clear()
            _DELCON_CACHE[p] = ev
    return ev.eval(g)


def eval_delcon_symbolic(g) -> RatPoly:
    """R(G;p) as an exact polynomial, deletion-contraction over RatPoly."""
    if isinstance(g, TwoTerminal):
        g = g.graph
    return DelConEvaluator(RatPoly([0, 1])).eval(g)


def symbolic(g: TwoTerminal) -> RelPolyPair:
    """Exact (R, S) polynomials; S goes through the merged-terminal graph."""
    R = eval_delcon_symbolic(g.graph)
    R_hat = eval_delcon_symbolic(merge_terminals(g))
    return RelPolyPair(R, R_hat - R)


# -- series-parallel pair recursion ----------------------------------------------


def eval_sp(expr: SPExpr, base_pair: RelPair) -> RelPair:
    """(R, S) of an SP expression from the base gadget's pair, linear time.

    Transposed leaves reuse the same pair: both R and S are invariant under
    swapping the terminals.
    """
    p = base_pair.at

    def rec(node: SPExpr):
        if node.kind in ("e", "eT"):
            return base_pair.R, base_pair.S
        parts = [rec(c) for c in node.children]
        if node.kind == "series":
            R_acc, S_acc = parts[0]
            for R_i, S_i in parts[1:]:
                R_acc, S_acc = R_acc * R_i, R_acc * S_i + S_acc * R_i
            return R_acc, S_acc
        # parallel: S multiplies, R + S multiplies
        T_acc, S_acc = parts[0][0] + parts[0][1], parts[0][1]
        for R_i, S_i in parts[1:]:
            T_acc = T_acc * (R_i + S_i)
            S_acc = S_acc * S_i
        return T_acc - S_acc, S_acc

    R, S = rec(expr)
    return RelPair(R, S, p)


def pair_of(g: TwoTerminal, p) -> RelPair:
    """Pair via brute force; convenience for small gadgets."""
    return brute_force(g, p)


# -- fully reducing weighted evaluator (oracle support) ---------------------------


def eval_weighted(n: int, weighted_edges, one=None):
    """All-terminal reliability of a graph with per-edge failure values.

    weighted_edges: list of (u, v, w) with w the exact failure probability of
    that edge.  Series and parallel reductions run first, so graphs that are
    a small core with large series-parallel attachments evaluate in roughly
    linear time; whatever core remains goes through plain del-con branching.
    """
    edges = []
    for u, v, w in weighted_edges:
        if u != v:
            edges.append((u, v, w))
    if one is None:
        one = _one_like(edges[0][2]) if edges else GQ(1)
    return _weighted_rec(n, edges, one)


def _weighted_rec(n, edges, one):
    # iterative reductions with an accumulated factor; only the del-con
    # branch at the bottom recurses (tiny cores by then)
    acc = one
    while True:
        if n <= 1:
            return acc
        # connectivity
        parent = list(range(n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v, _ in edges:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
        root = find(0)
        if any(find(v) != root for v in range(n)):
            return one - one
        # parallel merge
        seen = {}
        merged = False
        new_edges = []
        for u, v, w in edges:
            key = (u, v) if u < v else (v, u)
            if key in seen:
                idx = seen[key]
                pu, pv, pw = new_edges[idx]
                new_edges[idx] = (pu, pv, pw * w)
                merged = True
            else:
                seen[key] = len(new_edges)
                new_edges.append((key[0], key[1], w))
        edges = new_edges
        if merged:
            continue
        deg = [0] * n
        for u, v, _ in edges:
            deg[u] += 1
            deg[v] += 1
        # pendant: the single edge must be up
        pend = next((v for v in range(n) if deg[v] == 1), None)
        if pend is not None:
            rest = []
            factor = None
            for u, v, w in edges:
                if u == pend or v == pend:
                    factor = one - w
                else:
                    rest.append((u, v, w))
            n, edges = _drop_vertex(n, rest, pend)
            acc = acc * factor
            continue
        # series: degree-2 vertex with distinct neighbors
        reduced = None
        for v in range(n):
            if deg[v] != 2:
                continue
            inc = [(i, e) for i, e in enumerate(edges) if v in (e[0], e[1])]
            (i1, (a1, b1, w1)), (i2, (a2, b2, w2)) = inc
            x = a1 if b1 == v else b1
            y = a2 if b2 == v else b2
            if x == y:
                continue  # doubled edge to one neighbor; parallel merge next pass
            c = one - w1 * w2
            if not _nonzero(c):
                continue  # degenerate parameter; leave for branching
            q = (w1 + w2 - w1 * w2 - w1 * w2) / c
            rest = [e for i, e in enumerate(edges) if i not in (i1, i2)]
            rest.append((x, y, q))
            n, edges = _drop_vertex(n, rest, v)
            reduced = c
            break
        if reduced is not None:
            acc = acc * reduced
            continue
        break
    if n <= 1:
        return acc
    # bridge check, then branch
    for i, (u, v, w) in enumerate(edges):
        rest = [e for j, e in enumerate(edges) if j != i]
        if not _connected_under(n, rest):
            nn, ee = _contract_edge(n, rest, u, v)
            return acc * (one - w) * _weighted_rec(nn, ee, one)
    u, v, w = edges[0]
    rest = edges[1:]
    nn, ee = _contract_edge(n, rest, u, v)
    return acc * (w * _weighted_rec(n, rest, one) + (one - w) * _weighted_rec(nn, ee, one))


def _nonzero(x):
    if isinstance(x, GQ):
        return not x.is_zero()
    return bool(x)


def _connected_under(n, edges):
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v, _ in edges:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    root = find(0)
    return all(find(v) == root for v in range(n))


def _drop_vertex(n, edges, v):
    def relabel(x):
        return x - 1 if x > v else x

    return n - 1, [(relabel(a), relabel(b), w) for a, b, w in edges]


def _contract_edge(n, edges, u, v):
    lo, hi = (u, v) if u < v else (v, u)

    def relabel(x):
        if x == hi:
            x = lo
        return x - 1 if x > hi else x

    out = []
    for a, b, w in edges:
        ra, rb = relabel(a), relabel(b)
        if ra != rb:
            out.append((ra, rb, w))
    return n - 1, out
