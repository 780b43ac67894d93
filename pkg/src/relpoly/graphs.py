"""Multigraphs, two-terminal graphs, the series-parallel expression DSL.

Graphs are immutable once built: vertex count plus a tuple of unordered edge
pairs (parallel edges repeated, loops allowed).  The DSL generates the family
of series-parallel compositions over an arbitrary base gadget; `realize`
turns an expression into an explicit graph.
"""

from __future__ import annotations

import json
from itertools import permutations

__all__ = [
    "Multigraph",
    "TwoTerminal",
    "SPExpr",
    "parse_sp",
    "compose",
    "transpose",
    "realize",
    "substitute",
    "merge_terminals",
    "K2",
    "is_isomorphic",
]


class Multigraph:
    __slots__ = ("n", "edges")

    def __init__(self, n: int, edges):
        self.n = n
        norm = []
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u},{v}) outside vertex range [0,{n})")
            norm.append((u, v) if u <= v else (v, u))
        self.edges = tuple(norm)

    @property
    def m(self) -> int:
        return len(self.edges)

    def bundles(self):
        """Map (u,v) -> multiplicity."""
        out = {}
        for e in self.edges:
            out[e] = out.get(e, 0) + 1
        return out

    def degrees(self):
        deg = [0] * self.n
        for u, v in self.edges:
            deg[u] += 1
            deg[v] += 1
        return deg

    def is_connected(self) -> bool:
        if self.n <= 1:
            return True
        parent = list(range(self.n))

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for u, v in self.edges:
            ru, rv = find(u), find(v)
            if ru != rv:
                parent[ru] = rv
        root = find(0)
        return all(find(v) == root for v in range(self.n))

    def __eq__(self, other):
        if not isinstance(other, Multigraph):
            return NotImplemented
        return self.n == other.n and sorted(self.edges) == sorted(other.edges)

    def __hash__(self):
        return hash((self.n, tuple(sorted(self.edges))))

    def __repr__(self):
        return f"Multigraph(n={self.n}, edges={list(self.edges)})"

    # -- serialization ------------------------------------------------------

    def to_json(self):
        return {"n": self.n, "edges": [list(e) for e in self.edges]}

    @staticmethod
    def from_json(data) -> "Multigraph":
        return Multigraph(data["n"], [tuple(e) for e in data["edges"]])

    @staticmethod
    def from_adjacency_text(text: str) -> "Multigraph":
        """Adjacency-matrix form: one row per line, entries = multiplicities."""
        rows = [[int(x) for x in line.split()] for line in text.strip().splitlines()]
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("adjacency matrix is not square")
        edges = []
        for i in range(n):
            if rows[i][i] % 2:
                raise ValueError("odd diagonal entry cannot encode loops")
            edges.extend([(i, i)] * (rows[i][i] // 2))
            for j in range(i + 1, n):
                if rows[i][j] != rows[j][i]:
                    raise ValueError("adjacency matrix is not symmetric")
                edges.extend([(i, j)] * rows[i][j])
        return Multigraph(n, edges)

    def to_adjacency_text(self) -> str:
        mat = [[0] * self.n for _ in range(self.n)]
        for u, v in self.edges:
            if u == v:
                mat[u][u] += 2
            else:
                mat[u][v] += 1
                mat[v][u] += 1
        return "\n".join(" ".join(str(x) for x in row) for row in mat)


class TwoTerminal:
    __slots__ = ("graph", "s", "t")

    def __init__(self, graph: Multigraph, s: int, t: int):
        if s == t:
            raise ValueError("terminals must be distinct")
        if not (0 <= s < graph.n and 0 <= t < graph.n):
            raise ValueError("terminal outside vertex range")
        self.graph = graph
        self.s = s
        self.t = t

    @property
    def n(self):
        return self.graph.n

    @property
    def m(self):
        return self.graph.m

    @property
    def edges(self):
        return self.graph.edges

    def __eq__(self, other):
        if not isinstance(other, TwoTerminal):
            return NotImplemented
        return self.graph == other.graph and self.s == other.s and self.t == other.t

    def __hash__(self):
        return hash((self.graph, self.s, self.t))

    def __repr__(self):
        return f"TwoTerminal({self.graph!r}, s={self.s}, t={self.t})"

    def to_json(self):
        d = self.graph.to_json()
        d["s"] = self.s
        d["t"] = self.t
        return d

    @staticmethod
    def from_json(data) -> "TwoTerminal":
        return TwoTerminal(Multigraph.from_json(data), data["s"], data["t"])

    @staticmethod
    def load(path: str) -> "TwoTerminal":
        with open(path) as fh:
            return TwoTerminal.from_json(json.load(fh))


K2 = TwoTerminal(Multigraph(2, [(0, 1)]), 0, 1)


# -- series-parallel expressions ----------------------------------------------

LEAF = "e"
LEAF_T = "eT"
SERIES = "series"
PARALLEL = "parallel"


class SPExpr:
    """Flattened n-ary series/parallel expression over a base gadget."""

    __slots__ = ("kind", "children")

    def __init__(self, kind: str, children=()):
        if kind in (SERIES, PARALLEL) and len(children) < 2:
            raise ValueError(f"{kind} node needs at least two children")
        if kind in (LEAF, LEAF_T) and children:
            raise ValueError("leaves have no children")
        self.kind = kind
        self.children = tuple(children)

    @staticmethod
    def leaf(transposed: bool = False) -> "SPExpr":
        return SPExpr(LEAF_T if transposed else LEAF)

    @staticmethod
    def series(*parts) -> "SPExpr":
        return _flatten(SERIES, parts)

    @staticmethod
    def parallel(*parts) -> "SPExpr":
        return _flatten(PARALLEL, parts)

    def leaf_count(self) -> int:
        if self.kind in (LEAF, LEAF_T):
            return 1
        return sum(c.leaf_count() for c in self.children)

    def transposed(self) -> "SPExpr":
        if self.kind == LEAF:
            return SPExpr(LEAF_T)
        if self.kind == LEAF_T:
            return SPExpr(LEAF)
        kids = [c.transposed() for c in self.children]
        if self.kind == SERIES:
            kids.reverse()
        return SPExpr(self.kind, kids)

    def __eq__(self, other):
        if not isinstance(other, SPExpr):
            return NotImplemented
        return self.kind == other.kind and self.children == other.children

    def __hash__(self):
        return hash((self.kind, self.children))

    def __str__(self):
        return print_sp(self)

    def __repr__(self):
        return f"SPExpr({print_sp(self)!r})"


def _flatten(kind, parts):
    kids = []
    for p in parts:
        if p.kind == kind:
            kids.extend(p.children)
        else:
            kids.append(p)
    if len(kids) == 1:
        return kids[0]
    return SPExpr(kind, kids)


def print_sp(expr: SPExpr) -> str:
    """Canonical printer with minimal parentheses ('|' binds looser than '*')."""
    if expr.kind == LEAF:
        return "e"
    if expr.kind == LEAF_T:
        return "e^T"
    if expr.kind == SERIES:
        parts = []
        for c in expr.children:
            s = print_sp(c)
            parts.append(f"({s})" if c.kind == PARALLEL else s)
        return "*".join(parts)
    return "|".join(print_sp(c) for c in expr.children)


class SPSyntaxError(ValueError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.pos = 0

    def error(self, msg):
        raise SPSyntaxError(msg, self.pos)

    def skip_ws(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def parse_expr(self) -> SPExpr:
        parts = [self.parse_term()]
        while self.peek() == "|":
            self.pos += 1
            parts.append(self.parse_term())
        return _flatten(PARALLEL, parts) if len(parts) > 1 else parts[0]

    def parse_term(self) -> SPExpr:
        parts = [self.parse_atom()]
        while self.peek() == "*":
            self.pos += 1
            parts.append(self.parse_atom())
        return _flatten(SERIES, parts) if len(parts) > 1 else parts[0]

    def parse_atom(self) -> SPExpr:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            inner = self.parse_expr()
            if self.peek() != ")":
                self.error("expected ')'")
            self.pos += 1
            node = inner
        elif ch == "e":
            self.pos += 1
            node = SPExpr(LEAF)
        elif ch == "":
            self.error("unexpected end of input")
        else:
            self.error(f"unexpected character {ch!r}")
        while self.peek() == "^":
            self.pos += 1
            if self.pos < len(self.text) and self.text[self.pos] in "Tt":
                self.pos += 1
                node = node.transposed()
            else:
                self.error("expected 'T' after '^'")
        return node


def parse_sp(text: str) -> SPExpr:
    """Parse the SP DSL: atom `e`, postfix `^T`, `*` series, `|` parallel."""
    if not text or not text.strip():
        raise SPSyntaxError("empty input", 0)
    p = _Parser(text)
    expr = p.parse_expr()
    p.skip_ws()
    if p.pos != len(p.text):
        p.error("trailing input")
    return expr


# -- composition and realization -----------------------------------------------


def transpose(g: TwoTerminal) -> TwoTerminal:
    return TwoTerminal(g.graph, g.t, g.s)


def compose(kind: str, parts) -> TwoTerminal:
    """Glue two-terminal graphs in series or parallel.

    Series identifies t_i with s_{i+1}; parallel identifies all sources and
    all sinks.  Vertex relabeling assigns fresh ids in input order.
    """
    parts = list(parts)
    if not parts:
        raise ValueError("compose of no parts")
    if len(parts) == 1:
        return parts[0]
    if kind == SERIES:
        maps = []
        next_id = 0
        prev_t = None
        s_new = t_new = None
        edges = []
        for idx, g in enumerate(parts):
            vmap = {}
            for v in range(g.n):
                if idx > 0 and v == g.s:
                    vmap[v] = prev_t
                else:
                    vmap[v] = next_id
                    next_id += 1
            if idx == 0:
                s_new = vmap[g.s]
            prev_t = vmap[g.t]
            edges.extend((vmap[u], vmap[v]) for u, v in g.edges)
            maps.append(vmap)
        t_new = prev_t
        return TwoTerminal(Multigraph(next_id, edges), s_new, t_new)
    if kind == PARALLEL:
        next_id = 2  # 0 = shared source, 1 = shared sink
        edges = []
        for g in parts:
            vmap = {}
            for v in range(g.n):
                if v == g.s:
                    vmap[v] = 0
                elif v == g.t:
                    vmap[v] = 1
                else:
                    vmap[v] = next_id
                    next_id += 1
            edges.extend((vmap[u], vmap[v]) for u, v in g.edges)
        return TwoTerminal(Multigraph(next_id, edges), 0, 1)
    raise ValueError(f"unknown composition kind {kind!r}")


def realize(expr: SPExpr, base: TwoTerminal) -> TwoTerminal:
    """Explicit graph of an SP expression over the given base gadget."""
    if expr.kind == LEAF:
        return base
    if expr.kind == LEAF_T:
        return transpose(base)
    return compose(expr.kind, [realize(c, base) for c in expr.children])


def substitute(host, assignment):
    """Replace edges of the host by two-terminal gadgets.

    `assignment` maps edge indices (positions in host.edges) to gadgets; a
    single TwoTerminal value means "every edge".  The gadget source is
    identified with the lower-numbered endpoint of the replaced edge.
    Loops cannot be substituted.
    """
    two_terminal = isinstance(host, TwoTerminal)
    graph = host.graph if two_terminal else host
    if isinstance(assignment, TwoTerminal):
        assignment = {i: assignment for i in range(graph.m)}
    edges = []
    next_id = graph.n
    for idx, (u, v) in enumerate(graph.edges):
        gadget = assignment.get(idx)
        if gadget is None:
            edges.append((u, v))
            continue
        if u == v:
            raise ValueError("cannot substitute a gadget into a loop")
        vmap = {}
        for w in range(gadget.n):
            if w == gadget.s:
                vmap[w] = u
            elif w == gadget.t:
                vmap[w] = v
            else:
                vmap[w] = next_id
                next_id += 1
        edges.extend((vmap[a], vmap[b]) for a, b in gadget.edges)
    out = Multigraph(next_id, edges)
    if two_terminal:
        return TwoTerminal(out, host.s, host.t)
    return out


def merge_terminals(g: TwoTerminal) -> Multigraph:
    """Identify s and t; an s-t edge becomes a loop."""
    lo, hi = min(g.s, g.t), max(g.s, g.t)

    def relabel(v):
        if v == hi:
            return lo
        return v - 1 if v > hi else v

    edges = [(relabel(u), relabel(v)) for u, v in g.edges]
    return Multigraph(g.n - 1, edges)


# -- small-case isomorphism (test support) --------------------------------------


def _edge_key(g: Multigraph):
    return tuple(sorted(g.edges))


def is_isomorphic(g1, g2) -> bool:
    """Brute-force isomorphism for the small graphs used in tests.

    TwoTerminal inputs must also match terminals (s->s, t->t).
    """
    tt = isinstance(g1, TwoTerminal)
    if tt != isinstance(g2, TwoTerminal):
        return False
    a = g1.graph if tt else g1
    b = g2.graph if tt else g2
    if a.n != b.n or a.m != b.m:
        return False
    if sorted(a.degrees()) != sorted(b.degrees()):
        return False
    deg_a, deg_b = a.degrees(), b.degrees()
    target = _edge_key(b)
    for perm in permutations(range(a.n)):
        if any(deg_a[v] != deg_b[perm[v]] for v in range(a.n)):
            continue
        if tt and (perm[g1.s] != g2.s or perm[g1.t] != g2.t):
            continue
        mapped = Multigraph(a.n, [(perm[u], perm[v]) for u, v in a.edges])
        if _edge_key(mapped) == target:
            return True
    return False


def canonical_key(g: Multigraph) -> tuple:
    """Canonical form for memo keys: degree-refined search over labelings.

    Small-graph tool; cost is fine at the <=10 vertices seen by the
    deletion-contraction core after reductions.
    """
    n = g.n
    if n > 11:
        # too large to canonicalize cheaply; the labeled form is still a
        # correct (if cache-weaker) memo key
        return (n, tuple(sorted(g.edges)))
    # iterated degree refinement
    colors = [0] * n
    bund = g.bundles()
    adj = [dict() for _ in range(n)]
    for (u, v), k in bund.items():
        if u == v:
            adj[u][u] = adj[u].get(u, 0) + k
        else:
            adj[u][v] = k
            adj[v][u] = k
    for _ in range(n):
        sig = [
            (colors[v], tuple(sorted((colors[w], k) for w, k in adj[v].items())))
            for v in range(n)
        ]
        order = sorted(set(sig))
        new = [order.index(s) for s in sig]
        if new == colors:
            break
        colors = new
    # search labelings consistent with the coloring (permute within classes)
    from itertools import product
    from math import factorial

    classes = {}
    for v in range(n):
        classes.setdefault(colors[v], []).append(v)
    work = 1
    for vs in classes.values():
        work *= factorial(len(vs))
    if work > 50000:
        # key stays isomorphism-incomplete but memo-correct: exact labeled form
        return (n, tuple(sorted(g.edges)), tuple(colors))
    ordered_classes = [classes[c] for c in sorted(classes)]
    base = 0
    slot_of_class = []
    for vs in ordered_classes:
        slot_of_class.append(base)
        base += len(vs)
    best = None
    for perms in product(*(permutations(vs) for vs in ordered_classes)):
        inv = [0] * n
        for ci, perm in enumerate(perms):
            for offset, v in enumerate(perm):
                inv[v] = slot_of_class[ci] + offset
        key = tuple(sorted(tuple(sorted((inv[u], inv[v]))) for u, v in g.edges))
        if best is None or key < best:
            best = key
    return (n, best)
