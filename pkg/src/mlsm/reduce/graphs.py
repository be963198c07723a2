"""Undirected graphs, digraphs, their text formats and small oracles.

Vertices are 1-based.  Graph files use ``p graph n m`` then ``e u v``
lines; digraph files use ``p digraph n m`` then ``a u v`` lines.  Lines
starting with ``c`` or ``#`` are comments.  Several digraphs may follow
one another in one file.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import networkx as nx

from ..core import ParseError
from ..solve import CapExceeded

MIS_CAP = 10


@dataclass(frozen=True)
class Graph:
    n: int
    edges: FrozenSet[Tuple[int, int]]

    def __post_init__(self):
        norm = set()
        for a, b in self.edges:
            if a == b:
                raise ValueError(f"self-loop at vertex {a}")
            if not (1 <= a <= self.n and 1 <= b <= self.n):
                raise ValueError(f"edge ({a}, {b}) out of range 1..{self.n}")
            norm.add((min(a, b), max(a, b)))
        object.__setattr__(self, "edges", frozenset(norm))

    @classmethod
    def of(cls, n: int, edges: Iterable[Tuple[int, int]]) -> "Graph":
        return cls(n, frozenset(edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    def adjacent(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self.edges

    def neighbours(self, v: int) -> List[int]:
        return [x for x in range(1, self.n + 1) if x != v and self.adjacent(v, x)]

    def relabel(self, perm: Dict[int, int]) -> "Graph":
        return Graph.of(self.n, ((perm[a], perm[b]) for a, b in self.edges))


@dataclass(frozen=True)
class Digraph:
    n: int
    arcs: FrozenSet[Tuple[int, int]]

    def __post_init__(self):
        for a, b in self.arcs:
            if a == b:
                raise ValueError(f"self-loop at vertex {a}")
            if not (1 <= a <= self.n and 1 <= b <= self.n):
                raise ValueError(f"arc ({a}, {b}) out of range 1..{self.n}")
        object.__setattr__(self, "arcs", frozenset(self.arcs))

    @classmethod
    def of(cls, n: int, arcs: Iterable[Tuple[int, int]]) -> "Digraph":
        return cls(n, frozenset(arcs))

    @property
    def m(self) -> int:
        return len(self.arcs)

    @cached_property
    def two_cycle_free(self) -> bool:
        return all((b, a) not in self.arcs for a, b in self.arcs)

    @cached_property
    def is_tournament(self) -> bool:
        return self.two_cycle_free and self.m == self.n * (self.n - 1) // 2

    def in_degree(self, v: int) -> int:
        return sum(1 for _, b in self.arcs if b == v)

    def sorted_arcs(self) -> List[Tuple[int, int]]:
        return sorted(self.arcs)


# -- text formats -------------------------------------------------------------


def _lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line or line.split()[0] == "c":
            continue
        yield lineno, line.split()


def _ints(toks, lineno):
    try:
        return [int(t) for t in toks]
    except ValueError:
        raise ParseError(f"expected integers, got {' '.join(toks)!r}", lineno) from None


def parse_graph(text: str) -> Graph:
    n = m = None
    edges = []
    for lineno, toks in _lines(text):
        if toks[0] == "p":
            if n is not None or len(toks) != 4 or toks[1] != "graph":
                raise ParseError("expected a single 'p graph <n> <m>' header", lineno)
            n, m = _ints(toks[2:], lineno)
        elif toks[0] == "e":
            if n is None:
                raise ParseError("edge line before the header", lineno)
            if len(toks) != 3:
                raise ParseError("expected 'e <u> <v>'", lineno)
            a, b = _ints(toks[1:], lineno)
            if a == b or not (1 <= a <= n and 1 <= b <= n):
                raise ParseError(f"bad edge ({a}, {b}) for {n} vertices", lineno)
            edges.append((a, b))
        else:
            raise ParseError(f"unrecognized line starting with {toks[0]!r}", lineno)
    if n is None:
        raise ParseError("missing 'p graph <n> <m>' header")
    g = Graph.of(n, edges)
    if g.m != m:
        raise ParseError(f"header declares {m} edges, found {g.m} distinct")
    return g


def format_graph(g: Graph) -> str:
    out = [f"p graph {g.n} {g.m}"] + [f"e {a} {b}" for a, b in sorted(g.edges)]
    return "\n".join(out) + "\n"


def parse_digraphs(text: str) -> List[Digraph]:
    out: List[Digraph] = []
    cur: Optional[list] = None

    def close(lineno):
        if cur is not None:
            n, m, arcs = cur
            d = Digraph.of(n, arcs)
            if d.m != m:
                raise ParseError(f"header declares {m} arcs, found {d.m} distinct", lineno)
            out.append(d)

    for lineno, toks in _lines(text):
        if toks[0] == "p":
            if len(toks) != 4 or toks[1] != "digraph":
                raise ParseError("expected 'p digraph <n> <m>'", lineno)
            close(lineno)
            n, m = _ints(toks[2:], lineno)
            cur = [n, m, []]
        elif toks[0] == "a":
            if cur is None:
                raise ParseError("arc line before any header", lineno)
            if len(toks) != 3:
                raise ParseError("expected 'a <u> <v>'", lineno)
            a, b = _ints(toks[1:], lineno)
            if a == b or not (1 <= a <= cur[0] and 1 <= b <= cur[0]):
                raise ParseError(f"bad arc ({a}, {b}) for {cur[0]} vertices", lineno)
            cur[2].append((a, b))
        else:
            raise ParseError(f"unrecognized line starting with {toks[0]!r}", lineno)
    close(None)
    if not out:
        raise ParseError("no 'p digraph' header found")
    return out


def parse_digraph(text: str) -> Digraph:
    ds = parse_digraphs(text)
    if len(ds) != 1:
        raise ParseError(f"expected one digraph, found {len(ds)}")
    return ds[0]


def format_digraph(d: Digraph) -> str:
    out = [f"p digraph {d.n} {d.m}"] + [f"a {a} {b}" for a, b in d.sorted_arcs()]
    return "\n".join(out) + "\n"


# -- oracles ------------------------------------------------------------------


def max_independent_set(g: Graph, cap: int = MIS_CAP) -> int:
    """Size of a maximum independent set, by branching on a vertex of
    maximum degree."""
    if g.n > cap:
        raise CapExceeded(f"{g.n} vertices exceeds the independent-set cap {cap}")
    nbr = [0] * (g.n + 1)
    for a, b in g.edges:
        nbr[a] |= 1 << b
        nbr[b] |= 1 << a

    def best(alive: int) -> int:
        if not alive:
            return 0
        v = max((x for x in range(1, g.n + 1) if alive >> x & 1), key=lambda x: (nbr[x] & alive).bit_count())
        if not (nbr[v] & alive):
            return 1 + best(alive & ~(1 << v))
        return max(best(alive & ~(1 << v)), 1 + best(alive & ~(1 << v) & ~nbr[v]))

    return best(sum(1 << x for x in range(1, g.n + 1)))


def is_independent(g: Graph, vertices: Iterable[int]) -> bool:
    vs = sorted(set(vertices))
    return all(not g.adjacent(a, b) for i, a in enumerate(vs) for b in vs[i + 1 :])


def digraph_isomorphic(d1: Digraph, d2: Digraph) -> Optional[Dict[int, int]]:
    """An arc-preserving bijection ``d1 -> d2`` or None (VF2 via networkx)."""
    if d1.n != d2.n or d1.m != d2.m:
        return None
    g1, g2 = nx.DiGraph(), nx.DiGraph()
    g1.add_nodes_from(range(1, d1.n + 1))
    g2.add_nodes_from(range(1, d2.n + 1))
    g1.add_edges_from(d1.arcs)
    g2.add_edges_from(d2.arcs)
    matcher = nx.algorithms.isomorphism.DiGraphMatcher(g1, g2)
    if matcher.is_isomorphic():
        return dict(sorted(matcher.mapping.items()))
    return None


def graph_isomorphisms(g: Graph, h: Graph) -> Iterable[Dict[int, int]]:
    """Every isomorphism ``g -> h``, by brute force (tiny graphs only)."""
    if g.n != h.n or g.m != h.m:
        return
    for perm in itertools.permutations(range(1, h.n + 1)):
        f = {v: perm[v - 1] for v in range(1, g.n + 1)}
        if g.relabel(f).edges == h.edges:
            yield f
