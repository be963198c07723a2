"""Graph isomorphism to individual stability with uniform preferences.

A graph on ``n`` vertices becomes a digraph on ``n + 3 + 2*C(n, 2)``
vertices, in this order: the original vertices ``v1..vn``, ``prime``,
``deputy``, one connector ``conn_i_j`` per vertex pair, the star
connector ``conn_*``, then per pair either ``sink_i_j`` (edge) or
``source_i_j`` (non-edge).  Two gadget digraphs are then written as a
uniform profile by :func:`mcgarvey`; an isomorphism of the graphs maps
to an individually stable matching at alpha = layers / 2.
"""
from __future__ import annotations

import itertools
from typing import List, Mapping, Tuple

from ..core import AgentId, Matching, MultiLayerProfile, Side
from .gadget import GadgetMap
from .graphs import Digraph, Graph
from .uniform import mcgarvey


def _pairs(n: int) -> List[Tuple[int, int]]:
    return list(itertools.combinations(range(1, n + 1), 2))


def _s(graph: Graph, p: Tuple[int, int]) -> str:
    return f"{'sink' if graph.adjacent(*p) else 'source'}_{p[0]}_{p[1]}"


def gi_roles(graph: Graph) -> List[str]:
    pairs = _pairs(graph.n)
    roles = [f"v{i}" for i in range(1, graph.n + 1)] + ["prime", "deputy"]
    roles += [f"conn_{a}_{b}" for a, b in pairs] + ["conn_*"]
    roles += [_s(graph, p) for p in pairs]
    return roles


def gi_gadget(graph: Graph) -> Digraph:
    n = graph.n
    if n < 4 or graph.m < 3:
        raise ValueError(f"gadget needs n >= 4 and m >= 3, got n={n}, m={graph.m}")
    roles = gi_roles(graph)
    idx = {r: k for k, r in enumerate(roles, start=1)}
    pairs = _pairs(n)
    specials = [_s(graph, p) for p in pairs]
    V = [f"v{i}" for i in range(1, n + 1)]
    arcs = set()

    def add(a: str, b: str) -> None:
        arcs.add((idx[a], idx[b]))

    for p in pairs:
        v, v2 = f"v{p[0]}", f"v{p[1]}"
        conn, s = f"conn_{p[0]}_{p[1]}", _s(graph, p)
        bundle = [(v, s), (v2, s)] if graph.adjacent(*p) else [(s, v), (s, v2)]
        for a, b in bundle + [(v, conn), (v2, conn), (s, conn)]:
            add(a, b)
        for x in V:
            if x not in (v, v2):
                add(conn, x)
        for x in specials:
            if x != s:
                add(conn, x)
    for x in specials:
        add(x, "conn_*")
    for x in V:
        add("conn_*", x)
    for x in roles:
        if x not in ("prime", "deputy"):
            add("prime", x)
    for x in specials + ["prime"]:
        add("deputy", x)
    for p in pairs:
        add(f"conn_{p[0]}_{p[1]}", "deputy")
    add("conn_*", "deputy")
    return Digraph.of(len(roles), arcs)


def gi_to_uniform(g: Graph, h: Graph) -> Tuple[MultiLayerProfile, int]:
    if g.n != h.n or g.m != h.m:
        raise ValueError("graphs must have equal vertex and edge counts")
    profile, alpha = mcgarvey(gi_gadget(g), gi_gadget(h))
    labels = gi_gadget_map(g, h).roles
    return MultiLayerProfile(profile.n, profile.layers, profile.u_lists, profile.w_lists, labels), alpha


def gi_gadget_map(g: Graph, h: Graph) -> GadgetMap:
    roles = {AgentId(Side.U, k): r for k, r in enumerate(gi_roles(g), start=1)}
    roles.update({AgentId(Side.W, k): r for k, r in enumerate(gi_roles(h), start=1)})
    return GadgetMap("gi", roles, {"n": g.n})


def assemble_gi_matching(g: Graph, h: Graph, iso: Mapping[int, int]) -> Matching:
    """Matching induced by a graph isomorphism ``iso: V(g) -> V(h)``."""
    if sorted(iso) != list(range(1, g.n + 1)) or sorted(iso.values()) != list(range(1, h.n + 1)):
        raise ValueError("iso must be a bijection between the vertex sets")
    if g.relabel(dict(iso)).edges != h.edges:
        raise ValueError("iso does not map the edges of g onto the edges of h")
    gm = gi_gadget_map(g, h)
    pairs = [(f"v{v}", f"v{iso[v]}") for v in iso] + [("prime", "prime"), ("deputy", "deputy"), ("conn_*", "conn_*")]
    for p in _pairs(g.n):
        q = tuple(sorted((iso[p[0]], iso[p[1]])))
        pairs.append((f"conn_{p[0]}_{p[1]}", f"conn_{q[0]}_{q[1]}"))
        pairs.append((_s(g, p), _s(h, q)))
    return Matching.from_pairs((gm.u(a), gm.w(b)) for a, b in pairs)

