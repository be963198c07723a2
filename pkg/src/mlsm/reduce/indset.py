"""Independent set to globally stable marriage with single-layered U.

Vertex v_i yields ``u_i, ub_i, a_i`` on U and ``w_i, wb_i, b_i`` on W
(listed per vertex in that order).  Layer i encodes the neighbourhood of
v_i; a matching stable in layer i selects v_i and excludes its
neighbours.
"""
from __future__ import annotations

from typing import FrozenSet, Tuple

from ..check import stable_layer_set
from ..core import Matching, MultiLayerProfile, Side
from .gadget import GadgetMap, ProfileBuilder
from .graphs import Graph, is_independent


def independent_set_to_global(graph: Graph, k: int) -> Tuple[MultiLayerProfile, GadgetMap, int]:
    n = graph.n
    if not 1 <= k <= n:
        raise ValueError(f"k must lie in 1..{n}")
    u_roles = [r for i in range(1, n + 1) for r in (f"u{i}", f"ub{i}", f"a{i}")]
    w_roles = [r for i in range(1, n + 1) for r in (f"w{i}", f"wb{i}", f"b{i}")]
    b = ProfileBuilder(u_roles, w_roles, n)
    for i in range(1, n + 1):
        b.set_all(Side.U, f"u{i}", [f"wb{i}", f"w{i}"])
        b.set_all(Side.U, f"ub{i}", [f"w{i}", f"wb{i}"])
        b.set_all(Side.U, f"a{i}", [f"w{i}", f"b{i}"])
        b.set_all(Side.W, f"b{i}", [f"a{i}"])
    for layer in range(1, n + 1):
        for j in range(1, n + 1):
            if j == layer:
                b.set(layer, Side.W, f"w{j}", [f"u{j}", f"a{j}"])
                b.set(layer, Side.W, f"wb{j}", [f"ub{j}"])
            elif graph.adjacent(layer, j):
                b.set(layer, Side.W, f"w{j}", [f"ub{j}"])
                b.set(layer, Side.W, f"wb{j}", [f"u{j}"])
            else:
                b.set(layer, Side.W, f"w{j}", [f"u{j}", f"ub{j}"])
                b.set(layer, Side.W, f"wb{j}", [f"ub{j}", f"u{j}"])
    profile, gmap = b.build("indset", {"n": n, "k": k, "edges": tuple(sorted(graph.edges))})
    return profile, gmap, k


def independent_set_matching(gadget_map: GadgetMap, chosen) -> Matching:
    """``M_i^vc`` on chosen vertices, ``M_j^ind`` elsewhere, and every
    ``a_i b_i``."""
    chosen = set(chosen)
    pairs = []
    for i in range(1, gadget_map.meta["n"] + 1):
        if i in chosen:
            pairs += [(f"u{i}", f"w{i}"), (f"ub{i}", f"wb{i}")]
        else:
            pairs += [(f"u{i}", f"wb{i}"), (f"ub{i}", f"w{i}")]
        pairs.append((f"a{i}", f"b{i}"))
    return Matching.from_pairs((gadget_map.u(u), gadget_map.w(w)) for u, w in pairs)


def extract_independent_set(profile: MultiLayerProfile, gadget_map: GadgetMap, matching: Matching) -> FrozenSet[int]:
    """Vertices whose layer the matching is stable in; checked to be
    independent."""
    chosen = stable_layer_set(profile, matching)
    g = Graph.of(gadget_map.meta["n"], gadget_map.meta["edges"])
    if not is_independent(g, chosen):
        raise ValueError(f"stable layers {sorted(chosen)} are not independent; inconsistent gadget map")
    return chosen
