"""Uniform profiles as digraph pairs.

At threshold ``t = layers - alpha + 1``, ``G_I`` on U has arc (u, u') when
the shared W-side list ranks u above u' in at least t layers; ``H_I`` on W
is the mirror image.  :func:`mcgarvey` goes the other way.
"""
from __future__ import annotations

from typing import List, Tuple

from ..core import Matching, MultiLayerProfile, check_alpha, is_uniform
from ..solve import PreconditionError
from .graphs import Digraph


def _majority(lists, n: int, threshold: int) -> Digraph:
    # lists[i] is the shared layer-i order (0-based agents)
    count = [[0] * n for _ in range(n)]
    for lst in lists:
        for p, a in enumerate(lst):
            for b in lst[p + 1 :]:
                count[a][b] += 1
    return Digraph.of(n, ((a + 1, b + 1) for a in range(n) for b in range(n) if a != b and count[a][b] >= threshold))


def induce_digraphs(profile: MultiLayerProfile, alpha: int) -> Tuple[Digraph, Digraph]:
    check_alpha(profile, alpha)
    if not is_uniform(profile):
        raise PreconditionError("profile is not uniform")
    t = profile.layers - alpha + 1
    g = _majority([profile.w_lists[i][0] for i in range(profile.layers)], profile.n, t)
    h = _majority([profile.u_lists[i][0] for i in range(profile.layers)], profile.n, t)
    return g, h


def check_individual_via_digraphs(g: Digraph, h: Digraph, matching: Matching) -> bool:
    """No arc (u, u') of G with (M(u'), M(u)) in H, and no arc (w, w') of H
    with (M^-1(w'), M^-1(w)) in G."""
    if g.n != h.n or g.n != matching.n:
        raise ValueError(f"vertex counts differ: G has {g.n}, H has {h.n}, matching covers {matching.n}")
    for a, b in g.arcs:
        if (matching.w_of(b), matching.w_of(a)) in h.arcs:
            return False
    for a, b in h.arcs:
        if (matching.u_of(b), matching.u_of(a)) in g.arcs:
            return False
    return True


def _encode(arc: Tuple[int, int], n: int) -> Tuple[List[int], List[int]]:
    a, b = arc
    rest = [x for x in range(1, n + 1) if x not in (a, b)]
    return [a, b] + rest, rest[::-1] + [a, b]


def mcgarvey(g: Digraph, h: Digraph) -> Tuple[MultiLayerProfile, int]:
    """Uniform profile with ``2m`` layers inducing ``(g, h)`` at alpha = m.

    The i-th arc of each digraph, in (tail, head) order, is written into
    layers 2i-1 and 2i: W-side lists for ``g``, U-side lists for ``h``.
    An encoded arc's pair agrees in m + 1 layers, any other ordered pair
    in at most m, so the threshold m + 1 recovers exactly the arc set.
    """
    if g.n != h.n:
        raise ValueError(f"vertex counts differ: {g.n} vs {h.n}")
    if g.m != h.m:
        raise ValueError(f"arc counts differ: {g.m} vs {h.m}")
    if g.m < 1:
        raise ValueError("need at least one arc")
    for name, d in (("G", g), ("H", h)):
        if not d.two_cycle_free:
            raise ValueError(f"{name} has a 2-cycle; the majority encoding cannot represent it")
    n, m = g.n, g.m
    u_layers, w_layers = [], []
    for ga, ha in zip(g.sorted_arcs(), h.sorted_arcs()):
        for wl, ul in zip(_encode(ga, n), _encode(ha, n)):
            w_layers.append([wl] * n)
            u_layers.append([ul] * n)
    return MultiLayerProfile.from_lists(u_layers, w_layers), m
