"""Matching construction: Gale-Shapley, the marking algorithm for
all-layer individual stability, brute-force enumeration, and the solvers for
single-layered and uniform preferences.
"""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .check import analyze, is_individually_stable
from .core import (
    Concept,
    Matching,
    MultiLayerProfile,
    Side,
    check_alpha,
    is_single_layered,
    is_uniform,
)

DEFAULT_BRUTE_CAP = 8


class PreconditionError(ValueError):
    pass


class CapExceeded(ValueError):
    pass


def brute_cap() -> int:
    """Enumeration cap: ``MLSM_BRUTE_CAP`` if set, else 8 agents per side."""
    env = os.environ.get("MLSM_BRUTE_CAP")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ValueError(f"MLSM_BRUTE_CAP must be an integer, got {env!r}") from None
    return DEFAULT_BRUTE_CAP


@dataclass
class SolveReport:
    result: Optional[Matching]
    method: str
    work: Dict[str, int] = field(default_factory=dict)

    @property
    def found(self) -> bool:
        return self.result is not None


# -- Gale-Shapley --------------------------------------------------------------


def gale_shapley(
    profile: MultiLayerProfile, layer: int = 1, proposing_side: Side = Side.U, work: Optional[Dict[str, int]] = None
) -> Matching:
    """Proposer-optimal stable matching of a single layer.

    Free proposers are served in ascending index order (a stack would give
    the same matching; the order only fixes the trace).
    """
    if not 1 <= layer <= profile.layers:
        raise ValueError(f"layer {layer} out of range 1..{profile.layers}")
    i = layer - 1
    if proposing_side is Side.U:
        plists, rrank = profile.u_lists[i], profile.w_rank[i]
    else:
        plists, rrank = profile.w_lists[i], profile.u_rank[i]
    n = profile.n
    nxt = [0] * n
    holder = [-1] * n
    free = list(range(n - 1, -1, -1))
    proposals = 0
    while free:
        p = free.pop()
        r = plists[p][nxt[p]]
        nxt[p] += 1
        proposals += 1
        cur = holder[r]
        if cur < 0:
            holder[r] = p
        elif rrank[r][p] < rrank[r][cur]:
            holder[r] = p
            free.append(cur)
        else:
            free.append(p)
    if work is not None:
        work["proposals"] = proposals
    if proposing_side is Side.U:
        partner = [0] * n
        for r, p in enumerate(holder):
            partner[p] = r
        return Matching.from_zero_based(partner)
    return Matching.from_zero_based(holder)


# -- marking algorithm for all-layer individual stability -------------------------


@dataclass
class MarkState:
    """Marked pairs and per-(agent, layer) cursors of the marking algorithm."""

    n: int
    layers: int
    marked: List[List[bool]] = field(default_factory=list)
    first_unmarked: List[List[int]] = field(default_factory=list)
    count: int = 0

    def __post_init__(self):
        if not self.marked:
            self.marked = [[False] * self.n for _ in range(self.n)]
        if not self.first_unmarked:
            self.first_unmarked = [[0] * self.layers for _ in range(self.n)]

    def mark(self, u: int, w: int) -> bool:
        if self.marked[u][w]:
            return False
        self.marked[u][w] = True
        self.count += 1
        return True


def _someone_fully_marked(state: MarkState) -> bool:
    n = state.n
    for u in range(n):
        if all(state.marked[u]):
            return True
    for w in range(n):
        if all(state.marked[u][w] for u in range(n)):
            return True
    return False


def run_marking(profile: MultiLayerProfile, variant: str = "sound") -> Tuple[Optional[Matching], MarkState, int]:
    """Run the marking fixpoint; return ``(matching or None, state, passes)``.

    ``variant="literal"`` marks at the top choice unconditionally and then
    only at successive entries already marked, stopping at the first
    unmarked entry without marking there.  ``variant="sound"`` marks at
    every entry whose predecessors are all marked, the first unmarked entry
    included; a pair ``{u', w}`` is marked only if ``w``'s predecessors in
    some list of ``u`` are already ruled out.
    """
    if variant not in ("literal", "sound"):
        raise ValueError(f"unknown variant {variant!r}")
    n, ell = profile.n, profile.layers
    state = MarkState(n, ell)
    marked = state.marked
    # beaten[w][u]: agents u' that w ranks below u in some layer
    beaten = []
    for w in range(n):
        rows = []
        for u in range(n):
            out = [x for x in range(n) if x != u and any(profile.w_rank[i][w][u] < profile.w_rank[i][w][x] for i in range(ell))]
            rows.append(out)
        beaten.append(rows)

    def mark_at(u: int, w: int) -> bool:
        changed = False
        for x in beaten[w][u]:
            if not marked[x][w]:
                marked[x][w] = True
                state.count += 1
                changed = True
        return changed

    passes = 0
    while True:
        passes += 1
        changed = False
        for u in range(n):
            for i in range(ell):
                lst = profile.u_lists[i][u]
                r = 0
                if variant == "literal":
                    while True:
                        changed |= mark_at(u, lst[r])
                        r += 1
                        if r >= n or not marked[u][lst[r]]:
                            break
                else:
                    while True:
                        w = lst[r]
                        changed |= mark_at(u, w)
                        if not marked[u][w]:
                            break
                        r += 1
                        if r >= n:
                            break
                state.first_unmarked[u][i] = r
        if _someone_fully_marked(state):
            return None, state, passes
        if not changed:
            break
    partner = []
    for u in range(n):
        firsts = {next(w for w in profile.u_lists[i][u] if not marked[u][w]) for i in range(ell)}
        if len(firsts) != 1:
            return None, state, passes
        partner.append(firsts.pop())
    if len(set(partner)) != n:
        return None, state, passes
    return Matching.from_zero_based(partner), state, passes


ALG1_VARIANT = "sound"


def solve_l_individual(profile: MultiLayerProfile, variant: Optional[str] = None) -> Optional[Matching]:
    """All-layer individually stable matching, or None if none exists.

    A returned matching is re-checked directly; a failure there means the
    marking invariant (stable pairs are never marked) was broken.
    """
    m = run_marking(profile, variant or ALG1_VARIANT)[0]
    if m is not None and not is_individually_stable(profile, m, profile.layers):
        raise AssertionError("marking returned a matching that is not individually stable in every layer")
    return m


# -- brute-force enumeration ----------------------------------------------------


def _pref_tables(profile: MultiLayerProfile):
    """``pu[u][w][v]``: layers where u prefers w over v; ``pw[w][u][x]`` alike."""
    n = profile.n
    out = []
    for ranks in (profile.u_rank, profile.w_rank):
        tab = [[[0] * n for _ in range(n)] for _ in range(n)]
        for i, layer in enumerate(ranks):
            bit = 1 << i
            for a in range(n):
                r = layer[a]
                ta = tab[a]
                for b in range(n):
                    rb = r[b]
                    row = ta[b]
                    for c in range(n):
                        if rb < r[c]:
                            row[c] |= bit
        out.append(tab)
    return out


def enumerate_stable(
    profile: MultiLayerProfile,
    concept: Concept,
    alpha: int,
    limit: Optional[int] = None,
    cap: Optional[int] = None,
    work: Optional[Dict[str, int]] = None,
) -> List[Matching]:
    """All perfect matchings passing the concept at alpha, lexicographic by
    assignment vector, truncated at ``limit``.

    Depth-first over u1..un; a pair is judged as soon as both of its
    agents have partners, which prunes most branches early.
    """
    concept = Concept.parse(concept)
    check_alpha(profile, alpha)
    cap = brute_cap() if cap is None else cap
    n, ell = profile.n, profile.layers
    if n > cap:
        raise CapExceeded(f"n={n} exceeds the brute-force cap {cap}; raise it with --brute-cap or MLSM_BRUTE_CAP")
    if limit is not None and limit < 1:
        raise ValueError("limit must be >= 1")
    pu, pw = _pref_tables(profile)
    beta = ell - alpha + 1
    partner = [-1] * n  # u -> w
    owner = [-1] * n  # w -> u
    results: List[Matching] = []
    nodes = 0

    def pair_ok(x: int, y: int, alive: int) -> int:
        # returns new alive mask, or -1 to prune
        a = pu[x][y][partner[x]]
        b = pw[y][x][owner[y]]
        if concept is Concept.GLOBAL:
            return alive & ~(a & b)
        if concept is Concept.PAIR:
            return -1 if (a & b).bit_count() >= beta else alive
        return -1 if a.bit_count() >= beta and b.bit_count() >= beta else alive

    def rec(u: int, alive: int) -> bool:
        nonlocal nodes
        if u == n:
            results.append(Matching.from_zero_based(partner))
            return limit is not None and len(results) >= limit
        for w in range(n):
            if owner[w] >= 0:
                continue
            nodes += 1
            partner[u] = w
            owner[w] = u
            cur = alive
            for x in range(u):
                cur = pair_ok(x, w, cur)
                if cur < 0:
                    break
                cur = pair_ok(u, partner[x], cur)
                if cur < 0:
                    break
            ok = cur >= 0 and (concept is not Concept.GLOBAL or cur.bit_count() >= alpha)
            if ok and rec(u + 1, cur):
                partner[u] = owner[w] = -1
                return True
            partner[u] = owner[w] = -1
        return False

    rec(0, (1 << ell) - 1)
    if work is not None:
        work["nodes"] = nodes
        work["matchings_enumerated"] = len(results)
    return results


def exists_stable(profile: MultiLayerProfile, concept: Concept, alpha: int, cap: Optional[int] = None) -> bool:
    return bool(enumerate_stable(profile, concept, alpha, limit=1, cap=cap))


def all_matchings(n: int):
    for perm in itertools.permutations(range(1, n + 1)):
        yield Matching(perm)


# -- single-layered global stability ----------------------------------------------


def solve_global_single_layered(
    profile: MultiLayerProfile, alpha: int, work: Optional[Dict[str, int]] = None
) -> Optional[Matching]:
    """Try every alpha-subset of layers (lexicographic) with the marking
    algorithm on the restricted profile; first success wins."""
    check_alpha(profile, alpha)
    if not (is_single_layered(profile, Side.U) or is_single_layered(profile, Side.W)):
        raise PreconditionError("profile is not single-layered on either side")
    tried = 0
    for subset in itertools.combinations(range(1, profile.layers + 1), alpha):
        tried += 1
        m = solve_l_individual(profile.restrict(subset))
        if m is not None:
            if work is not None:
                work["subsets_tried"] = tried
            return m
    if work is not None:
        work["subsets_tried"] = tried
    return None


# -- uniform preferences --------------------------------------------------------


def uniform_layer_matching(profile: MultiLayerProfile, layer: int) -> Matching:
    """The unique stable matching of a uniform layer."""
    i = layer - 1
    w_order = profile.u_lists[i][0]  # shared list of the U agents
    u_order = profile.w_lists[i][0]
    partner = [0] * profile.n
    for u, w in zip(u_order, w_order):
        partner[u] = w
    return Matching.from_zero_based(partner)


def solve_global_uniform(profile: MultiLayerProfile, alpha: int) -> Optional[Matching]:
    check_alpha(profile, alpha)
    if not is_uniform(profile):
        raise PreconditionError("profile is not uniform")
    per_layer = [uniform_layer_matching(profile, i) for i in range(1, profile.layers + 1)]
    counts: Dict[Matching, int] = {}
    for m in per_layer:
        counts[m] = counts.get(m, 0) + 1
    for m in per_layer:  # earliest stable layer first
        if counts[m] >= alpha:
            return m
    return None


def _refine_colors(graphs):
    """Joint 1-dimensional colour refinement of several digraphs.

    Each graph is ``(n, out_sets, in_sets)``; returns one colour list per graph
    with colour ids shared across graphs.
    """
    colors = [[(len(o[v]), len(i[v])) for v in range(n)] for n, o, i in graphs]
    distinct = len({c for col in colors for c in col})
    while True:
        sigs = []
        for (n, out, inn), col in zip(graphs, colors):
            sigs.append(
                [(col[v], tuple(sorted(col[x] for x in out[v])), tuple(sorted(col[x] for x in inn[v]))) for v in range(n)]
            )
        table = {s: k for k, s in enumerate(sorted({s for sg in sigs for s in sg}))}
        colors = [[table[s] for s in sg] for sg in sigs]
        if len(table) == distinct:
            return colors
        distinct = len(table)


def digraph_isomorphism_backtrack(n: int, arcs_g, arcs_h) -> Optional[List[int]]:
    """Isomorphism ``f`` (0-based list) with ``(a,b) in G <=> (f a, f b) in H``.

    Backtracking over vertices in colour-class order after joint colour
    refinement; colour classes must match in size.
    """
    g = set(arcs_g)
    h = set(arcs_h)
    if len(g) != len(h):
        return None
    go = [set() for _ in range(n)]
    gi = [set() for _ in range(n)]
    ho = [set() for _ in range(n)]
    hi = [set() for _ in range(n)]
    for a, b in g:
        go[a].add(b)
        gi[b].add(a)
    for a, b in h:
        ho[a].add(b)
        hi[b].add(a)
    cg, ch = _refine_colors([(n, go, gi), (n, ho, hi)])
    if sorted(cg) != sorted(ch):
        return None
    by_color: Dict[int, List[int]] = {}
    for v, c in enumerate(ch):
        by_color.setdefault(c, []).append(v)
    class_size = {c: len(vs) for c, vs in by_color.items()}
    order = sorted(range(n), key=lambda v: (class_size[cg[v]], cg[v], v))
    f = [-1] * n
    used = [False] * n

    def rec(k: int) -> bool:
        if k == n:
            return True
        v = order[k]
        for t in by_color[cg[v]]:
            if used[t]:
                continue
            ok = True
            for j in range(k):
                x = order[j]
                fx = f[x]
                if ((v, x) in g) != ((t, fx) in h) or ((x, v) in g) != ((fx, t) in h):
                    ok = False
                    break
            if ok:
                f[v] = t
                used[t] = True
                if rec(k + 1):
                    return True
                used[t] = False
                f[v] = -1
        return False

    return list(f) if rec(0) else None


def solve_individual_uniform(profile: MultiLayerProfile, alpha: int) -> Optional[Matching]:
    """Individual stability on uniform profiles via tournament isomorphism.

    Needs ``alpha >= layers/2 + 1``: then every agent pair carries at least
    one induced arc, so either some pair carries both (no stable matching)
    or both induced digraphs are tournaments and stable matchings are
    exactly their isomorphisms.
    """
    from .reduce.uniform import induce_digraphs

    check_alpha(profile, alpha)
    if not is_uniform(profile):
        raise PreconditionError("profile is not uniform")
    if 2 * alpha < profile.layers + 2:
        raise PreconditionError(f"alpha must be >= layers/2 + 1 = {profile.layers / 2 + 1:g}")
    g, h = induce_digraphs(profile, alpha)
    for d in (g, h):
        if any((b, a) in d.arcs for a, b in d.arcs):
            return None
    f = digraph_isomorphism_backtrack(profile.n, [(a - 1, b - 1) for a, b in g.arcs], [(a - 1, b - 1) for a, b in h.arcs])
    if f is None:
        return None
    return Matching.from_zero_based(f)


# -- dispatcher -----------------------------------------------------------------

METHODS = ("auto", "gale_shapley", "alg1", "xp", "uniform_global", "uniform_individual", "smg", "brute")


def choose_method(profile: MultiLayerProfile, concept: Concept, alpha: int) -> str:
    concept = Concept.parse(concept)
    ell = profile.layers
    single = is_single_layered(profile, Side.U) or is_single_layered(profile, Side.W)
    if alpha == 1:
        return "gale_shapley"
    if concept is Concept.INDIVIDUAL and alpha == ell:
        return "alg1"
    if single and concept is Concept.GLOBAL:
        return "xp"
    if single and alpha > ell // 2:
        return "smg"
    if is_uniform(profile):
        if concept is Concept.GLOBAL:
            return "uniform_global"
        if concept is Concept.INDIVIDUAL and 2 * alpha >= ell + 2:
            return "uniform_individual"
    return "brute"


def solve(
    profile: MultiLayerProfile,
    concept: Concept,
    alpha: int,
    method: str = "auto",
    cap: Optional[int] = None,
) -> SolveReport:
    """Find one matching stable under ``concept`` at ``alpha``."""
    concept = Concept.parse(concept)
    check_alpha(profile, alpha)
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {', '.join(METHODS)}")
    if method == "auto":
        method = choose_method(profile, concept, alpha)
    work: Dict[str, int] = {}
    if method == "gale_shapley":
        if alpha != 1:
            raise PreconditionError("gale_shapley only answers alpha = 1")
        result = gale_shapley(profile, 1, work=work)
    elif method == "alg1":
        if concept is not Concept.INDIVIDUAL or alpha != profile.layers:
            raise PreconditionError("alg1 answers individual stability at alpha = layers only")
        result, state, passes = run_marking(profile, ALG1_VARIANT)
        work.update(pairs_marked=state.count, passes=passes)
    elif method == "xp":
        if concept is not Concept.GLOBAL:
            raise PreconditionError("xp answers global stability only")
        result = solve_global_single_layered(profile, alpha, work)
    elif method == "smg":
        from .smg import solve_pair_individual_single_layered

        if concept is Concept.GLOBAL:
            raise PreconditionError("smg answers pair and individual stability only")
        result = solve_pair_individual_single_layered(profile, alpha, work=work)
    elif method == "uniform_global":
        if concept is not Concept.GLOBAL:
            raise PreconditionError("uniform_global answers global stability only")
        result = solve_global_uniform(profile, alpha)
    elif method == "uniform_individual":
        if concept is not Concept.INDIVIDUAL:
            raise PreconditionError("uniform_individual answers individual stability only")
        result = solve_individual_uniform(profile, alpha)
    else:
        found = enumerate_stable(profile, concept, alpha, limit=1, cap=cap, work=work)
        result = found[0] if found else None
    if result is not None and not analyze(profile, result).holds(concept, alpha):
        raise AssertionError(f"method {method} returned a matching that fails {concept.value} stability at {alpha}")
    return SolveReport(result, method, work)
