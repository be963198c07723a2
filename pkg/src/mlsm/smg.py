"""Stable marriage where one side holds strict lists and the other holds
arbitrary asymmetric relations ``R_w`` (``(u, u') in R_w``: w prefers u to u').

A pair ``{u, w}`` blocks ``M`` iff ``u`` prefers ``w`` to ``M(u)`` and
``(M(w), u)`` is not in ``R_w``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from .core import Matching, MultiLayerProfile, Side, check_alpha, is_single_layered
from .solve import CapExceeded, PreconditionError, brute_cap


class InternalInconsistency(RuntimeError):
    pass


@dataclass(frozen=True)
class SmgInstance:
    """``u_lists[j-1]`` is u_j's strict list of W indices; ``relations[j-1]``
    is ``R_{w_j}`` as a set of ordered U-index pairs.  All indices 1-based."""

    n: int
    u_lists: Tuple[Tuple[int, ...], ...]
    relations: Tuple[FrozenSet[Tuple[int, int]], ...]

    def __post_init__(self):
        if len(self.u_lists) != self.n or len(self.relations) != self.n:
            raise ValueError("u_lists and relations must have one entry per agent")
        for j, lst in enumerate(self.u_lists, start=1):
            if sorted(lst) != list(range(1, self.n + 1)):
                raise ValueError(f"u{j}: list is not a permutation of 1..{self.n}")
        for j, rel in enumerate(self.relations, start=1):
            for a, b in rel:
                if not (1 <= a <= self.n and 1 <= b <= self.n) or a == b:
                    raise ValueError(f"R_w{j}: bad ordered pair ({a}, {b})")
                if (b, a) in rel:
                    raise ValueError(f"R_w{j} is not asymmetric: holds both ({a}, {b}) and ({b}, {a})")

    def dump_relations(self) -> str:
        lines = []
        for j, rel in enumerate(self.relations, start=1):
            lines.append(f"R_w{j}: " + " ".join(f"({a},{b})" for a, b in sorted(rel)))
        return "\n".join(lines) + "\n"


def reduce_single_layered_to_smg(profile: MultiLayerProfile, alpha: int) -> SmgInstance:
    """Collapse a U-single-layered profile into an SMG instance.

    ``(u, u')`` enters ``R_w`` iff w prefers u to u' in at least ``alpha``
    layers, which is asymmetric once ``2 * alpha > layers``.
    """
    check_alpha(profile, alpha)
    if not is_single_layered(profile, Side.U):
        raise PreconditionError("U side is not single-layered")
    if alpha < profile.layers // 2 + 1:
        raise PreconditionError(f"alpha must be >= floor(layers/2) + 1 = {profile.layers // 2 + 1}")
    n, ell = profile.n, profile.layers
    u_lists = tuple(tuple(w + 1 for w in lst) for lst in profile.u_lists[0])
    rels = []
    for w in range(n):
        rel = set()
        for a in range(n):
            for b in range(n):
                if a != b and sum(profile.w_rank[i][w][a] < profile.w_rank[i][w][b] for i in range(ell)) >= alpha:
                    rel.add((a + 1, b + 1))
        rels.append(frozenset(rel))
    return SmgInstance(n, u_lists, tuple(rels))


def smg_blocks(inst: SmgInstance, matching: Matching, pair: Tuple[int, int]) -> bool:
    u, w = pair
    if pair in matching:
        raise ValueError(f"pair (u{u}, w{w}) is matched in M")
    lst = inst.u_lists[u - 1]
    if lst.index(w) >= lst.index(matching.w_of(u)):
        return False
    return (matching.u_of(w), u) not in inst.relations[w - 1]


def smg_is_stable(inst: SmgInstance, matching: Matching) -> bool:
    n = inst.n
    for u in range(1, n + 1):
        for w in range(1, n + 1):
            if matching.w_of(u) != w and smg_blocks(inst, matching, (u, w)):
                return False
    return True


def smg_enumerate(inst: SmgInstance, cap: Optional[int] = None) -> List[Matching]:
    cap = brute_cap() if cap is None else cap
    if inst.n > cap:
        raise CapExceeded(f"n={inst.n} exceeds the brute-force cap {cap}")
    out = []
    for perm in itertools.permutations(range(1, inst.n + 1)):
        m = Matching(perm)
        if smg_is_stable(inst, m):
            out.append(m)
    return out


def _deferred_acceptance(inst: SmgInstance, work: Dict[str, int]) -> Optional[Matching]:
    # w holding u' accepts proposer u iff (u', u) not in R_w
    n = inst.n
    nxt = [0] * n
    holder = [0] * (n + 1)
    partner = [0] * (n + 1)
    free = list(range(n, 0, -1))
    proposals = 0
    while free:
        u = free.pop()
        if nxt[u - 1] >= n:
            work["proposals"] = proposals
            return None
        w = inst.u_lists[u - 1][nxt[u - 1]]
        nxt[u - 1] += 1
        proposals += 1
        cur = holder[w]
        if cur == 0:
            holder[w], partner[u] = u, w
        elif (cur, u) not in inst.relations[w - 1]:
            holder[w], partner[u] = u, w
            partner[cur] = 0
            free.append(cur)
        else:
            free.append(u)
    work["proposals"] = proposals
    return Matching(tuple(partner[1:]))


def _marking(inst: SmgInstance, work: Dict[str, int]) -> Optional[Matching]:
    # Each u walks its list; on reaching w it rules out every pair {x, w}
    # with (x, u) not in R_w, and rests at the first w whose pair with u is
    # still open.  Ruled-out pairs lie in no stable matching, because u
    # prefers w to anything still open further down its list.
    n = inst.n
    ruled = [[False] * (n + 1) for _ in range(n + 1)]  # ruled[u][w]
    pos = [0] * (n + 1)
    reached = [set() for _ in range(n + 1)]
    proposals = 0
    changed = True
    while changed:
        changed = False
        for u in range(1, n + 1):
            lst = inst.u_lists[u - 1]
            while True:
                if pos[u] >= n:
                    work["proposals"] = proposals
                    return None
                w = lst[pos[u]]
                if w not in reached[u]:
                    reached[u].add(w)
                    proposals += 1
                    rel = inst.relations[w - 1]
                    for x in range(1, n + 1):
                        if x != u and not ruled[x][w] and (x, u) not in rel:
                            ruled[x][w] = True
                            changed = True
                if not ruled[u][w]:
                    break
                pos[u] += 1
    work["proposals"] = proposals
    partner = tuple(inst.u_lists[u - 1][pos[u]] for u in range(1, n + 1))
    if len(set(partner)) != n:
        raise InternalInconsistency("marking fixpoint assigned one w to two agents; relations not asymmetric?")
    return Matching(partner)


SMG_METHOD = "marking"


def smg_solve(
    inst: SmgInstance,
    method: Optional[str] = None,
    work: Optional[Dict[str, int]] = None,
    cross_check: bool = False,
) -> Optional[Matching]:
    """An SMG-stable perfect matching, or None.

    ``method="marking"`` (default) is exact.  ``method="deferred_acceptance"``
    runs plain relation-based proposals, which can stop at an unstable
    outcome on intransitive or incomplete relations; it then returns None.
    With ``cross_check`` a None answer is confirmed against
    :func:`smg_enumerate` when ``n`` is within the cap.
    """
    method = method or SMG_METHOD
    w: Dict[str, int] = {} if work is None else work
    if method == "marking":
        m = _marking(inst, w)
    elif method == "deferred_acceptance":
        m = _deferred_acceptance(inst, w)
        if m is not None and not smg_is_stable(inst, m):
            m = None
    else:
        raise ValueError(f"unknown SMG method {method!r}")
    if m is None and cross_check and inst.n <= brute_cap():
        if smg_enumerate(inst):
            raise InternalInconsistency("SMG solver found no stable matching but enumeration did")
    return m


def solve_pair_individual_single_layered(
    profile: MultiLayerProfile,
    alpha: int,
    method: Optional[str] = None,
    work: Optional[Dict[str, int]] = None,
) -> Optional[Matching]:
    """alpha-pair (equivalently alpha-individual) stable matching of a
    profile single-layered on one side, through the SMG reduction.

    A W-single-layered profile is handled by swapping the sides.
    """
    check_alpha(profile, alpha)
    if is_single_layered(profile, Side.U):
        return smg_solve(reduce_single_layered_to_smg(profile, alpha), method, work)
    if is_single_layered(profile, Side.W):
        m = smg_solve(reduce_single_layered_to_smg(profile.transpose(), alpha), method, work)
        return None if m is None else Matching.from_zero_based(m.inverse_zero_based)
    raise PreconditionError("profile is not single-layered on either side")
