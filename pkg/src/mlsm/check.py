"""Domination, blocking and the three alpha-stability predicates.

Every predicate here is an exhaustive scan over unmatched pairs.  The work
is shared through :class:`MatchingAnalysis`, which records, for each pair
``(u, w)``, the bitmask of layers where ``u`` prefers ``w`` to ``M(u)`` and
the mask where ``w`` prefers ``u`` to ``M(w)``.  Bit ``i`` stands for layer
``i + 1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import FrozenSet, List, Optional, Tuple

from .core import Concept, Matching, MultiLayerProfile, check_alpha, check_matching

Pair = Tuple[int, int]


def mask_to_layers(mask: int) -> FrozenSet[int]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def _shared_agent(p: Pair, q: Pair) -> str:
    if p[0] == q[0] and p[1] != q[1]:
        return "u"
    if p[1] == q[1] and p[0] != q[0]:
        return "w"
    if p == q:
        return "same"
    raise ValueError(f"pairs {p} and {q} share no agent")


def _check_layer(profile: MultiLayerProfile, layer: int) -> None:
    if not 1 <= layer <= profile.layers:
        raise ValueError(f"layer {layer} out of range 1..{profile.layers}")


def dominates(profile: MultiLayerProfile, pair: Pair, other: Pair, layer: int) -> bool:
    """Whether ``pair`` dominates ``other`` in ``layer``.

    The pairs are ``(u, w)`` tuples sharing exactly one agent; the shared
    agent must strictly prefer its partner in ``pair``.
    """
    _check_layer(profile, layer)
    kind = _shared_agent(pair, other)
    i = layer - 1
    if kind == "same":
        return False
    if kind == "u":
        r = profile.u_rank[i][pair[0] - 1]
        return r[pair[1] - 1] < r[other[1] - 1]
    r = profile.w_rank[i][pair[1] - 1]
    return r[pair[0] - 1] < r[other[0] - 1]


def dominating_layers(profile: MultiLayerProfile, pair: Pair, other: Pair) -> FrozenSet[int]:
    return frozenset(i for i in range(1, profile.layers + 1) if dominates(profile, pair, other, i))


def is_beta_dominating(profile: MultiLayerProfile, pair: Pair, other: Pair, beta: int) -> bool:
    _shared_agent(pair, other)
    return len(dominating_layers(profile, pair, other)) >= beta


def _check_unmatched(profile: MultiLayerProfile, matching: Matching, pair: Pair) -> None:
    check_matching(profile, matching)
    u, w = pair
    if not (1 <= u <= profile.n and 1 <= w <= profile.n):
        raise ValueError(f"pair {pair} out of range")
    if pair in matching:
        raise ValueError(f"pair (u{u}, w{w}) is matched in M")


def blocks(profile: MultiLayerProfile, matching: Matching, pair: Pair, layer: int) -> bool:
    _check_unmatched(profile, matching, pair)
    u, w = pair
    return dominates(profile, pair, (u, matching.w_of(u)), layer) and dominates(
        profile, pair, (matching.u_of(w), w), layer
    )


def blocking_layers(profile: MultiLayerProfile, matching: Matching, pair: Pair) -> FrozenSet[int]:
    _check_unmatched(profile, matching, pair)
    return frozenset(i for i in range(1, profile.layers + 1) if blocks(profile, matching, pair, i))


def is_beta_blocking(profile: MultiLayerProfile, matching: Matching, pair: Pair, beta: int) -> bool:
    return len(blocking_layers(profile, matching, pair)) >= beta


@dataclass(frozen=True)
class Witness:
    """An unmatched pair that violates the concept.

    ``layers`` are the layers where the pair blocks (global and pair
    concepts) or, for the individual concept, the layers where ``u``
    prefers ``w`` to its partner; ``w_layers`` then holds the other side.
    """

    pair: Pair
    layers: FrozenSet[int]
    w_layers: Optional[FrozenSet[int]] = None


@dataclass(frozen=True)
class StabilityVerdict:
    holds: bool
    witness: Optional[Witness] = None
    certificate: Optional[FrozenSet[int]] = None

    def __bool__(self) -> bool:
        return self.holds


def _popcount(x: int) -> int:
    return bin(x).count("1")


class MatchingAnalysis:
    """Per-pair layer masks of one matching, computed in O(layers * n^2)."""

    def __init__(self, profile: MultiLayerProfile, matching: Matching):
        check_matching(profile, matching)
        self.profile = profile
        self.matching = matching
        n, ell = profile.n, profile.layers
        mu = matching.zero_based
        mw = matching.inverse_zero_based
        udom = [[0] * n for _ in range(n)]
        wdom = [[0] * n for _ in range(n)]  # indexed [u][w] as well
        for i in range(ell):
            bit = 1 << i
            ul, ur = profile.u_lists[i], profile.u_rank[i]
            wl, wr = profile.w_lists[i], profile.w_rank[i]
            for u in range(n):
                row = udom[u]
                for w in ul[u][: ur[u][mu[u]]]:
                    row[w] |= bit
            for w in range(n):
                for u in wl[w][: wr[w][mw[w]]]:
                    wdom[u][w] |= bit
        self.u_dom = udom
        self.w_dom = wdom
        self.full = (1 << ell) - 1

    @cached_property
    def block(self) -> List[List[int]]:
        return [[a & b for a, b in zip(ru, rw)] for ru, rw in zip(self.u_dom, self.w_dom)]

    @cached_property
    def unstable_mask(self) -> int:
        acc = 0
        for row in self.block:
            for m in row:
                acc |= m
        return acc

    @cached_property
    def stable_layers(self) -> FrozenSet[int]:
        return mask_to_layers(self.full & ~self.unstable_mask)

    @cached_property
    def max_block_count(self) -> int:
        return max((_popcount(m) for row in self.block for m in row), default=0)

    @cached_property
    def max_individual_count(self) -> int:
        best = 0
        for ru, rw in zip(self.u_dom, self.w_dom):
            for a, b in zip(ru, rw):
                c = min(_popcount(a), _popcount(b))
                if c > best:
                    best = c
        return best

    # matched pairs never dominate themselves, so their masks are all zero

    def max_alpha(self, concept: Concept) -> int:
        ell = self.profile.layers
        concept = Concept.parse(concept)
        if concept is Concept.GLOBAL:
            return len(self.stable_layers)
        if concept is Concept.PAIR:
            return ell - self.max_block_count
        return ell - self.max_individual_count

    def holds(self, concept: Concept, alpha: int) -> bool:
        return alpha <= self.max_alpha(concept)

    def verdict(self, concept: Concept, alpha: int) -> StabilityVerdict:
        check_alpha(self.profile, alpha)
        concept = Concept.parse(concept)
        ell = self.profile.layers
        if concept is Concept.GLOBAL:
            stable = sorted(self.stable_layers)
            if len(stable) >= alpha:
                return StabilityVerdict(True, certificate=frozenset(stable[:alpha]))
            return StabilityVerdict(False, witness=self._first(lambda u, w: self.block[u][w] != 0))
        beta = ell - alpha + 1
        if concept is Concept.PAIR:
            found = self._first(lambda u, w: _popcount(self.block[u][w]) >= beta)
        else:
            found = self._first(
                lambda u, w: _popcount(self.u_dom[u][w]) >= beta and _popcount(self.w_dom[u][w]) >= beta,
                individual=True,
            )
        return StabilityVerdict(found is None, witness=found)

    def _first(self, pred, individual: bool = False) -> Optional[Witness]:
        n = self.profile.n
        for u in range(n):
            for w in range(n):
                if w != self.matching.zero_based[u] and pred(u, w):
                    if individual:
                        return Witness((u + 1, w + 1), mask_to_layers(self.u_dom[u][w]), mask_to_layers(self.w_dom[u][w]))
                    return Witness((u + 1, w + 1), mask_to_layers(self.block[u][w]))
        return None


def analyze(profile: MultiLayerProfile, matching: Matching) -> MatchingAnalysis:
    return MatchingAnalysis(profile, matching)


def is_stable_in_layer(profile: MultiLayerProfile, matching: Matching, layer: int) -> bool:
    _check_layer(profile, layer)
    return layer in analyze(profile, matching).stable_layers


def stable_layer_set(profile: MultiLayerProfile, matching: Matching) -> FrozenSet[int]:
    return analyze(profile, matching).stable_layers


def is_globally_stable(profile: MultiLayerProfile, matching: Matching, alpha: int) -> StabilityVerdict:
    return analyze(profile, matching).verdict(Concept.GLOBAL, alpha)


def is_pair_stable(profile: MultiLayerProfile, matching: Matching, alpha: int) -> StabilityVerdict:
    return analyze(profile, matching).verdict(Concept.PAIR, alpha)


def is_individually_stable(profile: MultiLayerProfile, matching: Matching, alpha: int) -> StabilityVerdict:
    return analyze(profile, matching).verdict(Concept.INDIVIDUAL, alpha)


def is_stable(profile: MultiLayerProfile, matching: Matching, concept: Concept, alpha: int) -> StabilityVerdict:
    return analyze(profile, matching).verdict(concept, alpha)


def max_alpha(profile: MultiLayerProfile, matching: Matching, concept: Concept) -> int:
    """Largest alpha at which the concept holds, 0 if none.

    Uses the closed forms: pair stability fails exactly when some pair
    blocks ``layers - alpha + 1`` layers, and individual stability fails
    exactly when some pair reaches that count on both sides.
    """
    return analyze(profile, matching).max_alpha(concept)
