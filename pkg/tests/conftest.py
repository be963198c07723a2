"""Shared oracles and strategies.

The naive checkers here are written from the definitions with plain list
lookups and itertools; they share no code with ``mlsm.check``.
"""
from __future__ import annotations

import itertools

from hypothesis import strategies as st

from mlsm.core import Concept, Matching, MultiLayerProfile, random_profile


def prefers(lst, a, b) -> bool:
    return lst.index(a) < lst.index(b)


def naive_blocking_layers(profile: MultiLayerProfile, partner, u: int, w: int):
    """0-based agents; ``partner[u]`` is u's partner.  1-based layer set."""
    inv = {v: k for k, v in enumerate(partner)}
    out = set()
    for i in range(profile.layers):
        if prefers(profile.u_lists[i][u], w, partner[u]) and prefers(profile.w_lists[i][w], u, inv[w]):
            out.add(i + 1)
    return out


def naive_holds(profile: MultiLayerProfile, partner, concept, alpha: int) -> bool:
    concept = Concept.parse(concept)
    n, ell = profile.n, profile.layers
    inv = {v: k for k, v in enumerate(partner)}
    unmatched = [(u, w) for u in range(n) for w in range(n) if partner[u] != w]
    if concept is Concept.GLOBAL:
        stable = [i for i in range(1, ell + 1) if all(i not in naive_blocking_layers(profile, partner, u, w) for u, w in unmatched)]
        return len(stable) >= alpha
    if concept is Concept.PAIR:
        return all(len(naive_blocking_layers(profile, partner, u, w)) <= ell - alpha for u, w in unmatched)
    for u, w in unmatched:
        u_keep = sum(prefers(profile.u_lists[i][u], partner[u], w) for i in range(ell))
        w_keep = sum(prefers(profile.w_lists[i][w], inv[w], u) for i in range(ell))
        if u_keep < alpha and w_keep < alpha:
            return False
    return True


def naive_enumerate(profile: MultiLayerProfile, concept, alpha: int):
    return [Matching.from_zero_based(p) for p in itertools.permutations(range(profile.n)) if naive_holds(profile, p, concept, alpha)]


@st.composite
def profiles(draw, n=st.integers(1, 4), layers=st.integers(1, 4)):
    """Profiles drawn list by list, independent of ``random_profile``."""
    n_ = draw(n)
    ell = draw(layers)
    base = list(range(n_))
    perm = st.permutations(base)
    u = [[draw(perm) for _ in range(n_)] for _ in range(ell)]
    w = [[draw(perm) for _ in range(n_)] for _ in range(ell)]
    return MultiLayerProfile.from_lists([[[x + 1 for x in row] for row in layer] for layer in u],
                                        [[[x + 1 for x in row] for row in layer] for layer in w])


@st.composite
def generated(draw, mode=None, n=st.integers(1, 4), layers=st.integers(1, 4)):
    m = draw(st.sampled_from(["general", "single_layered_U", "single_layered_W", "uniform"])) if mode is None else mode
    return random_profile(draw(n), draw(layers), m, draw(st.integers(0, 2**63 - 1)))


@st.composite
def profile_and_matching(draw, source=None):
    p = draw(source if source is not None else profiles())
    perm = draw(st.permutations(list(range(p.n))))
    return p, Matching.from_zero_based(perm)


# -- acceptance report -----------------------------------------------------------------

ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
