"""Stable marriage with ties and incomplete lists, and its reductions to
individual and pair stability.

Text format, one list per line (parentheses mark a tie)::

    smti 2
    U 1 : w2 (w1 w3)
    W 1 : u1 u2

Unlisted agents have empty lists.  Acceptability is made mutual on
construction: an entry survives only if the other agent lists it back.
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from ..core import AgentId, Matching, MultiLayerProfile, ParseError, Side
from ..solve import CapExceeded
from .gadget import GadgetMap, ProfileBuilder

SMTI_CAP = 8

Group = Tuple[int, ...]


@dataclass(frozen=True)
class SmtiInstance:
    """``u_prefs[i-1]`` is a tuple of groups (ties have two members, at
    most one tie per list); ``w_prefs[i-1]`` is strict.  1-based indices."""

    n: int
    u_prefs: Tuple[Tuple[Group, ...], ...]
    w_prefs: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if len(self.u_prefs) != self.n or len(self.w_prefs) != self.n:
            raise ValueError("need one list per agent on each side")
        for i, groups in enumerate(self.u_prefs, start=1):
            flat = [w for g in groups for w in g]
            if len(set(flat)) != len(flat) or any(not 1 <= w <= self.n for w in flat):
                raise ValueError(f"u{i}: list repeats an agent or is out of range")
            if any(len(g) not in (1, 2) for g in groups) or sum(len(g) == 2 for g in groups) > 1:
                raise ValueError(f"u{i}: only one tie of length two is allowed")
        for i, lst in enumerate(self.w_prefs, start=1):
            if len(set(lst)) != len(lst) or any(not 1 <= u <= self.n for u in lst):
                raise ValueError(f"w{i}: list repeats an agent or is out of range")
        for u in range(1, self.n + 1):
            for w in self.acceptable_u(u):
                if u not in self.w_prefs[w - 1]:
                    raise ValueError(f"acceptability of u{u} and w{w} is not mutual")
        for w in range(1, self.n + 1):
            for u in self.w_prefs[w - 1]:
                if w not in self.acceptable_u(u):
                    raise ValueError(f"acceptability of u{u} and w{w} is not mutual")

    @classmethod
    def create(cls, n: int, u_prefs: Sequence[Sequence], w_prefs: Sequence[Sequence[int]]) -> "SmtiInstance":
        """Build with normalization: bare ints become singleton groups and
        one-sided entries are dropped."""
        ug = [tuple((g,) if isinstance(g, int) else tuple(g) for g in lst) for lst in u_prefs]
        wl = [tuple(lst) for lst in w_prefs]
        accept_u = [{w for g in groups for w in g} for groups in ug]
        w_out = [tuple(u for u in wl[w - 1] if w in accept_u[u - 1]) for w in range(1, n + 1)]
        u_out = []
        for u, groups in enumerate(ug, start=1):
            kept = []
            for g in groups:
                g2 = tuple(w for w in g if u in wl[w - 1])
                if g2:
                    kept.append(g2)
            u_out.append(tuple(kept))
        return cls(n, tuple(u_out), tuple(w_out))

    def acceptable_u(self, u: int) -> List[int]:
        return [w for g in self.u_prefs[u - 1] for w in g]

    def u_level(self, u: int, w: int) -> Optional[int]:
        for k, g in enumerate(self.u_prefs[u - 1]):
            if w in g:
                return k
        return None


def smti_blocks(inst: SmtiInstance, partner: Dict[int, Optional[int]], u: int, w: int) -> bool:
    """The three SMTI-blocking conditions; ``partner`` maps U to W (or None)."""
    lu = inst.u_level(u, w)
    if lu is None:
        return False
    mu = partner.get(u)
    if mu == w:
        return False
    u_better = mu is None or lu < inst.u_level(u, mu)
    mw = next((x for x, y in partner.items() if y == w), None)
    wl = inst.w_prefs[w - 1]
    w_better = mw is None or wl.index(u) < wl.index(mw)
    return u_better and w_better


def smti_perfect_stable(inst: SmtiInstance, cap: int = SMTI_CAP) -> List[Matching]:
    """All perfect matchings inside the acceptability graph with no
    SMTI-blocking pair, lexicographic by assignment vector."""
    if inst.n > cap:
        raise CapExceeded(f"SMTI n={inst.n} exceeds the cap {cap}")
    out = []
    accept = [set(inst.acceptable_u(u)) for u in range(1, inst.n + 1)]
    for perm in itertools.permutations(range(1, inst.n + 1)):
        if any(perm[u - 1] not in accept[u - 1] for u in range(1, inst.n + 1)):
            continue
        partner = {u: perm[u - 1] for u in range(1, inst.n + 1)}
        if not any(smti_blocks(inst, partner, u, w) for u in partner for w in accept[u - 1]):
            out.append(Matching(perm))
    return out


# -- text format --------------------------------------------------------------

_ITEM = re.compile(r"\(|\)|[uw]?\d+")


def parse_smti(text: str) -> SmtiInstance:
    n = None
    u_prefs: Dict[int, list] = {}
    w_prefs: Dict[int, list] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        toks = line.split()
        if toks[0] == "smti":
            if n is not None or len(toks) != 2 or not toks[1].isdigit():
                raise ParseError("expected a single 'smti <n>' header", lineno)
            n = int(toks[1])
            continue
        if n is None:
            raise ParseError("list before the 'smti <n>' header", lineno)
        if toks[0] not in ("U", "W") or len(toks) < 3 or toks[2] != ":" or not toks[1].isdigit():
            raise ParseError("expected '<U|W> <j> : <list>'", lineno)
        j = int(toks[1])
        if not 1 <= j <= n:
            raise ParseError(f"agent {j} out of range 1..{n}", lineno)
        side = toks[0]
        body = line.split(":", 1)[1]
        if re.sub(r"[\s()uw\d]", "", body):
            raise ParseError(f"unexpected characters in list {body.strip()!r}", lineno)
        groups, cur = [], None
        want = "w" if side == "U" else "u"
        for item in _ITEM.findall(body):
            if item == "(":
                if cur is not None or side == "W":
                    raise ParseError("ties are only allowed on U lists and cannot nest", lineno)
                cur = []
            elif item == ")":
                if not cur or len(cur) != 2:
                    raise ParseError("a tie must hold exactly two agents", lineno)
                groups.append(tuple(cur))
                cur = None
            else:
                if item[0] in "uw" and item[0] != want:
                    raise ParseError(f"{side} lists name {want}-agents, got {item!r}", lineno)
                v = int(item.lstrip("uw"))
                if not 1 <= v <= n:
                    raise ParseError(f"agent {item} out of range 1..{n}", lineno)
                if cur is not None:
                    cur.append(v)
                else:
                    groups.append((v,))
        if cur is not None:
            raise ParseError("unclosed tie", lineno)
        table = u_prefs if side == "U" else w_prefs
        if j in table:
            raise ParseError(f"{side}{j} listed twice", lineno)
        table[j] = groups if side == "U" else [g[0] for g in groups]
    if n is None:
        raise ParseError("missing 'smti <n>' header")
    try:
        return SmtiInstance.create(
            n, [u_prefs.get(j, []) for j in range(1, n + 1)], [w_prefs.get(j, []) for j in range(1, n + 1)]
        )
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def format_smti(inst: SmtiInstance) -> str:
    out = [f"smti {inst.n}"]
    for u, groups in enumerate(inst.u_prefs, start=1):
        items = [f"w{g[0]}" if len(g) == 1 else "(" + " ".join(f"w{x}" for x in g) + ")" for g in groups]
        out.append(f"U {u} : " + " ".join(items))
    for w, lst in enumerate(inst.w_prefs, start=1):
        out.append(f"W {w} : " + " ".join(f"u{x}" for x in lst))
    return "\n".join(out) + "\n"


# -- reductions -----------------------------------------------------------------


def _build(inst: SmtiInstance, layers: int, kind: str, reverse_first: bool) -> Tuple[MultiLayerProfile, GadgetMap]:
    n, ell = inst.n, layers
    u_roles = [f"u{i}" for i in range(1, n + 1)] + [f"p{i}_{j}" for i in range(1, n + 1) for j in range(1, ell + 1)]
    w_roles = [f"w{i}" for i in range(1, n + 1)] + [f"r{i}_{j}" for i in range(1, n + 1) for j in range(1, ell + 1)]
    b = ProfileBuilder(u_roles, w_roles, ell)
    split = math.ceil(ell / 2)
    for i in range(1, n + 1):
        for k in range(1, ell + 1):
            head = []
            for g in inst.u_prefs[i - 1]:
                head += list(g) if k <= split else list(reversed(g))
            rot = [f"r{i}_{(k - 1 + t) % ell + 1}" for t in range(ell)]
            b.set(k, Side.U, f"u{i}", [f"w{w}" for w in head] + rot)
        lw = [f"u{u}" for u in inst.w_prefs[i - 1]]
        tail = [f"p{i}_{j}" for j in range(1, ell + 1)]
        for k in range(1, ell + 1):
            b.set(k, Side.W, f"w{i}", (lw[::-1] if reverse_first and k == 1 else lw) + tail)
        for j in range(1, ell + 1):
            b.set_all(Side.U, f"p{i}_{j}", [f"w{i}", f"r{i}_{j}"])
            b.set_all(Side.W, f"r{i}_{j}", [f"u{i}", f"p{i}_{j}"])
    return b.build(kind, {"n": n, "layers": ell})


def smti_to_individual(inst: SmtiInstance, layers: int, alpha: int) -> Tuple[MultiLayerProfile, GadgetMap]:
    """Profile with an alpha-individually-stable matching iff ``inst`` has
    a perfect SMTI-stable matching.  W∪R lists are identical in all layers."""
    if layers < 4:
        raise ValueError("layers must be >= 4")
    if not 2 <= alpha <= layers // 2:
        raise ValueError(f"alpha must lie in 2..{layers // 2}")
    return _build(inst, layers, "smti_individual", reverse_first=False)


def smti_to_pair_odd(inst: SmtiInstance, layers: int) -> Tuple[MultiLayerProfile, GadgetMap]:
    """As :func:`smti_to_individual`, but layer 1 reverses each ``L_w``;
    target concept is pair stability at ``layers // 2 + 1``."""
    if layers < 5 or layers % 2 == 0:
        raise ValueError("layers must be odd and >= 5")
    return _build(inst, layers, "smti_pair", reverse_first=True)


def lift_smti_matching(inst: SmtiInstance, gadget_map: GadgetMap, matching: Matching) -> Matching:
    """``M ∪ {p_ij r_ij}`` for a perfect SMTI matching ``M``."""
    ell = gadget_map.meta["layers"]
    pairs = [(gadget_map.u(f"u{u}"), gadget_map.w(f"w{w}")) for u, w in matching.pairs]
    for i in range(1, inst.n + 1):
        for j in range(1, ell + 1):
            pairs.append((gadget_map.u(f"p{i}_{j}"), gadget_map.w(f"r{i}_{j}")))
    return Matching.from_pairs(pairs)


def extract_smti_matching(gadget_map: GadgetMap, matching: Matching) -> Matching:
    """Restriction to the original agents; raises if some ``u_i`` is not
    matched inside W."""
    n = gadget_map.meta["n"]
    out = []
    for i in range(1, n + 1):
        w = matching.w_of(gadget_map.u(f"u{i}"))
        if w > n:
            raise ValueError(f"u{i} is matched to dummy {gadget_map.roles[AgentId(Side.W, w)]}")
        out.append(w)
    return Matching(tuple(out))
