"""Domain types for multi-layer stable marriage instances.

Agents are 1-indexed in every public signature.  Profiles keep their
preference lists 0-indexed internally (``u_lists[layer][agent]``) because
every algorithm in the package indexes rank tables directly.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Dict, Iterable, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np


class Side(enum.Enum):
    U = "U"
    W = "W"

    @property
    def other(self) -> "Side":
        return Side.W if self is Side.U else Side.U


class AgentId(NamedTuple):
    side: Side
    index: int

    def __str__(self) -> str:
        return f"{self.side.value.lower()}{self.index}"


class Concept(enum.Enum):
    GLOBAL = "global"
    PAIR = "pair"
    INDIVIDUAL = "individual"

    @classmethod
    def parse(cls, text: "str | Concept") -> "Concept":
        if isinstance(text, Concept):
            return text
        try:
            return cls(text.strip().lower())
        except ValueError:
            raise ValueError(f"unknown concept {text!r}; expected global, pair or individual") from None


class ProfileError(ValueError):
    """Invalid profile data; the message names agent and layer."""


class MatchingError(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


Lists = Tuple[Tuple[Tuple[int, ...], ...], ...]


@dataclass(frozen=True)
class MultiLayerProfile:
    """``n`` agents per side, ``layers`` complete strict lists per agent.

    ``u_lists[i][u]`` is the layer-``i`` list of agent ``u`` (both 0-based),
    holding 0-based W indices, most preferred first.  ``w_lists`` mirrors it.
    Build instances through :func:`validate_profile` or :meth:`from_lists`.
    """

    n: int
    layers: int
    u_lists: Lists
    w_lists: Lists
    labels: Mapping[AgentId, str] = field(default_factory=dict, compare=False, hash=False)

    @classmethod
    def from_lists(
        cls,
        u_lists: Sequence[Sequence[Sequence[int]]],
        w_lists: Sequence[Sequence[Sequence[int]]],
        labels: Optional[Mapping[AgentId, str]] = None,
    ) -> "MultiLayerProfile":
        """Build from 1-based nested lists indexed ``[layer][agent]``."""
        if len(u_lists) != len(w_lists):
            raise ProfileError(f"layer count mismatch between sides: U has {len(u_lists)}, W has {len(w_lists)}")
        prefs = {}
        nu = len(u_lists[0]) if u_lists else 0
        nw = len(w_lists[0]) if w_lists else 0
        for i, (ul, wl) in enumerate(zip(u_lists, w_lists), start=1):
            if len(ul) != nu or len(wl) != nw:
                raise ProfileError(f"layer {i}: agent count differs from layer 1")
            for j, lst in enumerate(ul, start=1):
                prefs[(Side.U, j, i)] = list(lst)
            for j, lst in enumerate(wl, start=1):
                prefs[(Side.W, j, i)] = list(lst)
        raw = {"u_agents": nu, "w_agents": nw, "layers": len(u_lists), "prefs": prefs, "labels": labels or {}}
        return validate_profile(raw)

    # -- accessors --------------------------------------------------------

    def preference(self, side: Side, agent: int, layer: int) -> Tuple[int, ...]:
        """1-based list of ``agent`` on ``side`` in ``layer``."""
        table = self.u_lists if side is Side.U else self.w_lists
        return tuple(x + 1 for x in table[layer - 1][agent - 1])

    @cached_property
    def u_rank(self) -> Tuple[Tuple[Tuple[int, ...], ...], ...]:
        """``u_rank[i][u][w]`` is the position of ``w`` in ``u``'s layer-``i`` list."""
        return _ranks(self.u_lists, self.n)

    @cached_property
    def w_rank(self) -> Tuple[Tuple[Tuple[int, ...], ...], ...]:
        return _ranks(self.w_lists, self.n)

    def label(self, agent: AgentId) -> str:
        return self.labels.get(agent, str(agent))

    def agent_by_label(self, text: str) -> AgentId:
        for agent, lab in self.labels.items():
            if lab == text:
                return agent
        raise KeyError(text)

    # -- derived profiles ---------------------------------------------------

    def restrict(self, layers: Iterable[int]) -> "MultiLayerProfile":
        """Profile keeping only the given 1-based layers, in the given order."""
        keep = [i - 1 for i in layers]
        if not keep:
            raise ProfileError("layers must be >= 1")
        for i in keep:
            if not 0 <= i < self.layers:
                raise ProfileError(f"layer {i + 1} out of range 1..{self.layers}")
        return MultiLayerProfile(
            self.n, len(keep), tuple(self.u_lists[i] for i in keep), tuple(self.w_lists[i] for i in keep), self.labels
        )

    def transpose(self) -> "MultiLayerProfile":
        """Swap the roles of U and W."""
        labels = {AgentId(a.side.other, a.index): t for a, t in self.labels.items()}
        return MultiLayerProfile(self.n, self.layers, self.w_lists, self.u_lists, labels)


def _ranks(lists: Lists, n: int):
    out = []
    for layer in lists:
        per_agent = []
        for lst in layer:
            r = [0] * n
            for pos, x in enumerate(lst):
                r[x] = pos
            per_agent.append(tuple(r))
        out.append(tuple(per_agent))
    return tuple(out)


def validate_profile(raw: Mapping) -> MultiLayerProfile:
    """Turn loosely structured profile data into a validated profile.

    ``raw`` holds ``layers``, either ``agents`` or both ``u_agents`` and
    ``w_agents``, and ``prefs`` mapping ``(side, agent, layer)`` (1-based,
    side a :class:`Side` or ``"U"``/``"W"``) to a 1-based list.  Optional
    ``labels`` maps :class:`AgentId` to text.
    """
    layers = raw.get("layers")
    if not isinstance(layers, int) or layers < 1:
        raise ProfileError("layers must be >= 1")
    nu = raw.get("u_agents", raw.get("agents"))
    nw = raw.get("w_agents", raw.get("agents"))
    if not isinstance(nu, int) or not isinstance(nw, int) or nu < 1 or nw < 1:
        raise ProfileError("agents must be >= 1")
    if nu != nw:
        raise ProfileError(f"n mismatch between sides: |U|={nu}, |W|={nw}")
    n = nu
    prefs = {}
    for (side, j, i), lst in raw.get("prefs", {}).items():
        side = Side(side) if not isinstance(side, Side) else side
        if not 1 <= j <= n:
            raise ProfileError(f"{side.value}{j} layer {i}: agent index out of range 1..{n}")
        if not 1 <= i <= layers:
            raise ProfileError(f"{side.value}{j}: layer {i} out of range 1..{layers}")
        prefs[(side, j, i)] = lst
    tables = {}
    for side in Side:
        per_layer = []
        for i in range(1, layers + 1):
            per_agent = []
            for j in range(1, n + 1):
                where = f"{side.value}{j} layer {i}"
                if (side, j, i) not in prefs:
                    raise ProfileError(f"{where}: missing list (missing layer)")
                lst = list(prefs[(side, j, i)])
                seen = set()
                for k in lst:
                    if not isinstance(k, (int, np.integer)) or not 1 <= k <= n:
                        raise ProfileError(f"{where}: entry {k!r} out of range 1..{n}")
                    if k in seen:
                        raise ProfileError(f"{where}: duplicate entry {k}")
                    seen.add(k)
                if len(lst) != n:
                    raise ProfileError(f"{where}: wrong permutation length {len(lst)}, expected {n}")
                per_agent.append(tuple(int(k) - 1 for k in lst))
            per_layer.append(tuple(per_agent))
        tables[side] = tuple(per_layer)
    labels = {}
    for agent, text in (raw.get("labels") or {}).items():
        agent = AgentId(Side(agent[0]) if not isinstance(agent[0], Side) else agent[0], int(agent[1]))
        if not 1 <= agent.index <= n:
            raise ProfileError(f"label for {agent}: agent index out of range")
        labels[agent] = str(text)
    return MultiLayerProfile(n, layers, tables[Side.U], tables[Side.W], labels)


@dataclass(frozen=True)
class Matching:
    """Perfect matching; ``vector[j-1]`` is the W partner of ``u_j`` (1-based)."""

    vector: Tuple[int, ...]

    def __post_init__(self):
        v = tuple(int(x) for x in self.vector)
        object.__setattr__(self, "vector", v)
        n = len(v)
        if n < 1:
            raise MatchingError("matching must cover at least one agent")
        if sorted(v) != list(range(1, n + 1)):
            seen, dup = set(), None
            for x in v:
                if not 1 <= x <= n:
                    raise MatchingError(f"partner w{x} out of range 1..{n}")
                if x in seen:
                    dup = x
                seen.add(x)
            raise MatchingError(f"not a perfect matching: w{dup} is matched twice")

    @classmethod
    def from_vector(cls, vector: Sequence[int]) -> "Matching":
        return cls(tuple(vector))

    @classmethod
    def from_pairs(cls, pairs: Iterable[Tuple[int, int]]) -> "Matching":
        pairs = list(pairs)
        n = len(pairs)
        vec = [0] * n
        for u, w in pairs:
            if not 1 <= u <= n:
                raise MatchingError(f"u{u} out of range 1..{n}")
            if vec[u - 1]:
                raise MatchingError(f"u{u} is matched twice")
            vec[u - 1] = w
        if 0 in vec:
            raise MatchingError(f"u{vec.index(0) + 1} is unmatched; only perfect matchings are supported")
        return cls(tuple(vec))

    @classmethod
    def from_zero_based(cls, partner: Sequence[int]) -> "Matching":
        return cls(tuple(x + 1 for x in partner))

    @property
    def n(self) -> int:
        return len(self.vector)

    @cached_property
    def pairs(self) -> frozenset:
        return frozenset((u, w) for u, w in enumerate(self.vector, start=1))

    @cached_property
    def zero_based(self) -> Tuple[int, ...]:
        return tuple(x - 1 for x in self.vector)

    @cached_property
    def inverse_zero_based(self) -> Tuple[int, ...]:
        inv = [0] * self.n
        for u, w in enumerate(self.zero_based):
            inv[w] = u
        return tuple(inv)

    def w_of(self, u: int) -> int:
        return self.vector[u - 1]

    def u_of(self, w: int) -> int:
        return self.inverse_zero_based[w - 1] + 1

    def __contains__(self, pair) -> bool:
        u, w = pair
        return 1 <= u <= self.n and self.vector[u - 1] == w

    def __str__(self) -> str:
        return "{" + ", ".join(f"u{u}w{w}" for u, w in enumerate(self.vector, start=1)) + "}"


@dataclass(frozen=True)
class AlphaQuery:
    concept: Concept
    alpha: int

    def validate_for(self, profile: MultiLayerProfile) -> None:
        check_alpha(profile, self.alpha)


def check_alpha(profile: MultiLayerProfile, alpha: int) -> None:
    if not 1 <= alpha <= profile.layers:
        raise ValueError(f"alpha={alpha} out of range 1..{profile.layers}")


def check_matching(profile: MultiLayerProfile, matching: Matching) -> None:
    if matching.n != profile.n:
        raise MatchingError(f"matching covers {matching.n} agents, profile has {profile.n}")


# -- structural predicates ----------------------------------------------------


def is_single_layered(profile: MultiLayerProfile, side: Side) -> bool:
    lists = profile.u_lists if side is Side.U else profile.w_lists
    return all(layer == lists[0] for layer in lists)


def is_uniform(profile: MultiLayerProfile) -> bool:
    for lists in (profile.u_lists, profile.w_lists):
        for layer in lists:
            if any(lst != layer[0] for lst in layer):
                return False
    return True


# -- random instances -----------------------------------------------------------

RANDOM_MODES = ("general", "single_layered_U", "single_layered_W", "uniform")


def _permutation(seed: int, key: Tuple[int, ...], n: int) -> Tuple[int, ...]:
    # PCG64 keyed by SeedSequence(seed, spawn_key); Generator.permutation is a Fisher-Yates shuffle
    ss = np.random.SeedSequence(seed & 0xFFFFFFFFFFFFFFFF, spawn_key=key)
    return tuple(int(x) for x in np.random.Generator(np.random.PCG64(ss)).permutation(n))


def random_profile(n: int, layers: int, mode: str = "general", seed: int = 0) -> MultiLayerProfile:
    """Deterministic random profile.

    Each list is drawn from its own PCG64 stream keyed by
    ``(side, agent, layer)``, so generation order never matters.  Constrained
    modes collapse the key: ``uniform`` drops the agent, ``single_layered_*``
    drops the layer on that side.
    """
    if n < 1 or layers < 1:
        raise ValueError("n and layers must be >= 1")
    if mode not in RANDOM_MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {', '.join(RANDOM_MODES)}")
    tables = []
    for s, side in enumerate(("U", "W")):
        per_layer = []
        for i in range(layers):
            per_agent = []
            for j in range(n):
                if mode == "uniform":
                    key = (s, 0, i)
                elif mode == f"single_layered_{side}":
                    key = (s, j, 0)
                else:
                    key = (s, j, i)
                per_agent.append(_permutation(seed, key, n))
            per_layer.append(tuple(per_agent))
        tables.append(tuple(per_layer))
    return MultiLayerProfile(n, layers, tables[0], tables[1], {})


# -- text formats -----------------------------------------------------------------

_HEADER = "mlsm 1"


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _int(tok: str, lineno: int) -> int:
    try:
        return int(tok)
    except ValueError:
        raise ParseError(f"expected integer, got {tok!r}", lineno) from None


def parse_profile(text: str) -> MultiLayerProfile:
    """Parse the line-oriented instance format (see README)."""
    n = layers = None
    current = None
    prefs: Dict[Tuple[Side, int, int], List[int]] = {}
    labels: Dict[AgentId, str] = {}
    seen_header = False
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        if not seen_header:
            if line.split() != _HEADER.split():
                raise ParseError(f"expected header {_HEADER!r}", lineno)
            seen_header = True
            continue
        toks = line.split()
        head = toks[0]
        if head == "agents" and len(toks) == 2:
            n = _int(toks[1], lineno)
        elif head == "layers" and len(toks) == 2:
            layers = _int(toks[1], lineno)
        elif head == "layer" and len(toks) == 2:
            current = _int(toks[1], lineno)
            if layers is not None and not 1 <= current <= layers:
                raise ParseError(f"layer {current} out of range 1..{layers}", lineno)
        elif head == "label" and len(toks) >= 4 and toks[1] in ("U", "W"):
            labels[AgentId(Side(toks[1]), _int(toks[2], lineno))] = " ".join(toks[3:])
        elif head in ("U", "W"):
            if current is None:
                raise ParseError("preference line before any 'layer' line", lineno)
            if len(toks) < 3 or toks[2] != ":":
                raise ParseError("expected '<side> <j> : <list>'", lineno)
            key = (Side(head), _int(toks[1], lineno), current)
            if key in prefs:
                raise ParseError(f"{head}{toks[1]} listed twice in layer {current}", lineno)
            prefs[key] = [_int(t, lineno) for t in toks[3:]]
        else:
            raise ParseError(f"unrecognized line {line!r}", lineno)
    if not seen_header:
        raise ParseError(f"empty input; expected header {_HEADER!r}")
    if n is None:
        raise ParseError("missing 'agents' line")
    if layers is None:
        raise ParseError("missing 'layers' line")
    return validate_profile({"agents": n, "layers": layers, "prefs": prefs, "labels": labels})


def format_profile(profile: MultiLayerProfile) -> str:
    out = [_HEADER, f"agents {profile.n}", f"layers {profile.layers}"]
    for agent in sorted(profile.labels, key=lambda a: (a.side.value, a.index)):
        out.append(f"label {agent.side.value} {agent.index} {profile.labels[agent]}")
    for i in range(profile.layers):
        out.append(f"layer {i + 1}")
        for tag, table in (("U", profile.u_lists), ("W", profile.w_lists)):
            for j, lst in enumerate(table[i], start=1):
                out.append(f"{tag} {j} : " + " ".join(str(x + 1) for x in lst))
    return "\n".join(out) + "\n"


_MATCHING_RE = re.compile(r"^matching\s*:\s*(.*)$")


def parse_matching(text: str, n: Optional[int] = None) -> Matching:
    found = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        m = _MATCHING_RE.match(line)
        if not m or found is not None:
            raise ParseError("expected a single 'matching : <w1> ... <wn>' line", lineno)
        toks = m.group(1).split()
        try:
            found = Matching(tuple(_int(t, lineno) for t in toks))
        except MatchingError as exc:
            raise ParseError(str(exc), lineno) from None
    if found is None:
        raise ParseError("no matching line found")
    if n is not None and found.n != n:
        raise ParseError(f"matching covers {found.n} agents, expected {n}")
    return found


def format_matching(matching: Matching) -> str:
    return "matching : " + " ".join(str(w) for w in matching.vector) + "\n"
