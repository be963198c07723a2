"""Role bookkeeping shared by all generators.

Generators describe lists by role names ("x1", "d3", "p2_4", ...).  The
builder turns those into a validated profile, filling every unmentioned
tail with the remaining agents in ascending index order.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from ..core import AgentId, Matching, MultiLayerProfile, Side


@dataclass(frozen=True)
class GadgetMap:
    """Total map between the constructed agents and their gadget roles.

    ``kind`` names the generator; ``meta`` carries generator parameters
    that certificate extractors need (variable count, layers, ...).
    """

    kind: str
    roles: Mapping[AgentId, str]
    meta: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        index = {}
        for agent, role in self.roles.items():
            key = (agent.side, role)
            if key in index:
                raise ValueError(f"role {role!r} assigned twice on side {agent.side.value}")
            index[key] = agent
        object.__setattr__(self, "_index", index)

    def agent(self, side: Side, role: str) -> AgentId:
        try:
            return self._index[(side, role)]
        except KeyError:
            raise KeyError(f"no {side.value}-side agent with role {role!r}") from None

    def u(self, role: str) -> int:
        return self.agent(Side.U, role).index

    def w(self, role: str) -> int:
        return self.agent(Side.W, role).index

    def has(self, side: Side, role: str) -> bool:
        return (side, role) in self._index

    def role(self, agent: AgentId) -> str:
        return self.roles[agent]

    def is_total(self, profile: MultiLayerProfile) -> bool:
        want = {AgentId(s, j) for s in Side for j in range(1, profile.n + 1)}
        return set(self.roles) == want

    def matched(self, matching: Matching, u_role: str, w_role: str) -> bool:
        return matching.w_of(self.u(u_role)) == self.w(w_role)


class ProfileBuilder:
    """Collects role-named list heads per (layer, side, agent)."""

    def __init__(self, u_roles: Sequence[str], w_roles: Sequence[str], layers: int):
        if len(u_roles) != len(w_roles):
            raise ValueError(f"sides differ in size: {len(u_roles)} vs {len(w_roles)}")
        self.n = len(u_roles)
        self.layers = layers
        self.u_roles = list(u_roles)
        self.w_roles = list(w_roles)
        self.u_pos = {r: j for j, r in enumerate(u_roles, start=1)}
        self.w_pos = {r: j for j, r in enumerate(w_roles, start=1)}
        if len(self.u_pos) != self.n or len(self.w_pos) != self.n:
            raise ValueError("duplicate role names")
        self.heads: Dict[Tuple[int, Side, int], List[int]] = {}

    def set(self, layer: int, side: Side, role: str, head: Sequence[str]) -> None:
        own, other = (self.u_pos, self.w_pos) if side is Side.U else (self.w_pos, self.u_pos)
        key = (layer, side, own[role])
        self.heads[key] = [other[r] for r in head]

    def set_all(self, side: Side, role: str, head: Sequence[str], layers: Optional[Sequence[int]] = None) -> None:
        for i in layers or range(1, self.layers + 1):
            self.set(i, side, role, head)

    def _complete(self, head: List[int]) -> List[int]:
        seen = set(head)
        if len(seen) != len(head):
            raise ValueError(f"list head repeats an agent: {head}")
        return head + [x for x in range(1, self.n + 1) if x not in seen]

    def build(self, kind: str, meta: Optional[Mapping[str, object]] = None) -> Tuple[MultiLayerProfile, GadgetMap]:
        u_lists, w_lists = [], []
        for i in range(1, self.layers + 1):
            u_lists.append([self._complete(self.heads.get((i, Side.U, j), [])) for j in range(1, self.n + 1)])
            w_lists.append([self._complete(self.heads.get((i, Side.W, j), [])) for j in range(1, self.n + 1)])
        roles = {AgentId(Side.U, j): r for j, r in enumerate(self.u_roles, start=1)}
        roles.update({AgentId(Side.W, j): r for j, r in enumerate(self.w_roles, start=1)})
        profile = MultiLayerProfile.from_lists(u_lists, w_lists, labels=roles)
        return profile, GadgetMap(kind, roles, dict(meta or {}))
