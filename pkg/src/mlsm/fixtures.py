"""Catalog of small hand-checked instances shipped in ``data/fixtures.json``."""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import lru_cache
from importlib import resources
from typing import Dict, List, Optional, Tuple

from .core import Concept, Matching, MultiLayerProfile


@dataclass(frozen=True)
class FixtureVerdict:
    matching: str
    concept: Concept
    alpha: int
    holds: bool
    restrict: Optional[Tuple[int, ...]] = None
    witness: Optional[Tuple[int, int]] = None


@dataclass(frozen=True)
class Fixture:
    name: str
    profile: MultiLayerProfile
    matchings: Dict[str, Matching]
    verdicts: List[FixtureVerdict] = field(default_factory=list)
    stable_layers: Dict[str, frozenset] = field(default_factory=dict)
    blocking_layers: List[Tuple[str, Tuple[int, int], frozenset]] = field(default_factory=list)
    extra: dict = field(default_factory=dict)


@lru_cache(maxsize=1)
def _catalog() -> dict:
    text = resources.files("mlsm").joinpath("data/fixtures.json").read_text(encoding="utf-8")
    return json.loads(text)


def fixture_names() -> List[str]:
    return sorted(_catalog())


def load_fixture(name: str) -> Fixture:
    cat = _catalog()
    if name not in cat:
        raise KeyError(f"unknown fixture {name!r}; known: {', '.join(sorted(cat))}")
    entry = cat[name]
    if "alias" in entry:
        return load_fixture(entry["alias"])
    profile = MultiLayerProfile.from_lists([lay["U"] for lay in entry["layers"]], [lay["W"] for lay in entry["layers"]])
    matchings = {k: Matching.from_vector(v) for k, v in entry["matchings"].items()}
    verdicts = [
        FixtureVerdict(
            v["matching"],
            Concept.parse(v["concept"]),
            v["alpha"],
            v["holds"],
            tuple(v["restrict"]) if "restrict" in v else None,
            tuple(v["witness"]) if "witness" in v else None,
        )
        for v in entry.get("verdicts", [])
    ]
    stable = {k: frozenset(v) for k, v in entry.get("stable_layers", {}).items()}
    blocking = [(b["matching"], tuple(b["pair"]), frozenset(b["layers"])) for b in entry.get("blocking_layers", [])]
    known = {"layers", "matchings", "verdicts", "stable_layers", "blocking_layers"}
    extra = {k: v for k, v in entry.items() if k not in known}
    return Fixture(name, profile, matchings, verdicts, stable, blocking, extra)


def fixture(name: str) -> Tuple[MultiLayerProfile, Dict[str, Matching]]:
    """Profile and named matchings of a catalog entry."""
    fx = load_fixture(name)
    return fx.profile, dict(fx.matchings)
