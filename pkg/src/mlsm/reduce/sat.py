"""Restricted 3-SAT to globally stable marriage.

Each variable x_i gets agents ``x_i, x̄_i`` (U) and ``y_i, ȳ_i`` (W); each
clause C_j gets ``a_j, b_j, c_j`` (U) and ``d_j, e_j, f_j`` (W).  Role
names are ``x1 xb1 y1 yb1 a1 ... f1``; dummy agents for the general
(alpha, layers) case are ``du1 .. / dw1 ..``.

U order: x1 xb1 x2 xb2 ... a1 b1 c1 a2 ...; W order: y1 yb1 ... d1 e1 f1 ...
"""
from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

from ..core import Matching, MultiLayerProfile, Side
from .cnf import CnfFormula, is_restricted
from .gadget import GadgetMap, ProfileBuilder


def _x(l: int) -> str:
    return f"x{abs(l)}"


def _xb(l: int) -> str:
    return f"xb{abs(l)}"


def _y(l: int) -> str:
    return f"y{abs(l)}"


def _yb(l: int) -> str:
    return f"yb{abs(l)}"


def _insertion_lists(cnf: CnfFormula):
    A: Dict[int, List[str]] = {i: [] for i in range(1, cnf.num_vars + 1)}
    D = {i: [] for i in A}
    A2 = {i: [] for i in A}
    D2 = {i: [] for i in A}
    for j, c in enumerate(cnf.clauses, start=1):
        if len(c) == 3 and c[1] < 0:
            A[-c[1]].append(f"a{j}")
        elif len(c) == 2 and c[0] < 0:
            A[-c[0]].append(f"a{j}")
        if c[0] > 0:
            D[c[0]].append(f"d{j}")
        if c[-1] > 0:
            A2[c[-1]].append(f"a{j}")
        else:
            D2[-c[-1]].append(f"d{j}")
    return A, D, A2, D2


def _layer_one(b: ProfileBuilder, cnf: CnfFormula, ins, layer: int) -> None:
    A, D, _, _ = ins
    for i in range(1, cnf.num_vars + 1):
        b.set(layer, Side.U, f"x{i}", [f"y{i}", *D[i], f"yb{i}"])
        b.set(layer, Side.U, f"xb{i}", [f"yb{i}", f"y{i}"])
        b.set(layer, Side.W, f"y{i}", [f"xb{i}", *A[i], f"x{i}"])
        b.set(layer, Side.W, f"yb{i}", [f"x{i}", f"xb{i}"])
    for j, c in enumerate(cnf.clauses, start=1):
        a, bb, cc, d, e, f = (f"{t}{j}" for t in "abcdef")
        if len(c) == 3:
            heads = {
                a: [d, e, _y(c[1]), f], bb: [e, f, d], cc: [f, d, e],
                d: [bb, cc, _x(c[0]), a], e: [cc, a, bb], f: [a, bb, cc],
            }
        elif c[0] > 0:
            heads = {a: [d, e], bb: [e, d], cc: [f], d: [bb, _x(c[0]), a], e: [a, bb], f: [cc]}
        else:
            heads = {a: [d, _y(c[0]), e], bb: [e, d], cc: [f], d: [bb, a], e: [a, bb], f: [cc]}
        _put(b, layer, heads, j)


def _layer_two(b: ProfileBuilder, cnf: CnfFormula, ins, layer: int) -> None:
    _, _, A2, D2 = ins
    for i in range(1, cnf.num_vars + 1):
        b.set(layer, Side.U, f"x{i}", [f"yb{i}", f"y{i}"])
        b.set(layer, Side.U, f"xb{i}", [f"y{i}", *D2[i], f"yb{i}"])
        b.set(layer, Side.W, f"y{i}", [f"x{i}", f"xb{i}"])
        b.set(layer, Side.W, f"yb{i}", [f"xb{i}", *A2[i], f"x{i}"])
    for j, c in enumerate(cnf.clauses, start=1):
        a, bb, cc, d, e, f = (f"{t}{j}" for t in "abcdef")
        if len(c) == 3 and c[2] > 0:
            heads = {
                a: [f, d, _yb(c[2]), e], bb: [d, e, f], cc: [e, f, d],
                d: [cc, a, bb], e: [a, bb, cc], f: [bb, cc, a],
            }
        elif len(c) == 3:
            heads = {
                a: [e, f, d], bb: [f, d, e], cc: [d, e, f],
                d: [a, bb, _xb(c[2]), cc], e: [bb, cc, a], f: [cc, a, bb],
            }
        elif c[0] > 0:
            heads = {a: [d, _yb(c[1]), e], bb: [e, d], cc: [f], d: [bb, a], e: [a, bb], f: [cc]}
        else:
            heads = {a: [d, e], bb: [e, d], cc: [f], d: [bb, _xb(c[1]), a], e: [a, bb], f: [cc]}
        _put(b, layer, heads, j)


def _padding_layer(b: ProfileBuilder, cnf: CnfFormula, layer: int) -> None:
    for i in range(1, cnf.num_vars + 1):
        b.set(layer, Side.U, f"x{i}", [f"y{i}", f"yb{i}"])
        b.set(layer, Side.U, f"xb{i}", [f"yb{i}", f"y{i}"])
        b.set(layer, Side.W, f"y{i}", [f"xb{i}", f"x{i}"])
        b.set(layer, Side.W, f"yb{i}", [f"x{i}", f"xb{i}"])
    for j in range(1, len(cnf.clauses) + 1):
        a, bb, cc, d, e, f = (f"{t}{j}" for t in "abcdef")
        heads = {a: [d, e, f], bb: [e, f, d], cc: [f, d, e], d: [bb, cc, a], e: [cc, a, bb], f: [a, bb, cc]}
        _put(b, layer, heads, j)


def _put(b: ProfileBuilder, layer: int, heads: Dict[str, List[str]], j: int) -> None:
    for role, head in heads.items():
        side = Side.U if role[0] in "abc" else Side.W
        b.set(layer, side, role, head)


def _roles(cnf: CnfFormula, dummies: int) -> Tuple[List[str], List[str]]:
    u = [r for i in range(1, cnf.num_vars + 1) for r in (f"x{i}", f"xb{i}")]
    w = [r for i in range(1, cnf.num_vars + 1) for r in (f"y{i}", f"yb{i}")]
    for j in range(1, len(cnf.clauses) + 1):
        u += [f"a{j}", f"b{j}", f"c{j}"]
        w += [f"d{j}", f"e{j}", f"f{j}"]
    u += [f"du{j}" for j in range(1, dummies + 1)]
    w += [f"dw{j}" for j in range(1, dummies + 1)]
    return u, w


def _build(cnf: CnfFormula, pattern: Sequence[str], alpha: int, dummies: int) -> Tuple[MultiLayerProfile, GadgetMap]:
    ins = _insertion_lists(cnf)
    u, w = _roles(cnf, dummies)
    b = ProfileBuilder(u, w, len(pattern))
    for layer, kind in enumerate(pattern, start=1):
        if kind == "one":
            _layer_one(b, cnf, ins, layer)
        elif kind == "two":
            _layer_two(b, cnf, ins, layer)
        else:
            _padding_layer(b, cnf, layer)
    if dummies:
        # layers 1..alpha share M_0 = {du_j dw_j}; layer alpha+i uses the
        # shift-by-i perfect matching, so the shifts are pairwise disjoint
        for layer in range(1, len(pattern) + 1):
            shift = max(0, layer - alpha)
            for j in range(1, dummies + 1):
                k = (j - 1 + shift) % dummies + 1
                b.set(layer, Side.U, f"du{j}", [f"dw{k}"])
                b.set(layer, Side.W, f"dw{k}", [f"du{j}"])
    meta = {"num_vars": cnf.num_vars, "clauses": cnf.clauses, "alpha": alpha, "pattern": tuple(pattern), "dummies": dummies}
    return b.build("sat", meta)


def sat_to_global(cnf: CnfFormula, alpha: int = 2, layers: int = 2) -> Tuple[MultiLayerProfile, GadgetMap]:
    """Profile admitting an alpha-globally-stable matching iff ``cnf`` is
    satisfiable.

    ``(2, 2)`` is the two-layer gadget.  For ``alpha == layers > 2`` the
    extra layers carry the stable padding lists; for ``alpha < layers``
    another ``layers - alpha + 1`` dummy agents per side are appended whose
    top choices agree in layers ``1..alpha`` and rotate in the remaining
    layers.
    """
    if not is_restricted(cnf):
        raise ValueError("formula is not in restricted form; run restrict_3sat first")
    if layers < 2 or not 2 <= alpha <= layers:
        raise ValueError(f"unsupported (alpha, layers) = ({alpha}, {layers}); need 2 <= alpha <= layers")
    pattern = ["one", "two"] + ["pad"] * (layers - 2)
    dummies = 0 if alpha == layers else layers - alpha + 1
    return _build(cnf, pattern, alpha, dummies)


def replicate_for_pair(profile: MultiLayerProfile, gadget_map: GadgetMap, layers: int) -> MultiLayerProfile:
    """``layers // 2`` copies of the two gadget layers, plus one padding
    layer when ``layers`` is odd."""
    if layers < 2:
        raise ValueError("layers must be >= 2")
    meta = gadget_map.meta
    if gadget_map.kind != "sat" or meta.get("pattern") != ("one", "two") or meta.get("dummies"):
        raise ValueError("source must be a two-layer sat_to_global output")
    cnf = CnfFormula(meta["num_vars"], meta["clauses"])
    base, _ = _build(cnf, ["one", "two"], 2, 0)
    if base != profile:
        raise ValueError("profile does not match its gadget map")
    pattern = ["one", "two"] * (layers // 2) + ["pad"] * (layers % 2)
    return _build(cnf, pattern, layers, 0)[0]


def true_matching(gadget_map: GadgetMap, assignment: Dict[int, bool], choice: Dict[int, int]) -> Matching:
    """Matching of a gadget built from the assignment and one N^t per
    clause (``choice[j] = t``), plus M_0 on dummies.  Tests use it to
    exercise the completeness direction."""
    pairs = []
    for i in range(1, gadget_map.meta["num_vars"] + 1):
        if assignment[i]:
            pairs += [(f"x{i}", f"y{i}"), (f"xb{i}", f"yb{i}")]
        else:
            pairs += [(f"x{i}", f"yb{i}"), (f"xb{i}", f"y{i}")]
    table = {1: "def", 2: "fde", 3: "efd"}
    for j in range(1, len(gadget_map.meta["clauses"]) + 1):
        for u, w in zip("abc", table[choice[j]]):
            pairs.append((f"{u}{j}", f"{w}{j}"))
    for j in range(1, gadget_map.meta["dummies"] + 1):
        pairs.append((f"du{j}", f"dw{j}"))
    return Matching.from_pairs((gadget_map.u(u), gadget_map.w(w)) for u, w in pairs)


def extract_assignment(profile: MultiLayerProfile, gadget_map: GadgetMap, matching: Matching) -> Dict[int, bool]:
    """``x_i`` is true iff ``{x_i, y_i}`` is matched, after checking that
    each variable block is exactly M_i^true or M_i^false."""
    if gadget_map.kind != "sat":
        raise ValueError("gadget map is not from sat_to_global")
    if matching.n != profile.n:
        raise ValueError(f"matching covers {matching.n} agents, profile has {profile.n}")
    out = {}
    for i in range(1, gadget_map.meta["num_vars"] + 1):
        t = gadget_map.matched(matching, f"x{i}", f"y{i}") and gadget_map.matched(matching, f"xb{i}", f"yb{i}")
        f = gadget_map.matched(matching, f"x{i}", f"yb{i}") and gadget_map.matched(matching, f"xb{i}", f"y{i}")
        if not (t or f):
            raise ValueError(f"matching holds neither M^true nor M^false for variable x{i}; it is not globally stable")
        out[i] = t
    return out
