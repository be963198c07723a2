import pytest
from hypothesis import given, settings, strategies as st

from mlsm.check import blocking_layers, is_pair_stable
from mlsm.core import Concept, Matching, MultiLayerProfile, random_profile
from mlsm.fixtures import fixture
from mlsm.smg import (
    SmgInstance,
    reduce_single_layered_to_smg,
    smg_blocks,
    smg_enumerate,
    smg_is_stable,
    smg_solve,
    solve_pair_individual_single_layered,
)
from mlsm.solve import PreconditionError, enumerate_stable, gale_shapley

from conftest import generated


def _unanimity(n=3, layers=3, seed=4):
    base = random_profile(n, 1, "general", seed)
    return MultiLayerProfile(n, layers, base.u_lists * layers, base.w_lists * layers)


def test_reduce_fix_sl():
    sl, _ = fixture("FIX-SL")
    inst = reduce_single_layered_to_smg(sl, 2)
    assert inst.relations == (frozenset(), frozenset())
    with pytest.raises(PreconditionError):
        reduce_single_layered_to_smg(sl, 1)
    with pytest.raises(PreconditionError):
        reduce_single_layered_to_smg(fixture("FIX-A")[0], 2)


def test_unanimity_relations_are_full_orders():
    p = _unanimity()
    inst = reduce_single_layered_to_smg(p, 3)
    for w in range(3):
        lst = [x + 1 for x in p.w_lists[0][w]]
        want = {(lst[a], lst[b]) for a in range(3) for b in range(a + 1, 3)}
        assert inst.relations[w] == want
    gs = gale_shapley(p, 1)
    assert smg_solve(inst) == gs
    assert smg_enumerate(inst) == [gs]
    # no pair blocks the unanimous stable matching
    assert smg_is_stable(inst, gs)


def test_fix_sl_blocks_and_none():
    sl, _ = fixture("FIX-SL")
    inst = reduce_single_layered_to_smg(sl, 2)
    m = Matching.from_pairs([(1, 1), (2, 2)])
    assert smg_blocks(inst, m, (2, 1))
    assert smg_solve(inst) is None
    assert smg_enumerate(inst) == []
    assert solve_pair_individual_single_layered(sl, 2) is None
    assert enumerate_stable(sl, Concept.PAIR, 2) == []


def test_top_choice_never_blocks():
    inst = SmgInstance(3, ((2, 1, 3), (1, 2, 3), (3, 1, 2)), (frozenset(),) * 3)
    m = Matching.from_vector([2, 1, 3])
    assert smg_is_stable(inst, m)
    assert m in smg_enumerate(inst)


def test_single_agent():
    inst = SmgInstance(1, ((1,),), (frozenset(),))
    assert smg_solve(inst) == Matching.from_vector([1])


def test_relations_must_be_asymmetric():
    with pytest.raises(ValueError, match="asymmetric"):
        SmgInstance(2, ((1, 2), (1, 2)), (frozenset({(1, 2), (2, 1)}), frozenset()))


def _valid_alpha(data, ell):
    return data.draw(st.integers(ell // 2 + 1, ell))


@settings(max_examples=400, deadline=None)
@given(generated(mode="single_layered_U"), st.data())
def test_blocking_equivalence_and_oracle(p, data):
    a = _valid_alpha(data, p.layers)
    inst = reduce_single_layered_to_smg(p, a)
    perm = data.draw(st.permutations(list(range(1, p.n + 1))))
    m = Matching(tuple(perm))
    for u in range(1, p.n + 1):
        for w in range(1, p.n + 1):
            if m.w_of(u) != w:
                assert smg_blocks(inst, m, (u, w)) == (len(blocking_layers(p, m, (u, w))) >= p.layers - a + 1)
    work = {}
    got = smg_solve(inst, work=work)
    assert work["proposals"] <= p.n * p.n
    truth = smg_enumerate(inst)
    assert (got is not None) == bool(truth)
    if got is not None:
        assert got in truth


@settings(max_examples=300, deadline=None)
@given(generated(mode="single_layered_W"), st.data())
def test_pipeline_w_side(p, data):
    a = _valid_alpha(data, p.layers)
    got = solve_pair_individual_single_layered(p, a)
    truth = enumerate_stable(p, Concept.PAIR, a)
    assert (got is not None) == bool(truth)
    if got is not None:
        assert is_pair_stable(p, got, a)


@settings(max_examples=300, deadline=None)
@given(generated(mode="single_layered_U"), st.data())
def test_deferred_acceptance_is_never_wrong_when_it_answers(p, data):
    a = _valid_alpha(data, p.layers)
    inst = reduce_single_layered_to_smg(p, a)
    work = {}
    got = smg_solve(inst, method="deferred_acceptance", work=work)
    assert work["proposals"] <= p.n * p.n
    if got is not None:
        assert smg_is_stable(inst, got)


def test_deferred_acceptance_can_miss():
    # intransitive R_w: the literal proposal process ends unstable
    misses = 0
    for seed in range(1500):
        p = random_profile(4, 3, "single_layered_U", seed)
        inst = reduce_single_layered_to_smg(p, 2)
        if smg_solve(inst, method="deferred_acceptance") is None and smg_enumerate(inst):
            misses += 1
            assert smg_solve(inst) is not None
    assert misses > 0
