import itertools
import math
from collections import Counter

import pytest
from hypothesis import given, settings, strategies as st

from mlsm.check import is_individually_stable, is_pair_stable, stable_layer_set
from mlsm.core import Concept, Matching, Side, format_profile, is_single_layered, is_uniform, parse_profile
from mlsm.fixtures import fixture
from mlsm.reduce import (
    CnfFormula,
    Digraph,
    Graph,
    SmtiInstance,
    assemble_gi_matching,
    check_individual_via_digraphs,
    cnf_sat,
    digraph_isomorphic,
    evaluate,
    extract_assignment,
    extract_independent_set,
    extract_smti_matching,
    format_digraph,
    format_dimacs,
    format_graph,
    format_smti,
    gi_gadget,
    gi_to_uniform,
    graph_isomorphisms,
    independent_set_matching,
    independent_set_to_global,
    induce_digraphs,
    is_independent,
    is_restricted,
    lift_smti_matching,
    max_independent_set,
    mcgarvey,
    parse_digraphs,
    parse_dimacs,
    parse_graph,
    parse_smti,
    replicate_for_pair,
    restrict_3sat,
    sat_to_global,
    smti_perfect_stable,
    smti_to_individual,
    smti_to_pair_odd,
    true_matching,
)
from mlsm.core import ParseError
from mlsm.solve import digraph_isomorphism_backtrack, enumerate_stable

G, P, I = Concept.GLOBAL, Concept.PAIR, Concept.INDIVIDUAL
CAP = 64


def _well_formed(profile, gmap=None):
    assert parse_profile(format_profile(profile)) == profile
    if gmap is not None:
        assert gmap.is_total(profile)


# -- strategies ----------------------------------------------------------------------


@st.composite
def cnfs(draw, max_vars=4, max_clauses=5):
    n = draw(st.integers(1, max_vars))
    clauses = []
    for _ in range(draw(st.integers(0, max_clauses))):
        vs = draw(st.lists(st.integers(1, n), min_size=1, max_size=min(3, n), unique=True))
        clauses.append(tuple(v if draw(st.booleans()) else -v for v in vs))
    return CnfFormula.of(n, clauses)


@st.composite
def graphs(draw, n=st.integers(1, 7)):
    n_ = draw(n)
    pairs = list(itertools.combinations(range(1, n_ + 1), 2))
    return Graph.of(n_, [p for p in pairs if draw(st.booleans())])


@st.composite
def digraph_pairs(draw):
    n = draw(st.integers(2, 6))
    m = draw(st.integers(1, min(8, n * (n - 1) // 2)))

    def one():
        pairs = draw(st.permutations(list(itertools.combinations(range(1, n + 1), 2))))[:m]
        return Digraph.of(n, [(a, b) if draw(st.booleans()) else (b, a) for a, b in pairs])

    return one(), one()


def _truth_table_sat(cnf):
    for bits in itertools.product([False, True], repeat=cnf.num_vars):
        if evaluate(cnf, dict(enumerate(bits, start=1))):
            return True
    return False


# -- cnf -------------------------------------------------------------------------------


def test_restrict_examples():
    out = restrict_3sat(CnfFormula.of(3, [(1, 2, 3)]))
    assert out.num_vars == 6
    assert out.clauses[0] == (2, -4, 3)
    assert set(out.clauses[1:]) == {(1, 4), (-1, -4), (2, 5), (-2, -5), (3, 6), (-3, -6)}
    mixed = restrict_3sat(CnfFormula.of(3, [(1, -2, 3)]))
    assert mixed.clauses[0] == (1, -2, 3)
    assert restrict_3sat(CnfFormula.of(0, [])) == CnfFormula.of(0, [])


def test_restrict_reorders_by_position():
    assert restrict_3sat(CnfFormula.of(3, [(-1, 2, -3)])).clauses[0] == (2, -1, -3)
    assert restrict_3sat(CnfFormula.of(3, [(-1, -2, 3)])).clauses[0] == (3, -1, -2)


def test_restrict_short_clauses():
    out = restrict_3sat(CnfFormula.of(2, [(1,), (1, -2)]))
    assert out.clauses[:2] == ((1, 1), (1, -2, 1))
    assert is_restricted(out)


def test_cnf_invariants():
    with pytest.raises(ValueError, match="negation"):
        CnfFormula.of(2, [(1, -1)])
    with pytest.raises(ValueError):
        CnfFormula.of(1, [()])
    assert cnf_sat(CnfFormula.of(1, [(1,), (-1,)])) is None


def test_exhaustive_equisatisfiable_three_vars():
    clauses = [tuple(s * v for s, v in zip(signs, vs)) for k in (1, 2, 3) for vs in itertools.combinations((1, 2, 3), k)
               for signs in itertools.product((1, -1), repeat=k)]
    assert len(clauses) == 26
    for k in range(0, 3):
        for combo in itertools.combinations(clauses, k):
            f = CnfFormula.of(3, combo)
            r = restrict_3sat(f)
            assert is_restricted(r)
            assert (cnf_sat(r) is not None) == (cnf_sat(f) is not None)


@settings(max_examples=300, deadline=None)
@given(cnfs(max_vars=6, max_clauses=8))
def test_restrict_equisatisfiable_random(f):
    r = restrict_3sat(f)
    assert is_restricted(r)
    a = cnf_sat(r)
    assert (a is not None) == (cnf_sat(f) is not None) == _truth_table_sat(f)
    if a is not None:
        assert evaluate(r, a)
        assert evaluate(f, {i: a[i] for i in range(1, f.num_vars + 1)})


@given(cnfs())
def test_dimacs_round_trip(f):
    assert parse_dimacs(format_dimacs(f)) == f


def test_dimacs_errors_and_tautologies():
    assert parse_dimacs("c x\np cnf 2 2\n1 -1 0\n2 0\n").clauses == ((2,),)
    with pytest.raises(ParseError, match="line 2"):
        parse_dimacs("p cnf 2 1\n1 x 0\n")


# -- sat gadget ------------------------------------------------------------------------


def test_one_variable_gadget_size():
    p, g = sat_to_global(CnfFormula.of(1, [(1, 1)]))
    assert p.n * 2 == 4 * 1 + 6 * 1
    _well_formed(p, g)


def test_sat_gadget_rejects_bad_input():
    with pytest.raises(ValueError, match="restricted"):
        sat_to_global(CnfFormula.of(2, [(1, -2)]))
    with pytest.raises(ValueError):
        sat_to_global(CnfFormula.of(1, [(1, 1)]), 3, 2)


def test_sat_small_equivalence():
    sat = CnfFormula.of(2, [(1, 2), (-1, -1)])
    unsat = CnfFormula.of(1, [(1, 1), (-1, -1)])
    p, g = sat_to_global(sat)
    found = enumerate_stable(p, G, 2, cap=CAP)
    assert found
    for m in found:
        assert evaluate(sat, extract_assignment(p, g, m))
    q, _ = sat_to_global(unsat)
    assert enumerate_stable(q, G, 2, cap=CAP) == []


def test_true_matching_and_extraction():
    f = CnfFormula.of(2, [(1, -2, 1), (1, 2)])
    p, g = sat_to_global(f)
    # x1 true satisfies clause 1 at position 1 and clause 2 at position 1
    m = true_matching(g, {1: True, 2: False}, {1: 1, 2: 1})
    assert extract_assignment(p, g, m) == {1: True, 2: False}
    assert stable_layer_set(p, m) == {1, 2}
    bogus = Matching.from_vector(list(range(p.n, 0, -1)))
    with pytest.raises(ValueError, match="neither"):
        extract_assignment(p, g, bogus)


@pytest.mark.parametrize("alpha, layers", [(2, 3), (3, 3), (2, 4), (3, 4), (4, 4)])
def test_general_alpha_gadget(alpha, layers):
    for f, want in [(CnfFormula.of(1, [(1, 1)]), True), (CnfFormula.of(1, [(1, 1), (-1, -1)]), False)]:
        p, g = sat_to_global(f, alpha, layers)
        assert p.layers == layers
        _well_formed(p, g)
        found = enumerate_stable(p, G, alpha, cap=CAP, limit=1)
        assert bool(found) == want
        for m in found:
            assert evaluate(f, extract_assignment(p, g, m))


def test_replicate_layout():
    f = CnfFormula.of(1, [(1, 1)])
    p, g = sat_to_global(f)
    assert replicate_for_pair(p, g, 2) == p
    q = replicate_for_pair(p, g, 4)
    assert q.u_lists == p.u_lists * 2 and q.w_lists == p.w_lists * 2
    r = replicate_for_pair(p, g, 5)
    pad, _ = sat_to_global(f, 3, 3)
    assert r.u_lists[:4] == p.u_lists * 2 and r.u_lists[4] == pad.u_lists[2]
    assert r.w_lists[4] == pad.w_lists[2]


@pytest.mark.parametrize("layers", [3, 4])
def test_replicate_pair_equivalence(layers):
    for f, want in [(CnfFormula.of(1, [(1, 1)]), True), (CnfFormula.of(1, [(1, 1), (-1, -1)]), False)]:
        p, g = sat_to_global(f)
        q = replicate_for_pair(p, g, layers)
        _well_formed(q)
        for a in range(math.ceil(layers / 2) + 1, layers + 1):
            assert bool(enumerate_stable(q, P, a, cap=CAP, limit=1)) == want


# -- smti ------------------------------------------------------------------------------


def _smti(n, us, ws):
    return SmtiInstance.create(n, us, ws)


ONE = _smti(1, [[1]], [[1]])
EMPTY = _smti(1, [[]], [[]])


def test_smti_individual_n1():
    p, g = smti_to_individual(ONE, 4, 2)
    assert p.n == 5
    _well_formed(p, g)
    assert is_single_layered(p, Side.W)
    found = enumerate_stable(p, I, 2, cap=CAP)
    assert found
    assert extract_smti_matching(g, found[0]) == Matching.from_vector([1])
    q, _ = smti_to_individual(EMPTY, 4, 2)
    assert enumerate_stable(q, I, 2, cap=CAP) == []


def test_smti_pair_n1():
    p, g = smti_to_pair_odd(ONE, 5)
    assert p.n == 6
    _well_formed(p, g)
    assert enumerate_stable(p, P, 3, cap=CAP)
    q, _ = smti_to_pair_odd(EMPTY, 5)
    assert enumerate_stable(q, P, 3, cap=CAP) == []


def test_smti_pair_first_layer_reversed():
    inst = _smti(2, [[1, 2], [2, 1]], [[2, 1], [1, 2]])
    p, g = smti_to_pair_odd(inst, 5)
    for w in (1, 2):
        k = len(inst.w_prefs[w - 1])
        j = g.w(f"w{w}") - 1
        assert p.w_lists[0][j][:k] == p.w_lists[1][j][:k][::-1]
        assert p.w_lists[0][j][k:] == p.w_lists[1][j][k:]


def test_smti_parameter_guards():
    with pytest.raises(ValueError):
        smti_to_individual(ONE, 3, 2)
    with pytest.raises(ValueError):
        smti_to_individual(ONE, 4, 3)
    with pytest.raises(ValueError):
        smti_to_pair_odd(ONE, 6)


def test_smti_strict_complete_is_classic():
    for us in itertools.product(itertools.permutations((1, 2)), repeat=2):
        for ws in itertools.product(itertools.permutations((1, 2)), repeat=2):
            inst = _smti(2, [list(x) for x in us], [list(x) for x in ws])
            from mlsm.core import MultiLayerProfile

            prof = MultiLayerProfile.from_lists([[list(x) for x in us]], [[list(x) for x in ws]])
            assert smti_perfect_stable(inst) == enumerate_stable(prof, G, 1)


def test_smti_lift_passes_checker():
    inst = _smti(2, [[(1, 2)], [1]], [[1, 2], [1]])
    sols = smti_perfect_stable(inst)
    assert sols == [Matching.from_vector([2, 1])]
    p, g = smti_to_individual(inst, 4, 2)
    assert is_individually_stable(p, lift_smti_matching(inst, g, sols[0]), 2)
    q, h = smti_to_pair_odd(inst, 5)
    assert is_pair_stable(q, lift_smti_matching(inst, h, sols[0]), 3)


def test_smti_format_round_trip():
    text = "smti 2\nU 1 : (w1 w2)\nU 2 : w1\nW 1 : u1 u2\nW 2 : u1\n"
    inst = parse_smti(text)
    assert format_smti(inst) == text
    assert parse_smti(format_smti(inst)) == inst
    with pytest.raises(ParseError, match="line 2"):
        parse_smti("smti 2\nU 1 : (w1\n")


# -- independent set ---------------------------------------------------------------------


def test_indset_examples():
    p3 = Graph.of(3, [(1, 2), (2, 3)])
    prof, gm, a = independent_set_to_global(p3, 2)
    _well_formed(prof, gm)
    assert is_single_layered(prof, Side.U)
    found = enumerate_stable(prof, G, a, cap=CAP)
    assert found
    m = independent_set_matching(gm, {1, 3})
    assert stable_layer_set(prof, m) >= {1, 3}
    assert extract_independent_set(prof, gm, m) == {1, 3}
    k3 = Graph.of(3, [(1, 2), (2, 3), (1, 3)])
    prof, _, a = independent_set_to_global(k3, 2)
    assert enumerate_stable(prof, G, a, cap=CAP) == []
    prof, _, a = independent_set_to_global(k3, 1)
    assert enumerate_stable(prof, G, a, cap=CAP, limit=1)


@settings(max_examples=200, deadline=None)
@given(graphs())
def test_max_independent_set_vs_subsets(g):
    best = max(len(s) for k in range(g.n + 1) for s in itertools.combinations(range(1, g.n + 1), k) if is_independent(g, s))
    assert max_independent_set(g) == best
    assert parse_graph(format_graph(g)) == g


def test_triangle_mis():
    assert max_independent_set(Graph.of(3, [(1, 2), (2, 3), (1, 3)])) == 1


@settings(max_examples=50, deadline=None)
@given(graphs(n=st.integers(1, 4)), st.data())
def test_indset_matching_stable_on_chosen_layers(g, data):
    k = data.draw(st.integers(1, g.n))
    prof, gm, _ = independent_set_to_global(g, k)
    _well_formed(prof, gm)
    verts = data.draw(st.sets(st.integers(1, g.n)).filter(lambda s: is_independent(g, s)))
    m = independent_set_matching(gm, verts)
    assert stable_layer_set(prof, m) == frozenset(verts)


# -- uniform / mcgarvey ------------------------------------------------------------------


def test_induce_fix_d():
    d, dm = fixture("FIX-D")
    g, h = induce_digraphs(d, 3)
    assert {(1, 2), (2, 1)} <= g.arcs
    assert not check_individual_via_digraphs(g, h, dm["M1"])


def test_identical_layers_induce_tournament():
    from mlsm.core import MultiLayerProfile

    order = [3, 1, 2]
    prof = MultiLayerProfile.from_lists([[order] * 3] * 3, [[order] * 3] * 3)
    g, h = induce_digraphs(prof, 3)
    assert g.is_tournament and g.arcs == {(3, 1), (3, 2), (1, 2)}
    assert check_individual_via_digraphs(g, g, Matching.from_vector([1, 2, 3]))
    with pytest.raises(Exception, match="not uniform"):
        induce_digraphs(fixture("FIX-A")[0], 2)


def test_mcgarvey_single_arc():
    prof, a = mcgarvey(Digraph.of(2, [(1, 2)]), Digraph.of(2, [(1, 2)]))
    assert (prof.layers, a) == (2, 1)
    assert induce_digraphs(prof, a) == (Digraph.of(2, [(1, 2)]), Digraph.of(2, [(1, 2)]))


def test_mcgarvey_rejects():
    with pytest.raises(ValueError, match="2-cycle"):
        mcgarvey(Digraph.of(2, [(1, 2), (2, 1)]), Digraph.of(2, [(1, 2), (2, 1)]))
    with pytest.raises(ValueError, match="arc counts"):
        mcgarvey(Digraph.of(3, [(1, 2)]), Digraph.of(3, [(1, 2), (2, 3)]))


@settings(max_examples=200, deadline=None)
@given(digraph_pairs())
def test_mcgarvey_counts_and_round_trip(gh):
    g, h = gh
    prof, m = mcgarvey(g, h)
    assert prof.layers == 2 * m and is_uniform(prof)
    _well_formed(prof)
    agree = Counter()
    for i in range(prof.layers):
        lst = prof.w_lists[i][0]
        for p_, a in enumerate(lst):
            for b in lst[p_ + 1:]:
                agree[a + 1, b + 1] += 1
    for a, b in itertools.permutations(range(1, g.n + 1), 2):
        want = m + 1 if (a, b) in g.arcs else m - 1 if (b, a) in g.arcs else m
        assert agree[a, b] == want
    assert induce_digraphs(prof, m) == (g, h)


def test_digraph_format_round_trip():
    g, h = Digraph.of(3, [(1, 2), (3, 2)]), Digraph.of(3, [(2, 1)])
    assert parse_digraphs(format_digraph(g) + format_digraph(h)) == [g, h]


# -- graph isomorphism gadget ------------------------------------------------------------

P4 = Graph.of(4, [(1, 2), (2, 3), (3, 4)])
STAR = Graph.of(4, [(1, 2), (1, 3), (1, 4)])
TRI = Graph.of(4, [(1, 2), (2, 3), (1, 3)])


@pytest.mark.parametrize("g", [P4, STAR, TRI], ids=["P4", "star", "triangle"])
def test_gi_gadget_shape(g):
    d = gi_gadget(g)
    assert d.n == 4 + 3 + 2 * 6
    assert d.two_cycle_free
    prime = 5
    assert d.in_degree(prime) == 1 and (6, prime) in d.arcs
    assert all(d.in_degree(v) >= 2 for v in range(1, d.n + 1) if v != prime)


def test_gi_gadget_guards():
    with pytest.raises(ValueError):
        gi_gadget(Graph.of(3, [(1, 2), (2, 3), (1, 3)]))
    with pytest.raises(ValueError):
        gi_gadget(Graph.of(4, [(1, 2)]))


def test_gi_identity_and_relabel():
    for perm in ({1: 1, 2: 2, 3: 3, 4: 4}, {1: 3, 2: 1, 3: 4, 4: 2}):
        h = P4.relabel(perm)
        prof, a = gi_to_uniform(P4, h)
        assert prof.layers == 2 * a and is_uniform(prof)
        gi, hi = induce_digraphs(prof, a)
        assert perm in list(graph_isomorphisms(P4, h))
        m = assemble_gi_matching(P4, h, perm)
        assert check_individual_via_digraphs(gi, hi, m)
        assert is_individually_stable(prof, m, a)


def test_gi_negative():
    for x, y in [(P4, STAR), (P4, TRI), (STAR, TRI)]:
        dx, dy = gi_gadget(x), gi_gadget(y)
        assert digraph_isomorphic(dx, dy) is None
        assert digraph_isomorphism_backtrack(19, [(a - 1, b - 1) for a, b in dx.arcs], [(a - 1, b - 1) for a, b in dy.arcs]) is None
    assert digraph_isomorphic(gi_gadget(P4), gi_gadget(P4.relabel({1: 4, 2: 3, 3: 2, 4: 1}))) is not None


def test_assemble_rejects_non_isomorphism():
    with pytest.raises(ValueError):
        assemble_gi_matching(P4, STAR, {1: 1, 2: 2, 3: 3, 4: 4})
