"""Generators for the hardness constructions, their certificate
extractors, and the small oracles used to validate them."""
from .cnf import CnfFormula, cnf_sat, evaluate, format_dimacs, is_restricted, parse_dimacs, restrict_3sat
from .gadget import GadgetMap, ProfileBuilder
from .gi import assemble_gi_matching, gi_gadget, gi_gadget_map, gi_roles, gi_to_uniform
from .graphs import (
    Digraph,
    Graph,
    digraph_isomorphic,
    format_digraph,
    format_graph,
    graph_isomorphisms,
    is_independent,
    max_independent_set,
    parse_digraph,
    parse_digraphs,
    parse_graph,
)
from .indset import extract_independent_set, independent_set_matching, independent_set_to_global
from .sat import extract_assignment, replicate_for_pair, sat_to_global, true_matching
from .smti import (
    SmtiInstance,
    extract_smti_matching,
    format_smti,
    lift_smti_matching,
    parse_smti,
    smti_blocks,
    smti_perfect_stable,
    smti_to_individual,
    smti_to_pair_odd,
)
from .uniform import check_individual_via_digraphs, induce_digraphs, mcgarvey
