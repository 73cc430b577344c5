from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ldgraph.graphs import Graph, complete_graph, cycle_graph, disjoint_copies, lattice_graph, path_graph
from ldgraph.neighborhoods import (
    FrequencyVector,
    RootedColoredGraph,
    ball,
    ball_size_bound,
    bs_frequencies,
    canonical_key,
    colored_frequencies,
    colored_frequency_set,
    decode_key,
    forget_colors,
    frequency_distance,
    frequency_set_distance,
    graph_canonical_key,
    isomorphic_bruteforce,
)

from oracles import small_graphs


@settings(max_examples=60)
@given(small_graphs(max_n=6), st.permutations(range(6)))
def test_unrooted_key_invariant_under_relabel(g, perm):
    perm = [p for p in perm if p < g.n]
    assert graph_canonical_key(g) == graph_canonical_key(g.relabel(perm))


@settings(max_examples=80)
@given(small_graphs(max_n=6, min_n=1), small_graphs(max_n=6, min_n=1))
def test_unrooted_key_agrees_with_brute_isomorphism(g, h):
    assert (graph_canonical_key(g) == graph_canonical_key(h)) == isomorphic_bruteforce(g, h)


@settings(max_examples=60)
@given(small_graphs(max_n=6, min_n=2), st.integers(0, 5), st.integers(0, 5), st.integers(1, 2),
       st.lists(st.integers(1, 2), min_size=6, max_size=6))
def test_rooted_colored_key_agrees_with_brute(g, u, v, r, colors):
    u, v = u % g.n, v % g.n
    cols = colors[:g.n]
    a, b = ball(g, u, r, cols), ball(g, v, r, cols)
    same = isomorphic_bruteforce(a.graph, b.graph, 0, 0, a.colors, b.colors)
    assert (a.canonical_key == b.canonical_key) == same


@given(small_graphs(max_n=7, min_n=1), st.integers(0, 6), st.integers(0, 2))
def test_key_decodes_to_isomorphic_ball(g, u, r):
    b = ball(g, u % g.n, r)
    back = decode_key(b.canonical_key).to_graph()
    assert back.canonical_key == b.canonical_key
    assert isomorphic_bruteforce(back.graph, b.graph, 0, 0)


def test_cycle_vs_path_and_cycle_lengths():
    assert bs_frequencies(cycle_graph(4), 1).keys() == bs_frequencies(cycle_graph(6), 1).keys()
    assert bs_frequencies(cycle_graph(4), 2).keys() != bs_frequencies(cycle_graph(6), 2).keys()
    assert frequency_distance(bs_frequencies(cycle_graph(8), 1), bs_frequencies(path_graph(8), 1)) == Fraction(1, 4)


def test_ball_sizes_bounded():
    g = lattice_graph(2, 3)
    for r in range(3):
        assert max(ball(g, u, r).graph.n for u in range(g.n)) <= ball_size_bound(4, r)
    assert ball_size_bound(3, 2) == 10 and ball_size_bound(2, 3) == 7


@given(small_graphs(max_n=7, min_n=1), st.integers(0, 2))
def test_frequencies_sum_to_one(g, r):
    fv = bs_frequencies(g, r)
    assert sum(v for _, v in fv.entries) == 1
    assert FrequencyVector.from_dict(fv.to_dict()) == fv


def test_forgetting_colors_recovers_plain_frequencies():
    g = cycle_graph(7)
    sigma = [1, 2, 2, 1, 2, 1, 1]
    assert forget_colors(colored_frequencies(g, sigma, 1)) == bs_frequencies(g, 1)


def test_colored_frequency_set():
    g = disjoint_copies(complete_graph(2), 3)
    s = colored_frequency_set(g, 2, 1)
    # per K2 the types are {11, 22, 12}; the vector depends on how many K2s fall in each class
    assert len(s) == 10
    sampled = colored_frequency_set(g, 2, 1, "sampled", samples=50, seed=1)
    assert sampled <= s
    assert frequency_set_distance(s, s) == 0


def test_rooted_graph_validation():
    with pytest.raises(ValueError):
        RootedColoredGraph(path_graph(4), 0, 1)
    with pytest.raises(ValueError):
        ball(path_graph(3), 5, 1)
    h = RootedColoredGraph(Graph.from_edges(2, [(0, 1)]), 1, 1, (1, 2))
    assert canonical_key(h) == h.canonical_key


def test_json_table_is_decodable():
    fv = bs_frequencies(path_graph(5), 1)
    table = fv.decoding_table()
    assert len(table) == len(fv.entries)
    assert '"table"' in fv.to_json()
