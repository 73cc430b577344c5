import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ldgraph.errors import InfeasibleError
from ldgraph.graphs import (
    AlternatingFamily,
    CycleUnion,
    DisjointCopies,
    Doubled,
    EdgeDeleted,
    Graph,
    RandomRegular,
    complete_graph,
    cycle_graph,
    disjoint_copies,
    edge_expansion,
    edit_distance_iso,
    edit_distance_labeled,
    empty_graph,
    erdos_renyi_graph,
    is_equivalent_sequence,
    lattice_coordinates,
    lattice_graph,
    parse_graph,
    path_graph,
    random_bipartite_regular_graph,
    random_regular_graph,
    realize,
)

from oracles import small_graphs


def test_constructor_sizes():
    assert cycle_graph(5).num_edges == 5
    assert path_graph(4).num_edges == 3
    assert complete_graph(4).num_edges == 6
    assert empty_graph(3).num_edges == 0
    assert disjoint_copies(cycle_graph(4), 3).n == 12
    g = lattice_graph(2, 1)
    assert g.n == 9 and g.num_edges == 12 and g.degree_bound == 4


def test_lattice_coordinates_match_edges():
    g = lattice_graph(2, 2)
    xy = lattice_coordinates(2, 2)
    for u, v in g.edge_list:
        assert abs(xy[u] - xy[v]).sum() == 1


def test_rejects_bad_graphs():
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(0, 0)])
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(0, 1), (1, 0)])
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(0, 5)])
    with pytest.raises(ValueError):
        Graph.from_edges(3, [(0, 1), (0, 2)], degree_bound=1)


@pytest.mark.parametrize("n,d,seed", [(12, 3, 0), (15, 4, 1), (10, 4, 2)])
def test_random_regular(n, d, seed):
    g = random_regular_graph(n, d, seed)
    assert set(g.degrees) == {d}
    assert g == random_regular_graph(n, d, seed)


def test_random_regular_rejects_odd_stub_count():
    with pytest.raises(ValueError):
        random_regular_graph(5, 3, 0)


def test_bipartite_regular_is_bipartite():
    g = random_bipartite_regular_graph(16, 4, 0)
    assert set(g.degrees) == {4}
    assert all(u < 8 <= v for u, v in g.edge_list)


def test_erdos_renyi_deterministic():
    assert erdos_renyi_graph(20, 2.0, 5) == erdos_renyi_graph(20, 2.0, 5)


@given(small_graphs(max_n=9))
def test_json_and_edgelist_round_trip(g):
    assert Graph.from_json(g.to_json()) == g
    assert Graph.from_edgelist(g.to_edgelist()) == g


@given(small_graphs(max_n=9))
def test_components_partition_vertices(g):
    comps = g.components()
    assert sorted(v for c in comps for v in c) == list(range(g.n))
    for c in comps:
        side = set(c)
        for u, v in g.edge_list:
            assert (u in side) == (v in side)


def test_families():
    assert realize(CycleUnion(4), 3).n == 12
    assert realize(DisjointCopies(complete_graph(2)), 5).num_edges == 5
    assert realize(Doubled(CycleUnion(4)), 5).n == 16
    assert realize(AlternatingFamily(CycleUnion(4), CycleUnion(6)), 3).n == 18
    assert realize(EdgeDeleted(CycleUnion(4)), 2).num_edges == 7
    assert set(realize(RandomRegular(3, 0), 10).degrees) == {3}
    with pytest.raises(ValueError):
        realize(CycleUnion(4), 0)


def test_edit_distances():
    c, p = cycle_graph(6), path_graph(6)
    assert edit_distance_labeled(c, p) == 1
    assert edit_distance_iso(c, p.relabel([3, 1, 4, 0, 5, 2])) == 1
    with pytest.raises(InfeasibleError):
        edit_distance_iso(cycle_graph(9), cycle_graph(9))


@given(small_graphs(max_n=6, min_n=2), st.permutations(range(6)))
def test_iso_distance_invariant_under_relabel(g, perm):
    perm = [p for p in perm if p < g.n]
    assert edit_distance_iso(g, g.relabel(perm)) == 0


def test_equivalence_report():
    rep = is_equivalent_sequence(EdgeDeleted(CycleUnion(4)), CycleUnion(4), [2, 4, 8, 16], 0.05)
    assert rep.distances == [1, 1, 1, 1]
    assert rep.looks_equivalent


def _expansion_oracle(g):
    best = None
    for r in range(1, g.n // 2 + 1):
        for w in itertools.combinations(range(g.n), r):
            s = set(w)
            cut = sum((u in s) != (v in s) for u, v in g.edge_list)
            val = Fraction(cut, r)
            best = val if best is None or val < best else best
    return best


@pytest.mark.parametrize("g", [cycle_graph(8), complete_graph(5), random_regular_graph(10, 3, 4), path_graph(7)])
def test_edge_expansion_matches_subsets(g):
    assert edge_expansion(g) == _expansion_oracle(g)


def test_parse_graph(tmp_path):
    assert parse_graph("8*complete:2") == disjoint_copies(complete_graph(2), 8)
    assert parse_graph("lattice:1:3") == lattice_graph(1, 3)
    assert parse_graph("regular:12:3:7") == random_regular_graph(12, 3, 7)
    f = tmp_path / "g.txt"
    f.write_text(cycle_graph(5).to_edgelist())
    assert parse_graph(str(f)) == cycle_graph(5)
    for bad in ("nope:3", "cycle:x", "er:3"):
        with pytest.raises(ValueError):
            parse_graph(bad)
