import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ldgraph.errors import BudgetExceededError
from ldgraph.graphs import complete_graph, cycle_graph, disjoint_copies, path_graph
from ldgraph.quotients import (
    Coloring,
    Quotient,
    QuotientSet,
    achievable_coloring_c4c6,
    as_fraction,
    coarsen,
    convolve_histograms,
    cycle_components,
    directed_distances,
    distance_to_set,
    on_cycle_manifold,
    partition_set,
    quotient,
    quotient_histogram,
    set_distance,
)
from ldgraph.scenarios import random_manifold_target

from oracles import graph_and_coloring, partition_set_by_product, quotient_by_loops, small_graphs


@given(graph_and_coloring())
def test_quotient_matches_definition(case):
    g, k, colors = case
    q = quotient(g, Coloring.from_zero_based(colors, k))
    x, X = quotient_by_loops(g, colors, k)
    assert q.x == x and q.X == X


@given(graph_and_coloring())
def test_quotient_identities(case):
    g, k, colors = case
    q = quotient(g, [c + 1 for c in colors], k)
    assert sum(q.x) == 1
    assert q.edge_total() == Fraction(2 * g.num_edges, g.n)
    for i in range(k):
        deg = sum(g.degrees[u] for u in range(g.n) if colors[u] == i)
        assert sum(q.X[i]) == Fraction(deg, g.n)


@given(graph_and_coloring(max_k=3), st.permutations(range(3)))
def test_relabeling_colors_permutes_quotient(case, perm):
    g, k, colors = case
    perm = [p for p in perm if p < k]
    q = quotient(g, Coloring.from_zero_based(colors, k))
    moved = quotient(g, Coloring.from_zero_based([perm[c] for c in colors], k))
    assert q.permute(perm) == moved


@given(small_graphs(max_n=6), st.integers(1, 3))
def test_partition_set_matches_product(g, k):
    exact = {q.flat() for q in partition_set(g, k)}
    oracle = {tuple(x) + tuple(v for r in X for v in r) for x, X in partition_set_by_product(g, k)}
    assert exact == oracle


@given(small_graphs(max_n=7), st.integers(1, 3))
def test_histogram_counts_all_colorings(g, k):
    assert quotient_histogram(g, k).total == k**g.n


def test_histogram_convolution_matches_direct():
    a = cycle_graph(4)
    joined = a.disjoint_union(path_graph(3))
    direct = quotient_histogram(joined, 2, budget=10**8).counts
    ha = quotient_histogram(a, 2).counts
    hb = quotient_histogram(path_graph(3), 2).counts
    assert convolve_histograms(ha, hb) == direct


def test_sampled_is_subset_of_exact():
    g = cycle_graph(8)
    exact = partition_set(g, 2)
    sampled = partition_set(g, 2, "sampled", samples=500, seed=3)
    assert sampled.points <= exact.points
    assert partition_set(g, 2, "sampled", samples=500, seed=3) == sampled


def test_budget_refusal():
    with pytest.raises(BudgetExceededError):
        partition_set(path_graph(20), 3, budget=1000)


def test_quotient_validation():
    with pytest.raises(ValueError):
        Quotient((Fraction(1, 2), Fraction(1, 3)), ((0, 0), (0, 0)))
    with pytest.raises(ValueError):
        Quotient((1, 0), ((0, 1), (0, 0)))
    with pytest.raises(ValueError):
        Quotient((1,), ((-1,),))
    assert as_fraction("3/4") == Fraction(3, 4)
    assert as_fraction(0.5) == Fraction(1, 2)


@given(graph_and_coloring(max_k=4))
def test_serialization_round_trip(case):
    g, k, colors = case
    q = quotient(g, Coloring.from_zero_based(colors, k))
    assert Quotient.from_dict(q.to_dict()) == q


def test_quotient_set_round_trip():
    s = partition_set(cycle_graph(5), 2)
    assert QuotientSet.from_dict(s.to_dict()) == s


@given(graph_and_coloring(max_k=4).filter(lambda c: c[1] % 2 == 0))
def test_coarsen_matches_merged_coloring(case):
    g, k, colors = case
    fine = quotient(g, Coloring.from_zero_based(colors, k))
    merged = quotient(g, Coloring.from_zero_based([c // 2 for c in colors], k // 2))
    assert coarsen(fine) == merged


def _brute_hausdorff(a, b):
    d = lambda p, q: max(abs(x - y) for x, y in zip(p.flat(), q.flat()))  # noqa: E731
    one = max(min(d(p, q) for q in b) for p in a)
    two = max(min(d(p, q) for p in a) for q in b)
    return max(one, two)


@pytest.mark.parametrize("ga,gb,k", [(cycle_graph(5), path_graph(5), 2), (cycle_graph(4), cycle_graph(6), 2),
                                     (complete_graph(3), path_graph(4), 3)])
def test_set_distance_matches_brute(ga, gb, k):
    a, b = partition_set(ga, k), partition_set(gb, k)
    assert set_distance(a, b) == _brute_hausdorff(list(a), list(b))
    assert set_distance(a, a) == 0


def test_directed_distance_exact():
    a = [(Fraction(1, 3), Fraction(2, 3))]
    b = [(Fraction(1, 2), Fraction(1, 2)), (Fraction(0), Fraction(1))]
    assert directed_distances(a, b) == [Fraction(1, 6)]
    q = Quotient((Fraction(1, 2), Fraction(1, 2)), ((0, 1), (1, 0)))
    assert distance_to_set(q, [q]) == 0


@pytest.mark.parametrize("g", [disjoint_copies(cycle_graph(4), 3), disjoint_copies(cycle_graph(6), 2)])
def test_cycle_unions_stay_on_manifold(g):
    assert all(on_cycle_manifold(q) for q in partition_set(g, 2))


def test_cycle_components_order():
    comps = cycle_components(disjoint_copies(cycle_graph(6), 2))
    assert [len(c) for c in comps] == [6, 6]
    with pytest.raises(ValueError):
        cycle_components(path_graph(4))


def test_construction_reaches_random_targets():
    g = disjoint_copies(cycle_graph(6), 5)
    rng = np.random.Generator(np.random.PCG64(11))
    for _ in range(30):
        t = random_manifold_target(rng, 120)
        q = quotient(g, achievable_coloring_c4c6(t, g))
        assert q.distance(t) <= Fraction(2, 5)
    off = Quotient((Fraction(1, 2), Fraction(1, 2)), ((0, 0), (0, 0)))
    with pytest.raises(ValueError):
        achievable_coloring_c4c6(off, g)


def test_exhaustive_sanity_small():
    # the 3-colorings of a triangle hit exactly the expected number of quotients
    pts = partition_set(complete_graph(3), 3)
    shapes = {tuple(sorted(q.x)) for q in pts}
    assert shapes == {(0, 0, 1), (0, Fraction(1, 3), Fraction(2, 3)), (Fraction(1, 3),) * 3}
    assert len(list(itertools.islice(pts, 100))) == len(pts)
