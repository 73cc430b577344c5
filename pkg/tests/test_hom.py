import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ldgraph.errors import InfeasibleError
from ldgraph.graphs import complete_graph, cycle_graph, disjoint_copies, path_graph, random_regular_graph
from ldgraph.hom import (
    TargetGraph,
    deletion_witness,
    free_energy,
    hard_core_k2,
    hom_count,
    hom_density_from,
    hom_number,
    ising_target,
    lambda_limit,
    maxcut_exact,
    maxcut_from_beta,
    random_soft_core_target,
    soften,
)

from oracles import hom_by_product, maxcut_by_product, small_graphs


@st.composite
def rational_targets(draw, max_k=3, allow_zero=True):
    k = draw(st.integers(1, max_k))
    lo = 0 if allow_zero else 1
    alpha = tuple(Fraction(draw(st.integers(1, 6)), 3) for _ in range(k))
    A = [[None] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            A[i][j] = A[j][i] = Fraction(draw(st.integers(lo, 6)), 3)
    return TargetGraph(alpha, tuple(map(tuple, A)))


@settings(max_examples=40)
@given(small_graphs(max_n=6), rational_targets())
def test_components_exact_matches_product(g, h):
    lp = hom_count(g, h)
    oracle = hom_by_product(g, h.alpha, h.A)
    assert lp.value == oracle
    if oracle:
        assert math.isclose(lp.log_value, math.log(oracle), rel_tol=1e-12, abs_tol=1e-12)
    else:
        assert lp.log_value == -math.inf


@settings(max_examples=25)
@given(small_graphs(max_n=6), rational_targets(max_k=2))
def test_brute_matches_components(g, h):
    a, b = hom_count(g, h, "brute"), hom_count(g, h, "components")
    assert a.value == b.value
    assert a.log_value == b.log_value or math.isclose(a.log_value, b.log_value, rel_tol=1e-12)


@pytest.mark.parametrize("n", [3, 5, 8, 12])
def test_transfer_matches_brute_float_targets(n):
    for seed in range(3):
        h = random_soft_core_target(3, seed, rational=False)
        for g in (cycle_graph(n), path_graph(n)):
            t = hom_count(g, h, "transfer").log_value
            b = hom_count(g, h, "brute").log_value
            assert abs(t - b) <= 1e-12 * abs(b)


def test_c4_reference_value():
    h = TargetGraph((1, 1), ((1, 2), (2, 1)))
    for alg in ("brute", "transfer", "components"):
        assert hom_count(cycle_graph(4), h, alg).value == 82


def test_transfer_refuses_other_shapes():
    with pytest.raises(InfeasibleError):
        hom_count(complete_graph(4), ising_target(1.0), "transfer")


def test_hard_core_zero_on_odd_cycle():
    lp = hom_count(cycle_graph(5), hard_core_k2())
    assert lp.value == 0 and lp.log_value == -math.inf
    assert hom_count(cycle_graph(6), hard_core_k2()).value == 2


def test_large_graph_stays_finite_in_log_space():
    g = cycle_graph(2000)
    lp = hom_count(g, ising_target(30.0), "transfer")
    assert math.isfinite(lp.log_value) and lp.log_value > 2000 * 29


def test_disjoint_union_multiplies():
    g = random_regular_graph(8, 3, 1)
    h = random_soft_core_target(2, 5)
    assert hom_count(disjoint_copies(g, 2), h).value == hom_count(g, h).value ** 2
    assert math.isclose(free_energy(disjoint_copies(g, 3), h), free_energy(g, h), rel_tol=1e-12)


@settings(max_examples=30)
@given(small_graphs(max_n=6, min_n=1), rational_targets(max_k=2), st.floats(0.01, 0.5), st.floats(0.01, 0.5))
def test_softening_is_monotone(g, h, l1, l2):
    lo, hi = sorted((l1, l2))
    assert hom_count(g, soften(h, lo)).log_value <= hom_count(g, soften(h, hi)).log_value + 1e-12


def test_c5_lambda_closed_form():
    f = free_energy(cycle_graph(5), soften(hard_core_k2(), 0.01))
    assert abs(f + math.log(1.01**5 - 0.99**5) / 5) <= 1e-9


def test_lambda_table_monotone():
    t = lambda_limit(cycle_graph(5), hard_core_k2())
    assert t.monotone
    assert t.to_csv().splitlines()[0] == "index,n,lambda,free_energy"


def test_deletion_witness_odd_and_even_cycles():
    w = deletion_witness(cycle_graph(5), hard_core_k2(), 0.2)
    assert len(w.removed_edges) == 1 and w.feasible
    assert hom_count(cycle_graph(5).remove_edges(w.removed_edges), hard_core_k2()).value == 2
    w6 = deletion_witness(cycle_graph(6), hard_core_k2(), 0.2)
    assert w6.removed_edges == () and w6.feasible


def test_deletion_witness_rejects_bad_epsilon():
    with pytest.raises(ValueError):
        deletion_witness(cycle_graph(5), hard_core_k2(), 0.0)


@settings(max_examples=30)
@given(small_graphs(max_n=9))
def test_maxcut_exact_matches_product(g):
    assert maxcut_exact(g) == maxcut_by_product(g)


@pytest.mark.parametrize("g", [cycle_graph(5), complete_graph(5), random_regular_graph(10, 3, 2)])
def test_maxcut_bounds_bracket(g):
    rep = maxcut_from_beta(g, [5.0, 20.0])
    assert rep.bracketed
    for row in rep.rows:
        assert row["upper"] - row["lower"] <= g.n * math.log(2) / row["beta"] + 1e-9


def _hom_number_oracle(f, g):
    return sum(all(g.has_edge(m[u], m[v]) for u, v in f.edge_list)
               for m in itertools.product(range(g.n), repeat=f.n))


@settings(max_examples=25)
@given(small_graphs(max_n=4, min_n=1), small_graphs(max_n=5, min_n=1))
def test_hom_number_matches_product(f, g):
    assert hom_number(f, g) == _hom_number_oracle(f, g)


def test_c4_densities():
    assert hom_density_from(cycle_graph(4), disjoint_copies(cycle_graph(4), 3)) == 8
    assert hom_density_from(cycle_graph(4), disjoint_copies(cycle_graph(6), 2)) == 6


def test_target_validation_and_round_trip():
    with pytest.raises(ValueError):
        TargetGraph((1, 1), ((1, 2), (3, 1)))
    with pytest.raises(ValueError):
        TargetGraph((0, 1), ((1, 1), (1, 1)))
    with pytest.raises(ValueError):
        TargetGraph((1,), ((-1,),))
    h = random_soft_core_target(3, 9)
    assert TargetGraph.from_dict({k: v for k, v in h.to_dict().items()}) == h
    assert h.soft_core and h.rational
    assert random_soft_core_target(3, 9) == h
    assert not random_soft_core_target(2, 1, rational=False).rational
