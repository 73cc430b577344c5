import math
from fractions import Fraction

import pytest
from scipy.special import logsumexp

from ldgraph.graphs import complete_graph, cycle_graph, disjoint_copies, path_graph
from ldgraph.hom import TargetGraph, hard_core_k2, hom_count, random_soft_core_target
from ldgraph.quotients import Quotient, quotient_histogram
from ldgraph.variational import (
    argmin_cell,
    energy,
    energy_flat,
    gibbs_bucket_decomposition,
    lipschitz_constant,
    scaled_target,
    variational_free_energy,
)

HALF = Fraction(1, 2)


def test_energy_example():
    # K2 split across colors with A_12 = e: energy is -(1/2)(X_12 + X_21) = -1
    h = TargetGraph((1, 1), ((1, math.e), (math.e, 1)))
    q = Quotient((HALF, HALF), ((0, 1), (1, 0)))
    assert math.isclose(energy(q, h), -1.0)


def test_energy_infinite_on_forbidden_mass():
    q = Quotient((HALF, HALF), ((1, 0), (0, 1)))
    assert energy(q, hard_core_k2()) == math.inf
    assert lipschitz_constant(hard_core_k2()) == math.inf
    with pytest.raises(ValueError):
        energy_flat((1,), hard_core_k2())


@pytest.mark.parametrize("g", [path_graph(5), cycle_graph(6), disjoint_copies(complete_graph(2), 4)])
def test_partition_function_is_energy_weighted_count(g):
    h = random_soft_core_target(2, 3)
    hist = quotient_histogram(g, 2)
    terms = [math.log(c) - g.n * energy_flat([Fraction(v, g.n) for v in key], h) for key, c in hist.counts.items()]
    assert math.isclose(float(logsumexp(terms)), hom_count(g, h).log_value, rel_tol=1e-12)


@pytest.mark.parametrize("delta", [Fraction(1, 8), Fraction(1, 16)])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_gibbs_sandwich(delta, seed):
    h = random_soft_core_target(2, seed)
    for g in (disjoint_copies(complete_graph(2), 8), cycle_graph(6)):
        rep = gibbs_bucket_decomposition(g, h, delta)
        assert rep.contained
        assert rep.upper - rep.lower <= rep.width_bound + 1e-12
        assert math.isclose(rep.identity_log_z, rep.exact, rel_tol=1e-12)


def test_gibbs_refuses_hard_core():
    with pytest.raises(ValueError):
        gibbs_bucket_decomposition(cycle_graph(6), hard_core_k2(), HALF)


@pytest.mark.parametrize("delta", [Fraction(1, 8), Fraction(1, 16)])
def test_variational_gap_within_slack(delta):
    g = disjoint_copies(complete_graph(2), 8)
    pt = variational_free_energy(g, random_soft_core_target(2, 4), delta)
    assert pt.within_slack
    assert pt.representative.k == 2


def test_hard_core_variational_on_even_cycle():
    pt = variational_free_energy(cycle_graph(6), hard_core_k2(), Fraction(1, 8))
    assert pt.gap == 0
    assert pt.energy == 0


def test_scaling_alpha_shifts_minimizer_towards_heavier_color():
    g = disjoint_copies(complete_graph(2), 6)
    h = TargetGraph((1, 1), ((1, 1), (1, 1)))
    heavy = scaled_target(TargetGraph((4, 1), ((1, 1), (1, 1))), 1.0)
    c0 = argmin_cell(g, h, Fraction(1, 4))
    c1 = argmin_cell(g, heavy, Fraction(1, 4))
    assert c1[0] >= c0[0]
