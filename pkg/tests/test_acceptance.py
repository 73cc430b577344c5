"""Acceptance run: one PASS/FAIL line per criterion, each with its wall-clock budget.

Lines are printed as they finish and repeated in the terminal summary.
"""

import contextlib
import math
import time
from fractions import Fraction

import numpy as np

from ldgraph.graphs import (
    Graph,
    complete_graph,
    cycle_graph,
    disjoint_copies,
    empty_graph,
    erdos_renyi_graph,
    path_graph,
)
from ldgraph.hom import (
    TargetGraph,
    deletion_witness,
    free_energy,
    hard_core_k2,
    hom_count,
    maxcut_exact,
    maxcut_from_beta,
    random_soft_core_target,
    soften,
)
from ldgraph.measures import (
    StepMeasurePair,
    build_measures,
    d_var,
    project_tk,
    prokhorov_to_projection,
    random_real_coloring,
)
from ldgraph.quotients import (
    Coloring,
    Quotient,
    achievable_coloring_c4c6,
    on_cycle_manifold,
    partition_set,
    quotient,
)
from ldgraph.rates import (
    RateQuery,
    bucket_histogram,
    cell_refinement_check,
    finite_rate_check,
    isolated_rate_closed_form,
    part_size_vectors,
    rate_exact,
)
from ldgraph.scenarios import random_manifold_target, run_scenario
from ldgraph.variational import gibbs_bucket_decomposition

from oracles import dvar_by_subsets, quotient_by_loops

LINES: list[str] = []


def _rng(seed):
    return np.random.Generator(np.random.PCG64(seed))


@contextlib.contextmanager
def criterion(num: int, title: str, limit: float):
    start = time.perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        status = "PASS" if ok and elapsed < limit else "FAIL"
        line = f"[{status}] criterion {num:2d}  {title}  ({elapsed:.2f}s, limit {limit:g}s)"
        LINES.append(line)
        print(line)
    assert elapsed < limit, f"criterion {num} took {elapsed:.2f}s (limit {limit}s)"


def _random_graph(rng, max_n):
    n = int(rng.integers(1, max_n + 1))
    pairs = [(u, v) for u in range(n) for v in range(u + 1, n)]
    keep = rng.random(len(pairs)) < rng.uniform(0.1, 0.7)
    return Graph.from_edges(n, [p for p, t in zip(pairs, keep) if t])


def _random_step_pair(rng, k, denom=10):
    raw = rng.integers(0, denom + 1, size=k)
    raw[int(rng.integers(k))] += 1
    rho = tuple(Fraction(int(v), int(raw.sum())) for v in raw)
    mu = [[Fraction(0)] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            mu[i][j] = mu[j][i] = Fraction(int(rng.integers(0, denom + 1)), denom)
    return StepMeasurePair(k, rho, tuple(map(tuple, mu)))


def test_criterion_01_quotient_identities():
    rng = _rng(101)
    with criterion(1, "quotient mass/symmetry/edge/degree identities on 500 triples", 5):
        for _ in range(500):
            g = _random_graph(rng, 12)
            k = int(rng.integers(1, 5))
            colors = [int(c) for c in rng.integers(0, k, size=g.n)]
            q = quotient(g, Coloring.from_zero_based(colors, k))
            assert (q.x, q.X) == quotient_by_loops(g, colors, k)
            assert sum(q.x) == 1
            assert all(q.X[i][j] == q.X[j][i] for i in range(k) for j in range(k))
            assert sum(sum(r) for r in q.X) == Fraction(2 * g.num_edges, g.n)
            for i in range(k):
                deg = sum(g.degrees[u] for u in range(g.n) if colors[u] == i)
                assert sum(q.X[i]) == Fraction(deg, g.n)


def test_criterion_02_cycle_manifold_and_construction():
    rng = _rng(202)
    with criterion(2, "cycle-union partition sets on the manifold; construction within k/n", 30):
        for g in (disjoint_copies(cycle_graph(4), 3), disjoint_copies(cycle_graph(6), 2)):
            pts = partition_set(g, 2)
            assert len(pts) > 1
            assert all(on_cycle_manifold(q) for q in pts)
            for q in pts:
                assert all(sum(q.X[i]) == 2 * q.x[i] for i in range(2))
        for length, cycles in ((4, 3), (6, 2), (4, 20), (6, 12)):
            g = disjoint_copies(cycle_graph(length), cycles)
            for _ in range(20):
                t = random_manifold_target(rng, 60)
                q = quotient(g, achievable_coloring_c4c6(t, g))
                assert on_cycle_manifold(q)
                assert q.distance(t) <= Fraction(2, cycles)  # k/n with k = 2, n = number of cycles


def test_criterion_03_projection_bounds_and_contraction():
    rng = _rng(303)
    with criterion(3, "Prokhorov(m, T_k m) <= 1/k and d_var contraction, 1000 instances each", 30):
        for i in range(1000):
            n = int(rng.integers(2, 9))
            g = erdos_renyi_graph(n, float(rng.uniform(0.5, 3.0)), int(rng.integers(10**6)))
            k = int(rng.integers(1, 6))
            m = build_measures(g, random_real_coloring(n, i, avoid=(k,)))
            lo, hi = prokhorov_to_projection(m, k)
            assert 0 <= lo <= hi <= 1 / k
        for _ in range(1000):
            k = int(rng.integers(1, 4))
            a, b = _random_step_pair(rng, 2 * k), _random_step_pair(rng, 2 * k)
            assert d_var(project_tk(a, k), project_tk(b, k)) <= d_var(a, b)


def test_criterion_04_d_var_matches_subsets():
    rng = _rng(404)
    with criterion(4, "closed-form d_var equals max over all cell-union subsets, 200 pairs", 30):
        for _ in range(200):
            k = int(rng.integers(1, 4))
            a, b = _random_step_pair(rng, k), _random_step_pair(rng, k)
            assert d_var(a, b) == dvar_by_subsets(a.rho, b.rho, a.mu, b.mu)


def test_criterion_05_isolated_vertices_multinomial():
    rng = _rng(505)
    with criterion(5, "rate_exact on 10..14 isolated vertices matches multinomial form", 60):
        for n in range(10, 15):
            g = empty_graph(n)
            for k in (2, 3):
                assert bucket_histogram(g, k, Fraction(1, 10)).total == k**n
                assert bucket_histogram(g, k, Fraction(1, 7)).total == k**n
                for _ in range(6):
                    parts = rng.multinomial(n, [1 / k] * k)
                    x = tuple(Fraction(int(p), n) for p in parts)
                    center = Quotient(x, tuple((0,) * k for _ in range(k)))
                    delta = Fraction(int(rng.integers(1, 5)), 10)
                    inside = [c for c in part_size_vectors(n, k)
                              if all(abs(Fraction(ci, n) - xi) <= delta for ci, xi in zip(c, x))]
                    est = rate_exact(RateQuery(g, k, center, delta))
                    assert abs(est.value - isolated_rate_closed_form(n, k, inside)) <= 1e-12


def test_criterion_06_refinement_on_matching():
    g = disjoint_copies(complete_graph(2), 8)
    with criterion(6, "coarse rate of merged cell <= fine rate on every occupied cell of 8 K2", 60):
        rows = cell_refinement_check(g, 4, Fraction(2, 17))
        assert rows
        assert all(r["holds"] for r in rows)


def test_criterion_07_brute_vs_transfer():
    with criterion(7, "brute vs transfer on C3..C12 and P2..P12, 10 targets each for k=2,3", 60):
        for k in (2, 3):
            for seed in range(10):
                h = random_soft_core_target(k, 7000 + seed, rational=False)
                shapes = [cycle_graph(n) for n in range(3, 13)] + [path_graph(n) for n in range(2, 13)]
                for g in shapes:
                    t = hom_count(g, h, "transfer").log_value
                    b = hom_count(g, h, "brute").log_value
                    assert abs(math.expm1(t - b)) <= 1e-12
        h = TargetGraph((1, 1), ((1, 2), (2, 1)))
        for alg in ("brute", "transfer", "components"):
            assert hom_count(cycle_graph(4), h, alg).value == 82


def _random_rational_target(rng, k):
    alpha = tuple(Fraction(int(rng.integers(1, 7)), 3) for _ in range(k))
    A = [[Fraction(0)] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            A[i][j] = A[j][i] = Fraction(int(rng.integers(0, 7)), 3)
    return TargetGraph(alpha, tuple(map(tuple, A)))


def test_criterion_08_lambda_machinery():
    rng = _rng(808)
    with criterion(8, "lambda monotonicity on 200 instances; C5 closed form; deletion witness", 30):
        for _ in range(200):
            g = _random_graph(rng, 7)
            h = _random_rational_target(rng, int(rng.integers(2, 4)))
            l1, l2 = sorted(Fraction(int(v), 32) for v in rng.integers(1, 33, size=2))
            assert hom_count(g, soften(h, l1)).value <= hom_count(g, soften(h, l2)).value
        f = free_energy(cycle_graph(5), soften(hard_core_k2(), 0.01))
        assert abs(f + math.log(1.01**5 - 0.99**5) / 5) <= 1e-9
        w = deletion_witness(cycle_graph(5), hard_core_k2(), 0.2)
        assert len(w.removed_edges) == 1
        assert hom_count(cycle_graph(5).remove_edges(w.removed_edges), hard_core_k2()).value == 2


def test_criterion_09_gibbs_sandwich():
    with criterion(9, "Gibbs bucket sandwich on 8 K2 and C6, 3 targets, delta 1/8 and 1/16", 120):
        for g in (disjoint_copies(complete_graph(2), 8), cycle_graph(6)):
            for seed in range(3):
                h = random_soft_core_target(2, 900 + seed)
                for delta in (Fraction(1, 8), Fraction(1, 16)):
                    rep = gibbs_bucket_decomposition(g, h, delta)
                    assert rep.contained
                    assert rep.upper - rep.lower <= rep.width_bound + 1e-12


def _maxcut_by_masks(g):
    bits = (np.arange(2**g.n)[:, None] >> np.arange(g.n)[None, :]) & 1
    cut = np.zeros(2**g.n, dtype=np.int64)
    for u, v in g.edge_list:
        cut += bits[:, u] ^ bits[:, v]
    return int(cut.max())


def test_criterion_10_maxcut_sandwich():
    rng = _rng(1010)
    with criterion(10, "brute-force MaxCut inside beta=20 bounds on 50 graphs, width <= n log2/20", 60):
        for _ in range(50):
            n = int(rng.integers(4, 17))
            g = erdos_renyi_graph(n, float(rng.uniform(1.0, 5.0)), int(rng.integers(10**6)))
            brute = _maxcut_by_masks(g)
            assert maxcut_exact(g) == brute
            row = maxcut_from_beta(g, [20.0]).rows[0]
            assert row["lower"] - 1e-9 <= brute <= row["upper"] + 1e-9
            assert row["upper"] - row["lower"] <= g.n * math.log(2) / 20 + 1e-9


def test_criterion_11_counterexample_scenarios():
    with criterion(11, "c4c6 and expander-doubling scenarios", 120):
        c = run_scenario("c4c6-partition-not-left", seed=0)
        e = run_scenario("expander-right-not-partition", seed=0)
        for rep in (c, e):
            assert not rep.truncated
            failed = [ch.name for ch in rep.checks if not ch.passed]
            assert not failed, f"{rep.name}: {failed}"


def test_criterion_12_finite_cells_match_thickened_set():
    instances = [(empty_graph(n), k, Fraction(1, 10)) for n in range(10, 15) for k in (2, 3)]
    m = disjoint_copies(complete_graph(2), 8)
    instances += [(m, 2, Fraction(2, 17)), (m, 4, Fraction(2, 17))]
    with criterion(12, "finite-rate cells coincide with the delta-thickened partition set", 60):
        for g, k, delta in instances:
            rep = finite_rate_check(g, k, delta, probes=200, seed=12)
            assert rep.holds, rep
