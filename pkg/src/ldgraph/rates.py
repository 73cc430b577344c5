"""Empirical rates ``log k - (1/|V|) log #{colorings with quotient in a ball}``.

Exact counts come from the per-component quotient histogram.  Two samplers
(i.i.d. and a Wang-Landau walk over grid buckets) estimate the same
quantity when enumeration is out of reach.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
from scipy.optimize import linprog, minimize
from scipy.special import logsumexp
from scipy.stats import binomtest

from .errors import BudgetExceededError, InfeasibleError
from .graphs import Graph, edit_distance_labeled
from .quotients import (
    ENUMERATION_BUDGET,
    Quotient,
    as_fraction,
    check_budget,
    coarsen,
    coloring_chunks,
    nearest_int_distances,
    partition_set,
    quotient_histogram,
    quotient_numerators,
)

INF = math.inf


@dataclass(frozen=True)
class RateQuery:
    graph: Graph
    k: int
    center: Quotient
    delta: Fraction

    def __post_init__(self):
        d = as_fraction(self.delta)
        if d <= 0:
            raise ValueError("delta must be positive")
        if self.center.k != self.k:
            raise ValueError("center has the wrong number of colors")
        object.__setattr__(self, "delta", d)


@dataclass
class RateEstimate:
    value: float
    method: str
    log_count: float | None = None
    count: int | None = None
    ci: tuple | None = None
    censored: bool = False
    seed: int | None = None
    samples: int | None = None
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        def num(v):
            if v is None:
                return None
            return "inf" if v == INF else float(v)

        return {
            "value": num(self.value),
            "method": self.method,
            "log_count": num(self.log_count),
            "count": None if self.count is None else str(self.count),
            "ci": None if self.ci is None else [num(c) for c in self.ci],
            "censored": self.censored,
            "seed": self.seed,
            "samples": self.samples,
            "meta": self.meta,
        }


# ---------------------------------------------------------------------------
# histogram index


@dataclass(frozen=True)
class _Index:
    n: int
    k: int
    keys: np.ndarray
    counts: tuple

    def count_box(self, lo: Sequence[Fraction], hi: Sequence[Fraction]) -> int:
        """Colorings whose quotient lies in the closed box ``[lo, hi]`` (quotient coordinates)."""
        n = self.n
        lo_i = np.array([math.ceil(n * v) for v in lo], dtype=np.int64)
        hi_i = np.array([math.floor(n * v) for v in hi], dtype=np.int64)
        mask = np.all((self.keys >= lo_i) & (self.keys <= hi_i), axis=1)
        return sum(self.counts[i] for i in np.flatnonzero(mask))


@lru_cache(maxsize=32)
def _index(g: Graph, k: int, budget: int) -> _Index:
    hist = quotient_histogram(g, k, budget)
    order = sorted(hist.counts)
    keys = np.array(order, dtype=np.int64).reshape(-1, k + k * k)
    return _Index(g.n, k, keys, tuple(hist.counts[key] for key in order))


def ball_box(center: Quotient, delta: Fraction) -> tuple[list, list]:
    c = center.flat()
    return [v - delta for v in c], [v + delta for v in c]


def rate_from_count(count: int, n: int, k: int) -> tuple[float, float | None]:
    if count == 0:
        return INF, None
    lc = math.log(count)
    return math.log(k) - lc / n, lc


def count_in_box(g: Graph, k: int, lo, hi, budget: int = ENUMERATION_BUDGET) -> int:
    return _index(g, k, budget).count_box([as_fraction(v) for v in lo], [as_fraction(v) for v in hi])


def rate_box(g: Graph, k: int, lo, hi, budget: int = ENUMERATION_BUDGET) -> float:
    return rate_from_count(count_in_box(g, k, lo, hi, budget), g.n, k)[0]


def rate_exact(q: RateQuery, budget: int = ENUMERATION_BUDGET) -> RateEstimate:
    """Exact count in the closed l-infinity ball and the corresponding rate."""
    lo, hi = ball_box(q.center, q.delta)
    count = _index(q.graph, q.k, budget).count_box(lo, hi)
    value, lc = rate_from_count(count, q.graph.n, q.k)
    return RateEstimate(value, "exact", lc, count, meta={"delta": str(q.delta)})


# ---------------------------------------------------------------------------
# grid buckets


def _pitch(delta) -> tuple[int, int]:
    d = as_fraction(delta)
    if d <= 0:
        raise ValueError("pitch must be positive")
    return d.numerator, d.denominator


def bucket_of_keys(keys: np.ndarray, n: int, delta) -> np.ndarray:
    """Cell index ``floor(value / delta)`` per coordinate, for numerator keys over ``n``."""
    p, q = _pitch(delta)
    return (np.asarray(keys, dtype=np.int64) * q) // (n * p)


@dataclass
class BucketHistogram:
    delta: Fraction
    k: int
    n: int
    buckets: dict

    @property
    def total(self) -> int:
        return sum(self.buckets.values())

    def corner(self, cell: tuple) -> tuple:
        return tuple(c * self.delta for c in cell)

    def cells_touching(self, lo: Sequence[Fraction], hi: Sequence[Fraction]) -> list[tuple]:
        """Occupied cells whose closure meets the box ``[lo, hi]``."""
        d = self.delta
        return [c for c in self.buckets
                if all(ci * d <= h and (ci + 1) * d >= l for ci, l, h in zip(c, lo, hi))]

    def to_csv(self) -> str:
        k = self.k
        head = [f"x{i + 1}" for i in range(k)] + [f"X{i + 1}{j + 1}" for i in range(k) for j in range(k)]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(head + ["count"])
        for cell in sorted(self.buckets):
            w.writerow([str(v) for v in self.corner(cell)] + [self.buckets[cell]])
        return buf.getvalue()


def bucket_histogram(g: Graph, k: int, delta, budget: int = ENUMERATION_BUDGET) -> BucketHistogram:
    """Exact coloring counts per half-open grid cell of pitch ``delta``."""
    d = as_fraction(delta)
    idx = _index(g, k, budget)
    cells = bucket_of_keys(idx.keys, g.n, d)
    out: dict = {}
    for cell, c in zip(map(tuple, cells.tolist()), idx.counts):
        out[cell] = out.get(cell, 0) + c
    return BucketHistogram(d, k, g.n, out)


# ---------------------------------------------------------------------------
# sampling


def _rng(seed: int, *stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *stream])))


def _rate_iid(q: RateQuery, samples: int, seed: int, confidence: float) -> RateEstimate:
    g, k, n = q.graph, q.k, q.graph.n
    lo, hi = ball_box(q.center, q.delta)
    lo_i = np.array([math.ceil(n * v) for v in lo], dtype=np.int64)
    hi_i = np.array([math.floor(n * v) for v in hi], dtype=np.int64)
    rng = _rng(seed, 1)
    hits = done = 0
    while done < samples:
        b = min(1 << 15, samples - done)
        keys = quotient_numerators(g, rng.integers(0, k, size=(b, n)), k)
        hits += int(np.all((keys >= lo_i) & (keys <= hi_i), axis=1).sum())
        done += b
    ci = binomtest(hits, samples).proportion_ci(confidence_level=confidence, method="wilson")
    to_rate = lambda p: INF if p <= 0 else -math.log(p) / n  # noqa: E731
    rate_ci = (to_rate(ci.high), to_rate(ci.low))
    meta = {"hits": hits, "confidence": confidence}
    if hits == 0:
        return RateEstimate(rate_ci[0], "iid", ci=rate_ci, censored=True, seed=seed, samples=samples, meta=meta)
    return RateEstimate(to_rate(hits / samples), "iid", ci=rate_ci, seed=seed, samples=samples, meta=meta)


@dataclass
class FlatHistogramResult:
    log_weights: dict
    stages: int
    steps: int
    flat: bool
    delta: Fraction

    def log_probabilities(self) -> dict:
        cells = sorted(self.log_weights)
        vals = np.array([self.log_weights[c] for c in cells])
        vals = vals - logsumexp(vals)
        return dict(zip(cells, vals.tolist()))


def wang_landau(g: Graph, k: int, delta, seed: int = 0, stages: int = 20, flatness: float = 0.8,
                block: int = 1 << 14, max_steps: int = 20_000_000) -> FlatHistogramResult:
    """Density-of-states walk over grid buckets with single-vertex recoloring moves."""
    if k < 2:
        raise ValueError("flat-histogram sampling needs k >= 2")
    d = as_fraction(delta)
    p, qd = d.numerator, d.denominator
    n = g.n
    adj = g.adjacency
    rng = _rng(seed, 2)
    colors = rng.integers(0, k, size=n).tolist()
    key = quotient_numerators(g, np.array(colors), k)[0].tolist()
    den = n * p

    def cell(kk):
        return tuple((v * qd) // den for v in kk)

    cur = cell(key)
    lng: dict = {cur: 0.0}
    hist: dict = {}
    lnf = 1.0
    steps = 0
    flat_all = True
    for _ in range(stages):
        hist.clear()
        while True:
            vs = rng.integers(0, n, size=block).tolist()
            shifts = rng.integers(1, k, size=block).tolist()
            us = rng.random(block).tolist()
            for t in range(block):
                v = vs[t]
                a = colors[v]
                b = (a + shifts[t]) % k
                new = key[:]
                new[a] -= 1
                new[b] += 1
                for w in adj[v]:
                    c = colors[w]
                    new[k + a * k + c] -= 1
                    new[k + c * k + a] -= 1
                    new[k + b * k + c] += 1
                    new[k + c * k + b] += 1
                nc = cell(new)
                ln_new = lng.get(nc)
                if ln_new is None:
                    # new buckets start at the current minimum
                    ln_new = lng[nc] = min(lng.values())
                diff = lng[cur] - ln_new
                if diff >= 0 or us[t] < math.exp(diff):
                    colors[v] = b
                    key = new
                    cur = nc
                lng[cur] += lnf
                hist[cur] = hist.get(cur, 0) + 1
            steps += block
            counts = [hist.get(c, 0) for c in lng]
            if min(counts) >= flatness * (sum(counts) / len(counts)):
                break
            if steps >= max_steps:
                flat_all = False
                break
        lnf /= 2
        if not flat_all:
            break
    return FlatHistogramResult(dict(lng), stages, steps, flat_all, d)


def rate_sampled(q: RateQuery, method: str = "iid", samples: int = 100_000, seed: int = 0,
                 confidence: float = 0.95, pitch=None, stages: int = 20) -> RateEstimate:
    """Sampled rate estimate.  ``iid`` gives a Wilson interval; ``wang_landau`` aggregates grid buckets."""
    if method == "iid":
        return _rate_iid(q, samples, seed, confidence)
    if method in ("wang_landau", "flat_histogram"):
        pitch = as_fraction(pitch) if pitch is not None else q.delta
        res = wang_landau(q.graph, q.k, pitch, seed=seed, stages=stages)
        logp = res.log_probabilities()
        lo, hi = ball_box(q.center, q.delta)
        hits = [logp[c] for c in logp
                if all(ci * pitch <= h and (ci + 1) * pitch >= l for ci, l, h in zip(c, lo, hi))]
        value = INF if not hits else -float(logsumexp(hits)) / q.graph.n
        meta = {"pitch": str(pitch), "stages": res.stages, "buckets": len(logp), "flat": res.flat,
                "aggregation": "cells whose closure meets the ball"}
        return RateEstimate(max(0.0, value), "flat_histogram", seed=seed, samples=res.steps, meta=meta)
    raise ValueError(f"unknown sampling method {method!r}")


def rate_cells(q: RateQuery, pitch, budget: int = ENUMERATION_BUDGET) -> RateEstimate:
    """Exact rate of the union of grid cells whose closure meets the ball (the sampler's target)."""
    bh = bucket_histogram(q.graph, q.k, pitch, budget)
    lo, hi = ball_box(q.center, q.delta)
    count = sum(bh.buckets[c] for c in bh.cells_touching(lo, hi))
    value, lc = rate_from_count(count, q.graph.n, q.k)
    return RateEstimate(value, "exact_cells", lc, count, meta={"pitch": str(as_fraction(pitch))})


# ---------------------------------------------------------------------------
# disjoint unions: explicit type-vector computation


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


def _base_points(base: Graph, k: int, budget: int):
    """Distinct per-copy contributions and how many base colorings give each."""
    check_budget(base.n, k, budget)
    acc: dict = {}
    for block in coloring_chunks(base.n, k):
        for key in map(tuple, quotient_numerators(base, block, k).tolist()):
            acc[key] = acc.get(key, 0) + 1
    keys = sorted(acc)
    return keys, [acc[key] for key in keys]


def sanov_rate_disjoint_union(base: Graph, copies: int, k: int, center: Quotient, delta,
                              budget: int = ENUMERATION_BUDGET, asymptotic: bool = True) -> RateEstimate:
    """Rate for ``copies`` disjoint copies of ``base`` via multinomial counts over coloring types.

    A coloring of the union is a type vector ``z`` over the colorings of the
    base graph; the quotient is the ``z``-average of the per-copy
    contributions.  The exact count sums multinomial weights over type
    vectors landing in the ball.  The asymptotic rate is
    ``min KL(z || uniform) / |V(base)|`` over type distributions whose
    average lies in the ball.
    """
    d = as_fraction(delta)
    if center.k != k:
        raise ValueError("center has the wrong number of colors")
    keys, mult = _base_points(base, k, budget)
    n0 = base.n
    n = n0 * copies
    npts = len(keys)
    if math.comb(copies + npts - 1, npts - 1) > budget:
        raise BudgetExceededError("too many type vectors to enumerate")
    lo, hi = ball_box(center, d)
    lo_i = [math.ceil(n * v) for v in lo]
    hi_i = [math.floor(n * v) for v in hi]
    arr = np.array(keys, dtype=np.int64)
    count = 0
    for z in _compositions(copies, npts):
        tot = np.asarray(z, dtype=np.int64) @ arr
        if all(a <= t <= b for a, t, b in zip(lo_i, tot.tolist(), hi_i)):
            term = math.factorial(copies)
            for zi, m in zip(z, mult):
                term = term // math.factorial(zi) * m**zi
            count += term
    value, lc = rate_from_count(count, n, k)
    meta: dict = {"copies": copies, "types": npts}
    if asymptotic:
        meta["asymptotic_rate"] = sanov_asymptotic_rate(keys, mult, n0, k, center, d)
    return RateEstimate(value, "sanov_exact", lc, count, meta=meta)


def sanov_asymptotic_rate(keys, mult, n0: int, k: int, center: Quotient, delta) -> float:
    """``min KL(z || u) / n0`` subject to the averaged contribution lying in the closed ball."""
    d = float(as_fraction(delta))
    pts = np.array(keys, dtype=float) / n0
    u = np.array(mult, dtype=float) / k**n0
    c = center.as_array()
    npts = len(keys)
    a_ub = np.vstack([pts.T, -pts.T])
    b_ub = np.concatenate([c + d, d - c]) + 1e-12
    a_eq = np.ones((1, npts))
    lp = linprog(np.zeros(npts), A_ub=a_ub, b_ub=b_ub, A_eq=a_eq, b_eq=[1.0], bounds=[(0, 1)] * npts,
                 method="highs")
    if lp.status != 0:
        return INF
    z0 = 0.5 * lp.x + 0.5 * u
    # nudge the start towards feasibility
    if np.any(a_ub @ z0 > b_ub):
        z0 = lp.x

    def kl(z):
        z = np.clip(z, 1e-300, None)
        return float(np.sum(z * (np.log(z) - np.log(u))))

    def grad(z):
        return np.log(np.clip(z, 1e-300, None)) - np.log(u) + 1.0

    res = minimize(kl, z0, jac=grad, method="SLSQP", bounds=[(0, 1)] * npts,
                   constraints=[{"type": "eq", "fun": lambda z: z.sum() - 1.0, "jac": lambda z: np.ones(npts)},
                                {"type": "ineq", "fun": lambda z: b_ub - a_ub @ z, "jac": lambda z: -a_ub}],
                   options={"ftol": 1e-14, "maxiter": 500})
    best = min(kl(lp.x), kl(res.x) if res.success or np.all(a_ub @ res.x <= b_ub + 1e-9) else INF)
    return max(0.0, best) / n0


# ---------------------------------------------------------------------------
# diagnostics


@dataclass
class RefinementRow:
    center: Quotient
    fine_rate: float
    coarse_rate: float
    same_radius_rate: float
    holds: bool
    same_radius_slack: float
    ball_infima: list


def coarse_box(lo: Sequence[Fraction], hi: Sequence[Fraction], k: int) -> tuple[list, list]:
    """Image box of ``[lo, hi]`` (resolution ``k``) under merging colors ``2i-1, 2i``."""
    kc = k // 2

    def merge(v):
        x = [v[2 * i] + v[2 * i + 1] for i in range(kc)]
        X = [v[k + a * k + b] for a in range(k) for b in range(k)]
        Xc = [sum(X[a * k + b] for a in (2 * i, 2 * i + 1) for b in (2 * j, 2 * j + 1))
              for i in range(kc) for j in range(kc)]
        return x + Xc

    return merge(list(lo)), merge(list(hi))


def refinement_diagnostic(g: Graph, centers: Sequence[Quotient], delta,
                          budget: int = ENUMERATION_BUDGET) -> list[RefinementRow]:
    """Compare rates at resolution ``2k`` with rates of the merged quotient at ``k``.

    A ball of radius ``delta`` maps into the box of the merged center with
    half-widths ``2 delta`` (node weights) and ``4 delta`` (edge weights),
    so the coarse rate of that box never exceeds the fine rate.  The radius
    ``4 delta`` ball contains that box and is what ``coarse_rate`` reports.
    """
    d = as_fraction(delta)
    rows = []
    for c in centers:
        k = c.k
        if k % 2:
            raise ValueError("centers must have an even number of colors")
        fine = rate_exact(RateQuery(g, k, c, d), budget).value
        cc = coarsen(c, 2)
        coarse = rate_exact(RateQuery(g, k // 2, cc, 4 * d), budget).value
        same = rate_exact(RateQuery(g, k // 2, cc, d), budget).value
        slack = 0.0 if same <= fine else (INF if fine == INF else same - fine)
        infima = []
        cur, rad = c, d
        while True:
            infima.append(rate_exact(RateQuery(g, cur.k, cur, rad), budget).value)
            if cur.k % 2:
                break
            cur, rad = coarsen(cur, 2), 4 * rad
        rows.append(RefinementRow(c, fine, coarse, same, coarse <= fine, slack, infima))
    return rows


def grid_aligned_points(g: Graph, k: int, delta, budget: int = ENUMERATION_BUDGET) -> bool:
    """True when some achievable quotient has a positive coordinate on a grid line of pitch ``delta``."""
    p, q = _pitch(delta)
    keys = _index(g, k, budget).keys
    return bool(np.any(((keys * q) % (g.n * p) == 0) & (keys > 0)))


def cell_refinement_check(g: Graph, k: int, delta, budget: int = ENUMERATION_BUDGET) -> list[dict]:
    """For every occupied closed cell at resolution ``k``: coarse rate of its merged box vs its own rate.

    When no quotient sits on an interior grid line the closed-cell counts
    equal the bucket counts; otherwise each cell is counted directly.
    """
    d = as_fraction(delta)
    bh = bucket_histogram(g, k, d, budget)
    direct = grid_aligned_points(g, k, d, budget)
    coarse_idx = _index(g, k // 2, budget)
    out = []
    for cell in sorted(bh.buckets):
        lo = [c * d for c in cell]
        hi = [(c + 1) * d for c in cell]
        count = count_in_box(g, k, lo, hi, budget) if direct else bh.buckets[cell]
        fine = rate_from_count(count, g.n, k)[0]
        clo, chi = coarse_box(lo, hi, k)
        coarse = rate_from_count(coarse_idx.count_box(clo, chi), g.n, k // 2)[0]
        out.append({"cell": cell, "fine": fine, "coarse": coarse, "holds": coarse <= fine})
    return out


@dataclass
class PerturbationReport:
    edits: int
    shift_bound: Fraction
    observed_max_shift: Fraction | None
    rows: list

    @property
    def holds(self) -> bool:
        return all(r["holds"] for r in self.rows) and (
            self.observed_max_shift is None or self.observed_max_shift <= self.shift_bound)


def perturbation_stability(g: Graph, g_tilde: Graph, k: int, centers: Sequence[Quotient], delta,
                           budget: int = ENUMERATION_BUDGET) -> PerturbationReport:
    """Ball-inclusion check under edge edits.

    ``e`` edits move every coloring's quotient by at most ``s = 2e/n`` in
    each coordinate, so counts satisfy ``N_gt(q, delta) <= N_g(q, delta + s)``
    and symmetrically.  When both graphs fit a full joint enumeration the
    largest per-coloring shift is measured as well.
    """
    if g.n != g_tilde.n:
        raise ValueError("graphs must have the same vertex count")
    d = as_fraction(delta)
    e = edit_distance_labeled(g, g_tilde)
    n = g.n
    s = Fraction(2 * e, n)
    rows = []
    for c in centers:
        lo, hi = ball_box(c, d)
        lo2, hi2 = ball_box(c, d + s)
        a = count_in_box(g, k, lo, hi, budget)
        b = count_in_box(g_tilde, k, lo, hi, budget)
        a2 = count_in_box(g, k, lo2, hi2, budget)
        b2 = count_in_box(g_tilde, k, lo2, hi2, budget)
        rows.append({
            "center": c.to_dict(),
            "rate_g": rate_from_count(a, n, k)[0],
            "rate_g_tilde": rate_from_count(b, n, k)[0],
            "rate_g_wide": rate_from_count(a2, n, k)[0],
            "rate_g_tilde_wide": rate_from_count(b2, n, k)[0],
            "holds": b <= a2 and a <= b2,
        })
    observed = None
    try:
        check_budget(n, k, budget)
    except BudgetExceededError:
        pass
    else:
        top = 0
        for block in coloring_chunks(n, k):
            diff = np.abs(quotient_numerators(g, block, k) - quotient_numerators(g_tilde, block, k))
            top = max(top, int(diff.max()))
        observed = Fraction(top, n)
    return PerturbationReport(e, s, observed, rows)


@dataclass
class FiniteRateReport:
    delta: Fraction
    cells: int
    hausdorff: Fraction
    probes: int
    disagreements: int

    @property
    def holds(self) -> bool:
        return self.hausdorff <= self.delta and self.disagreements == 0


def finite_rate_check(g: Graph, k: int, delta, probes: int = 200, seed: int = 0,
                      budget: int = ENUMERATION_BUDGET) -> FiniteRateReport:
    """Finite-rate grid cells versus the ``delta``-thickened exact partition set.

    Two routes that must agree: rate finiteness of the closed ball around a
    probe point (histogram counting) and l-infinity distance from the probe
    to the partition set (point-set geometry).  Probes are grid corners of
    occupied cells shifted by random multiples of ``delta / 2``.  Also
    checks that occupied-cell corners are within Hausdorff distance
    ``delta`` of the partition set.
    """
    d = as_fraction(delta)
    n = g.n
    bh = bucket_histogram(g, k, d, budget)
    idx = _index(g, k, budget)
    # everything on the common integer scale L: points keys/n, corners cell*d, probe shifts d/2
    L = math.lcm(n, 2 * d.denominator)
    step = d.numerator * (L // d.denominator)
    pset = idx.keys * (L // n)
    cells = np.array(sorted(bh.buckets), dtype=np.int64)
    corners = cells * step
    haus = max(int(nearest_int_distances(corners, pset).max()), int(nearest_int_distances(pset, corners).max()))
    rng = _rng(seed, 3)
    probe_pts = []
    for _ in range(probes):
        base = corners[int(rng.integers(len(corners)))]
        shift = rng.integers(-3, 4, size=len(base))
        probe_pts.append(base + shift * (step // 2))
    probe_arr = np.array(probe_pts, dtype=np.int64).reshape(-1, k + k * k)
    dists = nearest_int_distances(probe_arr, pset)
    bad = 0
    for p, dist in zip(probe_arr.tolist(), dists.tolist()):
        lo = [Fraction(v - step, L) for v in p]
        hi = [Fraction(v + step, L) for v in p]
        finite = idx.count_box(lo, hi) > 0
        if finite != (dist <= step):
            bad += 1
    haus = Fraction(haus, L)
    return FiniteRateReport(d, len(corners), haus, probes, bad)


def isolated_rate_closed_form(n: int, k: int, counts_in_ball: Sequence[Sequence[int]]) -> float:
    """Rate on ``n`` isolated vertices from the multinomial coefficients of the admissible part sizes."""
    total = 0
    for parts in counts_in_ball:
        if sum(parts) != n:
            raise ValueError("part sizes must sum to n")
        term = math.factorial(n)
        for p in parts:
            term //= math.factorial(p)
        total += term
    return rate_from_count(total, n, k)[0]


def part_size_vectors(n: int, k: int):
    return (c for c in itertools.product(range(n + 1), repeat=k) if sum(c) == n)


__all__ = [
    "BucketHistogram",
    "FiniteRateReport",
    "FlatHistogramResult",
    "InfeasibleError",
    "PerturbationReport",
    "RateEstimate",
    "RateQuery",
    "RefinementRow",
    "bucket_histogram",
    "cell_refinement_check",
    "count_in_box",
    "finite_rate_check",
    "grid_aligned_points",
    "isolated_rate_closed_form",
    "part_size_vectors",
    "perturbation_stability",
    "rate_box",
    "rate_cells",
    "rate_exact",
    "rate_sampled",
    "refinement_diagnostic",
    "sanov_asymptotic_rate",
    "sanov_rate_disjoint_union",
    "wang_landau",
]
