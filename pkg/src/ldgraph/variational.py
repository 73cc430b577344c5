"""Energy of a quotient under a target graph and the grid decomposition of ``log Z``.

A coloring ``sigma`` of ``g`` has weight ``exp(-|V| E(G/sigma))`` in
``hom(g, h)``, so grouping colorings by grid cell sandwiches ``log Z``
between cell-wise maxima, up to a Lipschitz slack ``K delta``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from scipy.special import logsumexp

from .graphs import Graph
from .hom import TargetGraph, hom_count
from .quotients import ENUMERATION_BUDGET, Quotient, as_fraction
from .rates import _index, bucket_histogram

INF = math.inf


def energy_flat(flat: Sequence, h: TargetGraph) -> float:
    """Energy of a flattened point ``(x, X)``; ``0 log 0 = 0``, positive mass on a zero weight is ``+inf``."""
    k = h.k
    if len(flat) != k + k * k:
        raise ValueError(f"point has {len(flat)} coordinates, target expects {k + k * k}")
    total = 0.0
    for i in range(k):
        if flat[i]:
            total -= float(flat[i]) * math.log(float(h.alpha[i]))
    for i in range(k):
        for j in range(k):
            v = flat[k + i * k + j]
            if not v:
                continue
            a = float(h.A[i][j])
            if a == 0:
                return INF
            total -= 0.5 * float(v) * math.log(a)
    return total


def energy(q: Quotient, h: TargetGraph) -> float:
    if q.k != h.k:
        raise ValueError("quotient and target have different k")
    return energy_flat(q.flat(), h)


def lipschitz_constant(h: TargetGraph) -> float:
    """``K = (k + k^2/2) max(|log alpha_i|, |log A_ij|)``; infinite for hard-core targets."""
    if not h.soft_core:
        return INF
    logs = [abs(math.log(float(a))) for a in h.alpha] + [abs(math.log(float(v))) for r in h.A for v in r]
    return (h.k + h.k * h.k / 2) * max(logs)


@dataclass
class GibbsReport:
    delta: Fraction
    K: float
    buckets: int
    lower: float
    upper: float
    exact: float
    identity_log_z: float
    n_vertices: int = 1

    @property
    def contained(self) -> bool:
        return self.lower <= self.exact <= self.upper

    @property
    def width_bound(self) -> float:
        return 2 * self.K * float(self.delta) + math.log(self.buckets) / self.n_vertices

    def to_dict(self) -> dict:
        return {
            "delta": str(self.delta),
            "K": self.K,
            "buckets": self.buckets,
            "lower": self.lower,
            "upper": self.upper,
            "exact": self.exact,
            "identity_log_z": self.identity_log_z,
            "contained": self.contained,
            "width": self.upper - self.lower,
            "width_bound": self.width_bound,
        }


def gibbs_bucket_decomposition(g: Graph, h: TargetGraph, delta,
                               budget: int = ENUMERATION_BUDGET) -> GibbsReport:
    """Per-vertex bounds on ``log hom(g, h)`` from the grid histogram at pitch ``delta``.

    ``lower = max_b [log N_b - n (E_b + K delta)] / n`` and
    ``upper = lower + 2 K delta + log(#b) / n``, with ``E_b`` the energy at the
    cell's lower corner.  ``identity_log_z`` re-sums exact per-point weights.
    """
    if not h.soft_core:
        raise ValueError("Gibbs decomposition needs a soft-core target (K is undefined otherwise)")
    d = as_fraction(delta)
    n, k = g.n, h.k
    K = lipschitz_constant(h)
    bh = bucket_histogram(g, k, d, budget)
    scores = [math.log(c) / n - energy_flat(bh.corner(cell), h) for cell, c in bh.buckets.items()]
    best = max(scores)
    lower = best - K * float(d)
    upper = best + K * float(d) + math.log(len(scores)) / n
    exact = hom_count(g, h, budget=budget).per_vertex
    idx = _index(g, k, budget)
    terms = [math.log(c) - n * energy_flat([Fraction(int(v), n) for v in key], h)
             for key, c in zip(idx.keys.tolist(), idx.counts)]
    identity = float(logsumexp(terms)) / n
    return GibbsReport(d, K, len(scores), lower, upper, exact, identity, n)


@dataclass
class EnergyEntropyPoint:
    cell: tuple
    corner: tuple
    representative: Quotient
    energy: float
    entropy: float
    free: float
    direct: float
    gap: float
    slack: float
    delta: Fraction
    K: float

    @property
    def within_slack(self) -> bool:
        return -self.K * float(self.delta) <= self.gap <= self.slack

    def to_dict(self) -> dict:
        return {
            "minimizer_cell": list(self.cell),
            "corner": [str(v) for v in self.corner],
            "representative": self.representative.to_dict(),
            "energy": self.energy,
            "entropy": self.entropy,
            "variational": self.free,
            "direct": self.direct,
            "gap": self.gap,
            "slack_bound": self.slack,
            "lower_slack": -self.K * float(self.delta),
            "delta": str(self.delta),
            "K": self.K,
        }


def variational_free_energy(g: Graph, h: TargetGraph, delta,
                            budget: int = ENUMERATION_BUDGET) -> EnergyEntropyPoint:
    """Minimize ``E(corner) - (1/n) log N_b`` over occupied cells and compare with ``-(1/n) log Z``.

    The entropy term ``(1/n) log N_b`` equals ``log k - I_hat`` on the cell.
    Cells of infinite energy are skipped; ties go to the lexicographically
    smallest corner.  The gap lies in ``[-K delta, K delta + log(#b)/n]``.
    """
    d = as_fraction(delta)
    n, k = g.n, h.k
    bh = bucket_histogram(g, k, d, budget)
    best = None
    for cell in sorted(bh.buckets, key=lambda c: bh.corner(c)):
        corner = bh.corner(cell)
        e = energy_flat(corner, h)
        if e == INF:
            continue
        s = math.log(bh.buckets[cell]) / n
        if best is None or e - s < best[0]:
            best = (e - s, cell, corner, e, s)
    if best is None:
        raise ValueError("every occupied cell has infinite energy")
    value, cell, corner, e, s = best
    direct_lp = hom_count(g, h, budget=budget)
    direct = INF if direct_lp.log_value == -INF else -direct_lp.per_vertex
    K = lipschitz_constant(h)
    slack = K * float(d) + math.log(len(bh.buckets)) / n
    idx = _index(g, k, budget)
    cells = (idx.keys * d.denominator) // (n * d.numerator)
    members = [key for key, c in zip(idx.keys.tolist(), cells.tolist()) if tuple(c) == cell]
    rep = Quotient.from_numerators(min(members), n, k, g.degree_bound)
    return EnergyEntropyPoint(cell, corner, rep, e, s, value, direct, value - direct, slack, d, K)


def argmin_cell(g: Graph, h: TargetGraph, delta, budget: int = ENUMERATION_BUDGET) -> tuple:
    return variational_free_energy(g, h, delta, budget).cell


def scaled_target(h: TargetGraph, c: float) -> TargetGraph:
    return TargetGraph(tuple(float(a) * c for a in h.alpha), h.A, h.labels)


__all__ = [
    "EnergyEntropyPoint",
    "GibbsReport",
    "argmin_cell",
    "energy",
    "energy_flat",
    "gibbs_bucket_decomposition",
    "lipschitz_constant",
    "scaled_target",
    "variational_free_energy",
]
