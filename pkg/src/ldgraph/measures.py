"""Measure pairs ``(rho, mu)`` of real colorings and step measures on the k-grid.

Atoms carry float positions (treated as exact binary rationals) and
rational masses.  Step measures store exact rational cell masses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_flow

from .errors import GridLineError
from .graphs import Graph
from .quotients import Coloring, Quotient, as_fraction

# float distances are widened by this much before comparisons
DIST_ROUNDING = 1e-12
_INT32_CAP = 2**30


@dataclass(frozen=True)
class RealColoring:
    values: tuple
    seed: int | None = None

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if any(not 0.0 <= v <= 1.0 for v in vals):
            raise ValueError("real coloring values must lie in [0, 1]")
        object.__setattr__(self, "values", vals)

    def __len__(self):
        return len(self.values)


def on_grid(value: float, k: int) -> bool:
    return (k * Fraction(value)).denominator == 1


def random_real_coloring(n: int, seed: int, avoid: Sequence[int] = ()) -> RealColoring:
    """i.i.d. uniform values; draws landing on a grid line ``i/k`` (``k`` in ``avoid``) are redrawn."""
    rng = np.random.Generator(np.random.PCG64(seed))
    vals = rng.random(n)
    while True:
        bad = [i for i, v in enumerate(vals) if v == 0.0 or any(on_grid(v, k) for k in avoid)]
        if not bad:
            break
        vals[bad] = rng.random(len(bad))
    return RealColoring(tuple(vals.tolist()), seed)


@dataclass(frozen=True)
class MeasurePair:
    """Atomic ``rho`` (one atom per vertex) and ``mu`` (one atom per oriented edge), each atom of mass ``1/n``."""

    rho: tuple
    mu: tuple
    n: int
    total_bound: int

    @property
    def atom_mass(self) -> Fraction:
        return Fraction(1, self.n)

    def rho_total(self) -> Fraction:
        return len(self.rho) * self.atom_mass

    def mu_total(self) -> Fraction:
        return len(self.mu) * self.atom_mass

    def to_dict(self) -> dict:
        m = str(self.atom_mass)
        return {
            "n": self.n,
            "D": self.total_bound,
            "rho": [[p, m] for p in self.rho],
            "mu": [[list(p), m] for p in self.mu],
        }

    @classmethod
    def from_dict(cls, d: dict) -> MeasurePair:
        n = int(d["n"])
        for _, m in list(d["rho"]) + list(d["mu"]):
            if Fraction(m) != Fraction(1, n):
                raise ValueError("atoms must have mass 1/n")
        return cls(tuple(float(p) for p, _ in d["rho"]),
                   tuple((float(p[0]), float(p[1])) for p, _ in d["mu"]), n, int(d["D"]))


def build_measures(g: Graph, sigma: RealColoring) -> MeasurePair:
    if len(sigma) != g.n:
        raise ValueError(f"coloring has length {len(sigma)}, graph has {g.n} vertices")
    s = sigma.values
    mu = []
    for u, v in g.edge_list:
        mu.append((s[u], s[v]))
        mu.append((s[v], s[u]))
    return MeasurePair(tuple(s), tuple(mu), g.n, g.degree_bound)


@dataclass(frozen=True)
class StepMeasurePair:
    """Measures with constant density on each cell of the k-grid (and on products of cells)."""

    k: int
    rho: tuple
    mu: tuple

    def __post_init__(self):
        rho = tuple(as_fraction(v) for v in self.rho)
        mu = tuple(tuple(as_fraction(v) for v in row) for row in self.mu)
        k = self.k
        if len(rho) != k or len(mu) != k or any(len(r) != k for r in mu):
            raise ValueError("cell masses must have shapes (k,) and (k, k)")
        if any(v < 0 for v in rho) or any(v < 0 for r in mu for v in r):
            raise ValueError("cell masses must be nonnegative")
        if sum(rho) != 1:
            raise ValueError("rho must have total mass 1")
        if any(mu[i][j] != mu[j][i] for i in range(k) for j in range(i)):
            raise ValueError("mu must be symmetric")
        object.__setattr__(self, "rho", rho)
        object.__setattr__(self, "mu", mu)

    def mu_total(self) -> Fraction:
        return sum(v for r in self.mu for v in r)

    def to_dict(self) -> dict:
        return {"k": self.k, "rho": [str(v) for v in self.rho], "mu": [[str(v) for v in r] for r in self.mu]}

    @classmethod
    def from_dict(cls, d: dict) -> StepMeasurePair:
        return cls(int(d["k"]), tuple(d["rho"]), tuple(tuple(r) for r in d["mu"]))


def _cell(value: float, k: int) -> int:
    t = k * Fraction(value)
    if t.denominator == 1:
        raise GridLineError(f"atom at {value} lies on a grid line of resolution {k}")
    return math.floor(t)


def project_tk(m: MeasurePair | StepMeasurePair, k: int) -> StepMeasurePair:
    """Grid projection: cell masses equal the source masses of each open cell."""
    if k < 1:
        raise ValueError("k must be positive")
    if isinstance(m, StepMeasurePair):
        if m.k % k:
            raise ValueError(f"cannot project resolution {m.k} onto {k}")
        f = m.k // k
        rho = [sum(m.rho[i * f:(i + 1) * f]) for i in range(k)]
        mu = [[sum(m.mu[a][b] for a in range(i * f, (i + 1) * f) for b in range(j * f, (j + 1) * f))
               for j in range(k)] for i in range(k)]
        return StepMeasurePair(k, tuple(rho), tuple(map(tuple, mu)))
    w = m.atom_mass
    rho = [Fraction(0)] * k
    mu = [[Fraction(0)] * k for _ in range(k)]
    for p in m.rho:
        rho[_cell(p, k)] += w
    for p, q in m.mu:
        mu[_cell(p, k)][_cell(q, k)] += w
    return StepMeasurePair(k, tuple(rho), tuple(map(tuple, mu)))


def discretize_coloring(sigma: RealColoring, k: int) -> Coloring:
    """Color ``ceil(k * value)``, with value 0 sent to color 1."""
    colors = [max(1, math.ceil(k * Fraction(v))) for v in sigma.values]
    return Coloring(tuple(colors), k)


def quotient_to_step(q: Quotient) -> StepMeasurePair:
    return StepMeasurePair(q.k, q.x, q.X)


def step_to_quotient(s: StepMeasurePair, degree_bound: int | None = None) -> Quotient:
    return Quotient(s.rho, s.mu, degree_bound)


def _component_dvar(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    pos = sum((x - y for x, y in zip(a, b) if x > y), Fraction(0))
    neg = sum((y - x for x, y in zip(a, b) if y > x), Fraction(0))
    return max(pos, neg)


def d_var(a: StepMeasurePair, b: StepMeasurePair) -> Fraction:
    """Largest mass discrepancy over measurable sets, maximized over the two components."""
    if a.k != b.k:
        raise ValueError(f"resolution mismatch: {a.k} vs {b.k}")
    flat_a = [v for r in a.mu for v in r]
    flat_b = [v for r in b.mu for v in r]
    return max(_component_dvar(a.rho, b.rho), _component_dvar(flat_a, flat_b))


# ---------------------------------------------------------------------------
# Prokhorov distance between discrete measures via max-flow


def _flow_value(dist: np.ndarray, wa: np.ndarray, wb: np.ndarray, tau: float) -> int:
    """Max flow (integer units) from atoms of ``a`` to atoms of ``b`` along pairs at distance <= tau."""
    p, q = dist.shape
    src, dst = np.nonzero(dist <= tau)
    if not len(src):
        return 0
    big = int(min(wa.sum(), wb.sum()))
    s, t = 0, p + q + 1
    rows = np.concatenate([np.zeros(p, dtype=np.int64), 1 + src, 1 + p + np.arange(q)])
    cols = np.concatenate([1 + np.arange(p), 1 + p + dst, np.full(q, t)])
    caps = np.concatenate([wa, np.full(len(src), big), wb]).astype(np.int32)
    graph = csr_matrix((caps, (rows, cols)), shape=(p + q + 2, p + q + 2))
    return int(maximum_flow(graph, s, t).flow_value)


def _integer_weights(wa: Sequence[Fraction], wb: Sequence[Fraction]):
    """Integer capacities and the scale; ``err`` bounds the flow error in mass units."""
    denom = 1
    for w in list(wa) + list(wb):
        denom = math.lcm(denom, w.denominator)
    total = max(sum(wa), sum(wb))
    if total * denom < _INT32_CAP:
        ia = np.array([int(w * denom) for w in wa], dtype=np.int64)
        ib = np.array([int(w * denom) for w in wb], dtype=np.int64)
        return ia, ib, Fraction(denom), Fraction(0)
    scale = math.floor(_INT32_CAP / total)
    ia = np.array([math.floor(w * scale) for w in wa], dtype=np.int64)
    ib = np.array([math.floor(w * scale) for w in wb], dtype=np.int64)
    return ia, ib, Fraction(scale), Fraction(len(wa) + len(wb), scale)


def discrete_prokhorov(pa: np.ndarray, wa: Sequence[Fraction], pb: np.ndarray, wb: Sequence[Fraction],
                       dist_exact: bool = False) -> tuple[float, float]:
    """Bracket for the Prokhorov distance between two finite atomic measures (l-infinity ground metric).

    Uses that the distance is the least ``tau`` with
    ``maxflow_tau >= max(|a|, |b|) - tau``, where ``maxflow_tau`` is the
    transport flow restricted to pairs at distance at most ``tau``.
    """
    wa = [as_fraction(w) for w in wa]
    wb = [as_fraction(w) for w in wb]
    keep_a = [i for i, w in enumerate(wa) if w > 0]
    keep_b = [i for i, w in enumerate(wb) if w > 0]
    big_m = float(max(sum(wa), sum(wb)))
    if not keep_a or not keep_b:
        return big_m, big_m
    pa = np.asarray(pa, dtype=float).reshape(len(wa), -1)[keep_a]
    pb = np.asarray(pb, dtype=float).reshape(len(wb), -1)[keep_b]
    ia, ib, scale, err = _integer_weights([wa[i] for i in keep_a], [wb[i] for i in keep_b])
    dist = np.abs(pa[:, None, :] - pb[None, :, :]).max(axis=2)
    slack = 0.0 if dist_exact else DIST_ROUNDING
    ts = np.unique(np.concatenate([[0.0], dist.ravel()]))
    ts = ts[ts <= big_m]
    ts = np.append(ts, big_m)
    cache: dict = {}

    def flow(i: int) -> float:
        if i not in cache:
            cache[i] = float(Fraction(_flow_value(dist, ia, ib, ts[i])) / scale)
        return cache[i]

    def search(extra: float) -> float:
        # least u with u >= M - F(u) - extra; F is constant between consecutive thresholds
        lo, hi = 0, len(ts) - 1
        while lo < hi:
            mid = (lo + hi) // 2
            if ts[mid] >= big_m - flow(mid) - extra:
                hi = mid
            else:
                lo = mid + 1
        cands = [max(ts[lo], big_m - flow(lo) - extra)]
        if lo > 0:
            cands.append(max(ts[lo - 1], big_m - flow(lo - 1) - extra))
        return min(cands)

    # computed distances are within `slack` of the true ones and the flow
    # is at most `err` below the true flow
    upper = search(slack) + slack
    lower = max(0.0, search(float(err) - slack) - slack)
    return lower, min(upper, big_m)


def _step_atoms_1d(masses: Sequence[Fraction], k: int, r: int):
    big = k * r
    pos, w = [], []
    for i, m in enumerate(masses):
        if m:
            for s in range(r):
                pos.append((2 * (i * r + s) + 1) / (2 * big))
                w.append(m / r)
    return np.array(pos).reshape(-1, 1), w


def _step_atoms_2d(masses, k: int, r: int):
    big = k * r
    pos, w = [], []
    for i in range(k):
        for j in range(k):
            m = masses[i][j]
            if m:
                for s in range(r):
                    for t in range(r):
                        pos.append(((2 * (i * r + s) + 1) / (2 * big), (2 * (j * r + t) + 1) / (2 * big)))
                        w.append(m / (r * r))
    return np.array(pos).reshape(-1, 2), w


@dataclass(frozen=True)
class ProkhorovBounds:
    lower: float
    upper: float
    d_var: Fraction
    refine: int

    def __iter__(self):
        return iter((self.lower, self.upper))


def default_refine(k: int, dim: int = 2) -> int:
    """Sub-cells per axis: finer in one dimension, where atoms are cheap."""
    if dim == 1:
        return max(k + 2, 240 // k)
    return max(2, min(k + 2, 48 // k))


def prokhorov_bounds(a: StepMeasurePair, b: StepMeasurePair, degree_bound: int,
                     refine: int | None = None) -> ProkhorovBounds:
    """Certified bracket for the Prokhorov distance of two step pairs.

    Starts from ``d_var / (4kD + 1) <= d <= d_var``.  When ``refine`` is
    positive, each cell is split into ``refine`` sub-cells per axis and its
    mass moved to sub-cell centers; each such move costs at most
    ``1/(2 k refine)`` in Prokhorov distance, so the exact flow distance of
    the discretized pair gives a second bracket of half-width ``1/(k refine)``.
    """
    if a.k != b.k:
        raise ValueError(f"resolution mismatch: {a.k} vs {b.k}")
    if degree_bound < 1:
        raise ValueError("degree bound must be at least 1")
    k = a.k
    dv = d_var(a, b)
    lower = float(dv) / (4 * k * degree_bound + 1)
    upper = float(dv)
    r = default_refine(k) if refine is None else refine
    if dv and r:
        r1 = max(r, default_refine(k, 1))
        err1, err = 1.0 / (k * r1), 1.0 / (k * r)
        p1, w1 = _step_atoms_1d(a.rho, k, r1)
        q1, v1 = _step_atoms_1d(b.rho, k, r1)
        lo1, hi1 = discrete_prokhorov(p1, w1, q1, v1)
        lo1, hi1 = lo1 - err1, hi1 + err1
        p2, w2 = _step_atoms_2d(a.mu, k, r)
        q2, v2 = _step_atoms_2d(b.mu, k, r)
        if w2 and v2:
            lo2, hi2 = discrete_prokhorov(p2, w2, q2, v2)
        else:
            lo2 = hi2 = float(max(sum(w2, Fraction(0)), sum(v2, Fraction(0))))
        lower = max(lower, lo1, lo2 - err)
        upper = min(upper, max(hi1, hi2 + err))
    return ProkhorovBounds(float(lower), float(upper), dv, r)


def prokhorov_to_projection(m: MeasurePair, k: int, refine: int | None = None) -> tuple[float, float]:
    """Bracket for ``d(m, T_k m)``; only the step side is discretized (error ``1/(2 k refine)``)."""
    s = project_tk(m, k)
    r = default_refine(k) if refine is None else refine
    r1 = max(r, default_refine(k, 1))
    err, err1 = 1.0 / (2 * k * r), 1.0 / (2 * k * r1)
    w = Fraction(1, m.n)
    p1, v1 = _step_atoms_1d(s.rho, k, r1)
    lo1, hi1 = discrete_prokhorov(np.array(m.rho).reshape(-1, 1), [w] * len(m.rho), p1, v1)
    lo1, hi1 = lo1 - err1, hi1 + err1
    if m.mu:
        p2, v2 = _step_atoms_2d(s.mu, k, r)
        lo2, hi2 = discrete_prokhorov(np.array(m.mu).reshape(-1, 2), [w] * len(m.mu), p2, v2)
        lo2, hi2 = lo2 - err, hi2 + err
    else:
        lo2 = hi2 = 0.0
    return float(max(0.0, lo1, lo2)), float(max(hi1, hi2))
