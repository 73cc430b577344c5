"""Colorings, k-quotients ``G/sigma`` and partition sets.

A quotient is stored with exact rationals.  Enumeration works on integer
numerators (part sizes and ordered edge counts) over the common denominator
``|V|`` and only builds :class:`Quotient` objects at the end.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Sequence

import numpy as np
from scipy.spatial import cKDTree

from .errors import BudgetExceededError
from .graphs import Graph

ENUMERATION_BUDGET = 10**8
CHUNK = 1 << 16


def as_fraction(v) -> Fraction:
    """Exact rational from int, Fraction, ``"p/q"`` string or float (decimal repr)."""
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, (float, np.floating)):
        if not math.isfinite(v):
            raise ValueError(f"non-finite value {v}")
        return Fraction(repr(float(v)))
    raise TypeError(f"cannot convert {v!r} to a rational")


@dataclass(frozen=True)
class Coloring:
    """Vertex coloring with colors ``1..k``."""

    assignment: tuple
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        object.__setattr__(self, "assignment", tuple(int(c) for c in self.assignment))
        bad = [c for c in self.assignment if not 1 <= c <= self.k]
        if bad:
            raise ValueError(f"colors out of range [1, {self.k}]: {bad[:5]}")

    def __len__(self):
        return len(self.assignment)

    def zero_based(self) -> np.ndarray:
        return np.asarray(self.assignment, dtype=np.int64) - 1

    @classmethod
    def from_zero_based(cls, arr, k: int) -> Coloring:
        return cls(tuple(int(c) + 1 for c in arr), k)


@dataclass(frozen=True)
class Quotient:
    """Point ``(x, X)`` of the quotient space: node weights and ordered edge weights."""

    x: tuple
    X: tuple
    degree_bound: int | None = field(default=None, compare=False)

    def __post_init__(self):
        x = tuple(as_fraction(v) for v in self.x)
        X = tuple(tuple(as_fraction(v) for v in row) for row in self.X)
        k = len(x)
        if k < 1 or len(X) != k or any(len(row) != k for row in X):
            raise ValueError("x must have length k and X must be k x k")
        if any(v < 0 for v in x) or any(v < 0 for row in X for v in row):
            raise ValueError("quotient entries must be nonnegative")
        if sum(x) != 1:
            raise ValueError(f"node weights must sum to 1, got {sum(x)}")
        if any(X[i][j] != X[j][i] for i in range(k) for j in range(i)):
            raise ValueError("edge weight matrix must be symmetric")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "X", X)

    @property
    def k(self) -> int:
        return len(self.x)

    def flat(self) -> tuple:
        """``(k+1) x k`` flattening: ``x`` first, then ``X`` row-major."""
        return self.x + tuple(v for row in self.X for v in row)

    def as_array(self) -> np.ndarray:
        return np.array([float(v) for v in self.flat()])

    def edge_total(self) -> Fraction:
        return sum(v for row in self.X for v in row)

    def distance(self, other: Quotient) -> Fraction:
        if other.k != self.k:
            raise ValueError("quotients have different k")
        return max(abs(a - b) for a, b in zip(self.flat(), other.flat()))

    def permute(self, perm: Sequence[int]) -> Quotient:
        """Relabel color ``i`` as ``perm[i]`` (0-based)."""
        k = self.k
        x = [Fraction(0)] * k
        X = [[Fraction(0)] * k for _ in range(k)]
        for i in range(k):
            x[perm[i]] = self.x[i]
            for j in range(k):
                X[perm[i]][perm[j]] = self.X[i][j]
        return Quotient(tuple(x), tuple(map(tuple, X)), self.degree_bound)

    def to_dict(self) -> dict:
        return {"k": self.k, "x": [str(v) for v in self.x], "X": [[str(v) for v in row] for row in self.X]}

    @classmethod
    def from_dict(cls, d: dict, degree_bound: int | None = None) -> Quotient:
        q = cls(tuple(d["x"]), tuple(tuple(r) for r in d["X"]), degree_bound)
        if "k" in d and int(d["k"]) != q.k:
            raise ValueError("declared k does not match x")
        return q

    @classmethod
    def from_numerators(cls, key: Sequence[int], n: int, k: int, degree_bound: int | None = None) -> Quotient:
        x = tuple(Fraction(c, n) for c in key[:k])
        X = tuple(tuple(Fraction(key[k + i * k + j], n) for j in range(k)) for i in range(k))
        return cls(x, X, degree_bound)


def coarsen(q: Quotient, factor: int = 2) -> Quotient:
    """Merge consecutive blocks of ``factor`` colors (the grid projection from ``k`` to ``k/factor``)."""
    if q.k % factor:
        raise ValueError(f"k={q.k} not divisible by {factor}")
    kc = q.k // factor
    x = [sum(q.x[i * factor:(i + 1) * factor]) for i in range(kc)]
    X = [[sum(q.X[a][b] for a in range(i * factor, (i + 1) * factor) for b in range(j * factor, (j + 1) * factor))
          for j in range(kc)] for i in range(kc)]
    return Quotient(tuple(x), tuple(map(tuple, X)), q.degree_bound)


# ---------------------------------------------------------------------------
# numerator codes


def quotient_numerators(g: Graph, colors: np.ndarray, k: int) -> np.ndarray:
    """Integer numerators for a batch of 0-based colorings.

    ``colors`` has shape ``(B, n)``; the result has shape ``(B, k + k*k)``:
    part sizes followed by ordered edge counts, all over denominator ``n``.
    """
    colors = np.asarray(colors, dtype=np.int64)
    if colors.ndim == 1:
        colors = colors[None, :]
    b = colors.shape[0]
    out = np.zeros((b, k + k * k), dtype=np.int64)
    for i in range(k):
        out[:, i] = (colors == i).sum(axis=1)
    ea = g.edge_array
    if len(ea):
        cu = colors[:, ea[:, 0]]
        cv = colors[:, ea[:, 1]]
        codes = np.concatenate([cu * k + cv, cv * k + cu], axis=1)
        codes += (np.arange(b, dtype=np.int64) * k * k)[:, None]
        out[:, k:] = np.bincount(codes.ravel(), minlength=b * k * k).reshape(b, k * k)
    return out


def coloring_chunks(n: int, k: int, start: int = 0, stop: int | None = None,
                    chunk: int = CHUNK) -> Iterator[np.ndarray]:
    """0-based colorings with indices in ``[start, stop)``, digit ``j`` = color of vertex ``j``."""
    total = k**n
    stop = total if stop is None else min(stop, total)
    powers = np.array([k**j for j in range(n)], dtype=np.int64)
    for s in range(start, stop, chunk):
        idx = np.arange(s, min(s + chunk, stop), dtype=np.int64)
        yield (idx[:, None] // powers[None, :]) % k


def check_budget(n: int, k: int, budget: int) -> None:
    if k < 1:
        raise ValueError("k must be positive")
    if n * math.log(k) > math.log(budget) + 1e-12:
        raise BudgetExceededError(f"{k}^{n} colorings exceeds enumeration budget {budget}")


def _component_signature(g: Graph, comp: list[int]) -> tuple:
    index = {v: i for i, v in enumerate(comp)}
    return (len(comp), tuple(sorted((index[u], index[v]) for u, v in g.edge_list if u in index)))


@dataclass
class QuotientHistogram:
    """Exact number of colorings landing on each quotient point."""

    n: int
    k: int
    counts: dict
    degree_bound: int | None = None

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    def points(self) -> list[Quotient]:
        return [Quotient.from_numerators(key, self.n, self.k, self.degree_bound) for key in sorted(self.counts)]

    def keys_array(self) -> np.ndarray:
        return np.array(sorted(self.counts), dtype=np.int64).reshape(-1, self.k + self.k * self.k)


def _enumerate_histogram(g: Graph, k: int, budget: int) -> dict:
    check_budget(g.n, k, budget)
    counts: Counter = Counter()
    for block in coloring_chunks(g.n, k):
        keys, mult = np.unique(quotient_numerators(g, block, k), axis=0, return_counts=True)
        for key, m in zip(map(tuple, keys.tolist()), mult.tolist()):
            counts[key] += m
    return dict(counts)


def convolve_histograms(a: dict, b: dict, budget: int = ENUMERATION_BUDGET) -> dict:
    """Histogram of the disjoint union: numerators add, counts multiply."""
    if len(a) * len(b) > budget:
        raise BudgetExceededError(f"histogram product {len(a)} x {len(b)} exceeds budget {budget}")
    out: defaultdict = defaultdict(int)
    for ka, ca in a.items():
        for kb, cb in b.items():
            out[tuple(p + q for p, q in zip(ka, kb))] += ca * cb
    return dict(out)


def quotient_histogram(g: Graph, k: int, budget: int = ENUMERATION_BUDGET) -> QuotientHistogram:
    """Exact coloring count per quotient point, factorized over connected components."""
    if k < 1:
        raise ValueError("k must be positive")
    if g.n == 0:
        raise ValueError("graph has no vertices")
    cache: dict = {}
    hist: dict | None = None
    for comp in g.components():
        sig = _component_signature(g, comp)
        if sig not in cache:
            cache[sig] = _enumerate_histogram(g.induced(comp), k, budget)
        hist = cache[sig] if hist is None else convolve_histograms(hist, cache[sig], budget)
    return QuotientHistogram(g.n, k, hist, g.degree_bound)


def quotient(g: Graph, sigma: Coloring | Sequence[int], k: int | None = None) -> Quotient:
    """Exact quotient ``G/sigma``."""
    if not isinstance(sigma, Coloring):
        sigma = Coloring(tuple(sigma), k if k is not None else max(sigma))
    if len(sigma) != g.n:
        raise ValueError(f"coloring has length {len(sigma)}, graph has {g.n} vertices")
    if g.n == 0:
        raise ValueError("graph has no vertices")
    key = quotient_numerators(g, sigma.zero_based(), sigma.k)[0].tolist()
    return Quotient.from_numerators(key, g.n, sigma.k, g.degree_bound)


# ---------------------------------------------------------------------------
# partition sets


@dataclass(frozen=True)
class QuotientSet:
    points: frozenset
    k: int
    method: str = "exact"
    budget: int | None = None
    seed: int | None = None

    def __len__(self):
        return len(self.points)

    def __iter__(self):
        return iter(sorted(self.points, key=lambda q: q.flat()))

    def __contains__(self, q):
        return q in self.points

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "method": self.method,
            "budget": self.budget,
            "seed": self.seed,
            "points": [q.to_dict() for q in self],
        }

    @classmethod
    def from_dict(cls, d: dict) -> QuotientSet:
        pts = frozenset(Quotient.from_dict(p) for p in d["points"])
        return cls(pts, int(d["k"]), d.get("method", "exact"), d.get("budget"), d.get("seed"))


def partition_set(g: Graph, k: int, method: str = "exact", budget: int = ENUMERATION_BUDGET,
                  samples: int = 10_000, seed: int = 0) -> QuotientSet:
    """All distinct k-quotients of ``g`` (exact) or those hit by ``samples`` random colorings."""
    if k < 1:
        raise ValueError("k must be positive")
    if method == "exact":
        hist = quotient_histogram(g, k, budget)
        return QuotientSet(frozenset(hist.points()), k, "exact", budget, None)
    if method == "sampled":
        rng = np.random.Generator(np.random.PCG64(seed))
        keys: set = set()
        done = 0
        while done < samples:
            b = min(CHUNK, samples - done)
            block = rng.integers(0, k, size=(b, g.n))
            keys.update(map(tuple, np.unique(quotient_numerators(g, block, k), axis=0).tolist()))
            done += b
        pts = frozenset(Quotient.from_numerators(key, g.n, k, g.degree_bound) for key in keys)
        return QuotientSet(pts, k, "sampled", samples, seed)
    raise ValueError(f"unknown method {method!r}")


def _scaled_integer_points(points: Sequence[Sequence[Fraction]], denom: int) -> np.ndarray:
    return np.array([[int(v * denom) for v in p] for p in points], dtype=np.int64)


def nearest_int_distances(ia: np.ndarray, ib: np.ndarray) -> np.ndarray:
    """For integer point arrays: l-infinity distance from each row of ``ia`` to the nearest row of ``ib``."""
    ia = np.asarray(ia, dtype=np.int64)
    ib = np.asarray(ib, dtype=np.int64)
    top = int(max(np.abs(ia).max(initial=0), np.abs(ib).max(initial=0)))
    if top < 2**51 and len(ia) * len(ib) > 1_000_000:
        # coordinates below 2^51 keep float Chebyshev distances exact
        dist, _ = cKDTree(ib.astype(float)).query(ia.astype(float), k=1, p=np.inf)
        return np.rint(dist).astype(np.int64)
    best = np.empty(len(ia), dtype=np.int64)
    step = max(1, 2_000_000 // max(1, len(ib) * ia.shape[1]))
    for s in range(0, len(ia), step):
        diff = np.abs(ia[s:s + step, None, :] - ib[None, :, :]).max(axis=2)
        best[s:s + step] = diff.min(axis=1)
    return best


def directed_distances(a: Sequence[Sequence[Fraction]], b: Sequence[Sequence[Fraction]]) -> list[Fraction]:
    """For every point of ``a`` the exact l-infinity distance to the nearest point of ``b``."""
    if not len(a) or not len(b):
        raise ValueError("point sets must be nonempty")
    denom = 1
    for p in list(a) + list(b):
        for v in p:
            denom = math.lcm(denom, v.denominator)
    top = max(abs(v) for p in list(a) + list(b) for v in p)
    if top * denom >= 2**60:
        raise ValueError("coordinates too fine for exact integer comparison")
    best = nearest_int_distances(_scaled_integer_points(a, denom), _scaled_integer_points(b, denom))
    return [Fraction(int(v), denom) for v in best]


def set_distance(a: Iterable[Quotient] | QuotientSet, b: Iterable[Quotient] | QuotientSet) -> Fraction:
    """Hausdorff distance between finite quotient sets under the l-infinity norm (exact)."""
    pa = [q.flat() for q in a]
    pb = [q.flat() for q in b]
    if not pa or not pb:
        raise ValueError("empty quotient set")
    if len(pa[0]) != len(pb[0]):
        raise ValueError("quotient sets have different k")
    return max(max(directed_distances(pa, pb)), max(directed_distances(pb, pa)))


def distance_to_set(q: Quotient, s: Iterable[Quotient] | QuotientSet) -> Fraction:
    return directed_distances([q.flat()], [p.flat() for p in s])[0]


# ---------------------------------------------------------------------------
# explicit construction on unions of even cycles


def cycle_components(g: Graph) -> list[list[int]]:
    """Vertices of each component in cycle order; raises unless ``g`` is a union of equal even cycles."""
    comps = g.components()
    lengths = {len(c) for c in comps}
    if len(lengths) != 1:
        raise ValueError("graph is not a union of equal-length cycles")
    (length,) = lengths
    if length < 4 or length % 2:
        raise ValueError("cycles must have even length >= 4")
    if any(d != 2 for d in g.degrees):
        raise ValueError("graph is not 2-regular")
    ordered = []
    for comp in comps:
        walk = [comp[0]]
        prev, cur = None, comp[0]
        while True:
            a, b = g.adjacency[cur]
            nxt = a if a != prev else b
            if nxt == walk[0]:
                break
            walk.append(nxt)
            prev, cur = cur, nxt
        if len(walk) != length:
            raise ValueError("component is not a cycle")
        ordered.append(walk)
    return ordered


def on_cycle_manifold(q: Quotient) -> bool:
    """Row sums of ``X`` equal ``2 x`` (the constraint set for 2-regular graphs)."""
    return all(sum(q.X[i]) == 2 * q.x[i] for i in range(q.k))


def _largest_remainder(targets: list[Fraction], total: int) -> list[int]:
    floors = [math.floor(t) for t in targets]
    rest = total - sum(floors)
    order = sorted(range(len(targets)), key=lambda i: (-(targets[i] - floors[i]), i))
    for i in order[:rest]:
        floors[i] += 1
    return floors


def achievable_coloring_c4c6(target: Quotient, g: Graph) -> Coloring:
    """Coloring of a union of ``n`` even cycles whose quotient is within ``k/n`` of ``target``.

    ``m_ij`` cycles (``i < j``) alternate colors ``i, j``; ``m_ii`` cycles are
    monochromatic.  Cycle counts are rounded from ``n X_ij`` and ``n X_ii / 2``
    by largest remainder so they sum to ``n``.
    """
    if not on_cycle_manifold(target):
        raise ValueError("target violates the row-sum constraint sum_j X_ij = 2 x_i")
    cycles = cycle_components(g)
    n = len(cycles)
    k = target.k
    slots = [(i, j) for i in range(k) for j in range(i, k)]
    targets = [n * target.X[i][j] if i != j else n * target.X[i][i] / 2 for i, j in slots]
    alloc = _largest_remainder(targets, n)
    assignment = [0] * g.n
    it = iter(cycles)
    for (i, j), m in zip(slots, alloc):
        for _ in range(m):
            for pos, v in enumerate(next(it)):
                assignment[v] = (i if pos % 2 == 0 else j) + 1
    return Coloring(tuple(assignment), k)
