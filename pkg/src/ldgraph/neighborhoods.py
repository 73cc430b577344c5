"""Rooted r-balls, their canonical forms and neighborhood frequency vectors.

Canonical keys come from individualization-refinement: start from the
partition by (distance to root, color), refine to an equitable partition,
branch on the first non-singleton cell and keep the smallest encoding over
all leaves.  Keys are decodable byte strings.
"""

from __future__ import annotations

import itertools
import json
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import BudgetExceededError, InfeasibleError
from .graphs import Graph
from .quotients import Coloring, check_budget, coloring_chunks

CANON_LIMIT = 16
EXACT_COLORING_BUDGET = 200_000


def ball_size_bound(D: int, r: int) -> int:
    """Largest possible r-ball in a graph of maximum degree ``D``."""
    if r == 0 or D == 0:
        return 1
    if D == 1:
        return 2
    if D == 2:
        return 1 + 2 * r
    return 1 + D * ((D - 1) ** r - 1) // (D - 2)


# ---------------------------------------------------------------------------
# canonical forms


def _refine(adj: list[list[int]], labels: list) -> list[int]:
    """Equitable refinement; returns a canonical cell rank per vertex."""
    n = len(adj)
    ranks = _rank(labels)
    while True:
        sig = [(ranks[v], tuple(sorted(ranks[w] for w in adj[v]))) for v in range(n)]
        new = _rank(sig)
        if max(new, default=-1) == max(ranks, default=-1):
            return new
        ranks = new


def _rank(keys: list) -> list[int]:
    order = sorted(set(keys))
    pos = {k: i for i, k in enumerate(order)}
    return [pos[k] for k in keys]


def _encode(n: int, header: bytes, colors: Sequence[int], adj_sets: list[set], order: list[int]) -> bytes:
    bits = []
    for i in range(n):
        for j in range(i + 1, n):
            bits.append(1 if order[j] in adj_sets[order[i]] else 0)
    packed = np.packbits(np.array(bits, dtype=np.uint8)).tobytes() if bits else b""
    return header + bytes(colors[v] for v in order) + packed


def canonical_form(n: int, edges: Iterable[tuple[int, int]], labels: Sequence, header: bytes = b"",
                   colors: Sequence[int] | None = None) -> bytes:
    """Smallest encoding over label-respecting orderings (exact, by individualization-refinement)."""
    if n > CANON_LIMIT:
        raise InfeasibleError(f"canonical forms are limited to {CANON_LIMIT} vertices, got {n}")
    adj: list[list[int]] = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    adj_sets = [set(a) for a in adj]
    colors = list(colors) if colors is not None else [0] * n
    best: list = [None]

    def search(ranks: list[int]):
        ranks = _refine(adj, ranks)
        cells: dict = {}
        for v, r in enumerate(ranks):
            cells.setdefault(r, []).append(v)
        target = next((cells[r] for r in sorted(cells) if len(cells[r]) > 1), None)
        if target is None:
            order = sorted(range(n), key=lambda v: ranks[v])
            code = _encode(n, header, colors, adj_sets, order)
            if best[0] is None or code < best[0]:
                best[0] = code
            return
        for v in target:
            # individualize v: it precedes the rest of its cell
            search([2 * r + (0 if (u == v or r != ranks[v]) else 1) for u, r in enumerate(ranks)])

    search(_rank(list(labels)))
    return best[0]


def graph_canonical_key(g: Graph) -> bytes:
    """Unrooted canonical form; equal keys iff the graphs are isomorphic."""
    return canonical_form(g.n, g.edge_list, [0] * g.n, header=bytes([g.n, 255, 0]))


@dataclass(frozen=True)
class RootedColoredGraph:
    """Rooted graph (vertex 0 is the root after relabeling) with optional colors in ``1..m``."""

    graph: Graph
    root: int
    radius: int
    colors: tuple | None = None

    def __post_init__(self):
        if not 0 <= self.root < self.graph.n:
            raise ValueError("root out of range")
        if self.colors is not None and len(self.colors) != self.graph.n:
            raise ValueError("colors must cover every vertex")
        dist = self.distances
        if any(d is None or d > self.radius for d in dist):
            raise ValueError("every vertex must lie within the radius of the root")

    @cached_property
    def distances(self) -> list:
        dist: list = [None] * self.graph.n
        dist[self.root] = 0
        queue = deque([self.root])
        while queue:
            v = queue.popleft()
            for w in self.graph.adjacency[v]:
                if dist[w] is None:
                    dist[w] = dist[v] + 1
                    queue.append(w)
        return dist

    @cached_property
    def canonical_key(self) -> bytes:
        return canonical_key(self)


_KEY_CACHE: dict = {}


def canonical_key(h: RootedColoredGraph) -> bytes:
    """Decodable canonical byte string: equal iff root- and color-preserving isomorphic."""
    g = h.graph
    colors = h.colors if h.colors is not None else (0,) * g.n
    memo = (g.n, g.edges, h.root, h.radius, colors)
    if memo in _KEY_CACHE:
        return _KEY_CACHE[memo]
    dist = h.distances
    labels = [(dist[v], colors[v]) for v in range(g.n)]
    header = bytes([g.n, h.radius, 1 if h.colors is not None else 0])
    key = canonical_form(g.n, g.edge_list, labels, header, colors)
    if len(_KEY_CACHE) > 200_000:
        _KEY_CACHE.clear()
    _KEY_CACHE[memo] = key
    return key


@dataclass(frozen=True)
class DecodedKey:
    n: int
    radius: int
    colors: tuple | None
    edges: tuple

    def to_graph(self) -> RootedColoredGraph:
        return RootedColoredGraph(Graph.from_edges(self.n, self.edges), 0, self.radius, self.colors)

    def to_dict(self) -> dict:
        return {"n": self.n, "root": 0, "r": self.radius, "edges": [list(e) for e in self.edges],
                "colors": None if self.colors is None else list(self.colors)}


def decode_key(key: bytes) -> DecodedKey:
    n, radius, colored = key[0], key[1], key[2]
    colors = tuple(key[3:3 + n])
    npairs = n * (n - 1) // 2
    bits = np.unpackbits(np.frombuffer(key[3 + n:], dtype=np.uint8))[:npairs] if npairs else []
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    edges = tuple(p for p, b in zip(pairs, bits) if b)
    return DecodedKey(n, radius, colors if colored else None, edges)


def _ball_order(g: Graph, u: int, r: int) -> list[int]:
    """Vertices within distance ``r`` of ``u`` in BFS order."""
    dist = {u: 0}
    order = [u]
    queue = deque([u])
    while queue:
        v = queue.popleft()
        if dist[v] == r:
            continue
        for w in g.adjacency[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                order.append(w)
                queue.append(w)
    return order


def ball(g: Graph, u: int, r: int, colors: Sequence[int] | None = None) -> RootedColoredGraph:
    """Induced subgraph on vertices within distance ``r`` of ``u``; relabeled in BFS order, root 0."""
    if not 0 <= u < g.n:
        raise ValueError(f"vertex {u} out of range")
    if r < 0:
        raise ValueError("radius must be nonnegative")
    order = _ball_order(g, u, r)
    index = {v: i for i, v in enumerate(order)}
    edges = [(index[a], index[b]) for a in order for b in g.adjacency[a] if b in index and index[a] < index[b]]
    sub = Graph.from_edges(len(order), edges, degree_bound=g.degree_bound)
    cols = None if colors is None else tuple(int(colors[v]) for v in order)
    return RootedColoredGraph(sub, 0, r, cols)


# ---------------------------------------------------------------------------
# frequency vectors


@dataclass(frozen=True)
class FrequencyVector:
    """Exact frequencies of neighborhood types; ``entries`` is a sorted tuple of ``(key, Fraction)``."""

    entries: tuple
    r: int
    m: int = 0

    def __post_init__(self):
        if sum(v for _, v in self.entries) != 1:
            raise ValueError("frequencies must sum to 1")

    def as_dict(self) -> dict:
        return dict(self.entries)

    def keys(self) -> list[bytes]:
        return [k for k, _ in self.entries]

    def to_dict(self) -> dict:
        return {"m": self.m, "r": self.r, "entries": {k.hex(): str(v) for k, v in self.entries}}

    def decoding_table(self) -> dict:
        return {k.hex(): decode_key(k).to_dict() for k, _ in self.entries}

    @classmethod
    def from_dict(cls, d: dict) -> FrequencyVector:
        entries = tuple(sorted((bytes.fromhex(k), Fraction(v)) for k, v in d["entries"].items()))
        return cls(entries, int(d["r"]), int(d.get("m", 0)))

    def to_json(self) -> str:
        return json.dumps({"vector": self.to_dict(), "table": self.decoding_table()}, sort_keys=True)


def _freeze(counts: dict, n: int, r: int, m: int) -> FrequencyVector:
    return FrequencyVector(tuple(sorted((k, Fraction(c, n)) for k, c in counts.items())), r, m)


def bs_frequencies(g: Graph, r: int) -> FrequencyVector:
    """Frequency of each rooted r-ball type over all vertices."""
    if g.n == 0:
        raise ValueError("graph has no vertices")
    counts: dict = {}
    for u in range(g.n):
        key = ball(g, u, r).canonical_key
        counts[key] = counts.get(key, 0) + 1
    return _freeze(counts, g.n, r, 0)


def colored_frequencies(g: Graph, sigma: Coloring | Sequence[int], r: int) -> FrequencyVector:
    """Frequencies of colored rooted r-ball types under ``sigma``."""
    if not isinstance(sigma, Coloring):
        sigma = Coloring(tuple(sigma), max(sigma))
    if len(sigma) != g.n:
        raise ValueError(f"coloring has length {len(sigma)}, graph has {g.n} vertices")
    counts: dict = {}
    for u in range(g.n):
        key = ball(g, u, r, sigma.assignment).canonical_key
        counts[key] = counts.get(key, 0) + 1
    return _freeze(counts, g.n, r, sigma.k)


def forget_colors(fv: FrequencyVector) -> FrequencyVector:
    """Project colored types to uncolored ones and re-aggregate."""
    acc: dict = {}
    for key, v in fv.entries:
        dk = decode_key(key)
        plain = RootedColoredGraph(Graph.from_edges(dk.n, dk.edges), 0, dk.radius).canonical_key
        acc[plain] = acc.get(plain, Fraction(0)) + v
    return FrequencyVector(tuple(sorted(acc.items())), fv.r, 0)


def colored_frequency_set(g: Graph, m: int, r: int, method: str = "exact",
                          budget: int = EXACT_COLORING_BUDGET, samples: int = 1000,
                          seed: int = 0) -> frozenset:
    """Distinct colored frequency vectors over all (or sampled) colorings with ``m`` colors."""
    if m < 1:
        raise ValueError("m must be positive")
    balls = [ball(g, u, r) for u in range(g.n)]
    index_maps = [_ball_order(g, u, r) for u in range(g.n)]

    def vector(colors: Sequence[int]) -> FrequencyVector:
        counts: dict = {}
        for b, order in zip(balls, index_maps):
            key = RootedColoredGraph(b.graph, 0, r, tuple(colors[v] + 1 for v in order)).canonical_key
            counts[key] = counts.get(key, 0) + 1
        return _freeze(counts, g.n, r, m)

    out = set()
    if method == "exact":
        check_budget(g.n, m, budget)
        for block in coloring_chunks(g.n, m):
            for row in block.tolist():
                out.add(vector(row))
    elif method == "sampled":
        rng = np.random.Generator(np.random.PCG64(seed))
        for row in rng.integers(0, m, size=(samples, g.n)).tolist():
            out.add(vector(row))
    else:
        raise ValueError(f"unknown method {method!r}")
    return frozenset(out)


def frequency_distance(a: FrequencyVector, b: FrequencyVector) -> Fraction:
    """l-infinity distance over the union of keys (absent keys count as 0)."""
    da, db = a.as_dict(), b.as_dict()
    return max((abs(da.get(k, Fraction(0)) - db.get(k, Fraction(0))) for k in set(da) | set(db)),
               default=Fraction(0))


def frequency_set_distance(a: Iterable[FrequencyVector], b: Iterable[FrequencyVector]) -> Fraction:
    """Hausdorff distance between finite sets of frequency vectors."""
    a, b = list(a), list(b)
    if not a or not b:
        raise ValueError("empty set of frequency vectors")
    ab = max(min(frequency_distance(x, y) for y in b) for x in a)
    ba = max(min(frequency_distance(x, y) for x in a) for y in b)
    return max(ab, ba)


def isomorphic_bruteforce(g: Graph, h: Graph, root_g: int | None = None, root_h: int | None = None,
                          colors_g: Sequence | None = None, colors_h: Sequence | None = None) -> bool:
    """Permutation-search isomorphism test (reference oracle for small graphs)."""
    if g.n != h.n or len(g.edges) != len(h.edges):
        return False
    cg = list(colors_g) if colors_g is not None else [0] * g.n
    ch = list(colors_h) if colors_h is not None else [0] * h.n
    for perm in itertools.permutations(range(g.n)):
        if root_g is not None and perm[root_g] != root_h:
            continue
        if any(cg[v] != ch[perm[v]] for v in range(g.n)):
            continue
        if all(h.has_edge(perm[u], perm[v]) for u, v in g.edge_list):
            return True
    return False


__all__ = [
    "BudgetExceededError",
    "DecodedKey",
    "FrequencyVector",
    "RootedColoredGraph",
    "ball",
    "ball_size_bound",
    "bs_frequencies",
    "canonical_form",
    "canonical_key",
    "colored_frequencies",
    "colored_frequency_set",
    "decode_key",
    "forget_colors",
    "frequency_distance",
    "frequency_set_distance",
    "graph_canonical_key",
    "isomorphic_bruteforce",
]
