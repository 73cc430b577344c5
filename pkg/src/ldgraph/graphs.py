"""Bounded-degree simple graphs, the graph families used throughout, and edit distances."""

from __future__ import annotations

import itertools
import json
import os
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import InfeasibleError

EXACT_ISO_LIMIT = 8
MAX_REGULAR_ATTEMPTS = 10_000


def _norm_edge(u: int, v: int) -> tuple[int, int]:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0..n-1`` with a declared degree bound."""

    n: int
    edges: frozenset
    degree_bound: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("vertex count must be nonnegative")
        deg = [0] * self.n
        for e in self.edges:
            u, v = e
            if u == v:
                raise ValueError(f"self-loop at {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise ValueError(f"edge {e} out of range for n={self.n}")
            if u > v:
                raise ValueError(f"edge {e} not normalized (use Graph.from_edges)")
            deg[u] += 1
            deg[v] += 1
        if deg and max(deg) > self.degree_bound:
            raise ValueError(f"max degree {max(deg)} exceeds declared bound {self.degree_bound}")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], degree_bound: int | None = None) -> Graph:
        norm = set()
        for u, v in edges:
            e = _norm_edge(int(u), int(v))
            if e[0] < 0 or e[1] >= n:
                raise ValueError(f"edge {e} out of range for n={n}")
            if e in norm:
                raise ValueError(f"parallel edge {e}")
            norm.add(e)
        if degree_bound is None:
            deg = [0] * n
            for u, v in norm:
                deg[u] += 1
                deg[v] += 1
            degree_bound = max(deg, default=0)
        return cls(n, frozenset(norm), int(degree_bound))

    @cached_property
    def edge_list(self) -> tuple[tuple[int, int], ...]:
        return tuple(sorted(self.edges))

    @cached_property
    def edge_array(self) -> np.ndarray:
        """``(|E|, 2)`` int array of sorted edges."""
        if not self.edges:
            return np.zeros((0, 2), dtype=np.int64)
        return np.array(self.edge_list, dtype=np.int64)

    @cached_property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for u, v in self.edge_list:
            nbrs[u].append(v)
            nbrs[v].append(u)
        return tuple(tuple(sorted(a)) for a in nbrs)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        return tuple(len(a) for a in self.adjacency)

    @property
    def max_degree(self) -> int:
        return max(self.degrees, default=0)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def has_edge(self, u: int, v: int) -> bool:
        return _norm_edge(u, v) in self.edges

    def components(self) -> list[list[int]]:
        """Connected components as sorted vertex lists, ordered by smallest vertex."""
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            comp = [s]
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for w in self.adjacency[u]:
                    if not seen[w]:
                        seen[w] = True
                        comp.append(w)
                        queue.append(w)
            comps.append(sorted(comp))
        return comps

    def induced(self, vertices: Sequence[int]) -> Graph:
        """Induced subgraph relabeled in the order given."""
        index = {v: i for i, v in enumerate(vertices)}
        edges = [(index[u], index[v]) for u, v in self.edge_list if u in index and v in index]
        return Graph.from_edges(len(vertices), edges, self.degree_bound)

    def relabel(self, perm: Sequence[int]) -> Graph:
        """Graph with vertex ``v`` renamed to ``perm[v]``."""
        return Graph.from_edges(self.n, [(perm[u], perm[v]) for u, v in self.edge_list], self.degree_bound)

    def remove_edges(self, edges: Iterable[Sequence[int]]) -> Graph:
        drop = {_norm_edge(u, v) for u, v in edges}
        missing = drop - self.edges
        if missing:
            raise ValueError(f"edges not present: {sorted(missing)}")
        return Graph(self.n, self.edges - drop, self.degree_bound)

    def disjoint_union(self, other: Graph) -> Graph:
        off = self.n
        edges = set(self.edges) | {(u + off, v + off) for u, v in other.edges}
        return Graph(self.n + other.n, frozenset(edges), max(self.degree_bound, other.degree_bound))

    # serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edge_list], "degree_bound": self.degree_bound}

    @classmethod
    def from_dict(cls, d: dict) -> Graph:
        return cls.from_edges(int(d["n"]), d["edges"], int(d["degree_bound"]))

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_json(cls, text: str) -> Graph:
        return cls.from_dict(json.loads(text))

    def to_edgelist(self) -> str:
        lines = [f"# n={self.n}", f"# degree_bound={self.degree_bound}"]
        lines += [f"{u} {v}" for u, v in self.edge_list]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_edgelist(cls, text: str) -> Graph:
        n = None
        bound = None
        edges = []
        for raw in text.splitlines():
            line = raw.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition("=")
                if key.strip() == "n":
                    n = int(val)
                elif key.strip() == "degree_bound":
                    bound = int(val)
                continue
            u, v = line.split()
            edges.append((int(u), int(v)))
        if n is None:
            raise ValueError("edge list is missing the '# n=<int>' header")
        return cls.from_edges(n, edges, bound)


# ---------------------------------------------------------------------------
# elementary constructors


def empty_graph(n: int) -> Graph:
    return Graph(n, frozenset(), 0)


def path_graph(n: int) -> Graph:
    """Path on ``n`` vertices (``n - 1`` edges)."""
    if n < 1:
        raise ValueError("path needs at least one vertex")
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)], 2 if n > 2 else n - 1)


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise ValueError("cycle length must be at least 3")
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)], 2)


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, itertools.combinations(range(n), 2), max(n - 1, 0))


def disjoint_copies(base: Graph, count: int) -> Graph:
    if count < 1:
        raise ValueError("count must be positive")
    edges = []
    for c in range(count):
        off = c * base.n
        edges.extend((u + off, v + off) for u, v in base.edge_list)
    return Graph(base.n * count, frozenset(edges), base.degree_bound)


def lattice_graph(d: int, n: int) -> Graph:
    """Box ``{-n..n}^d`` with edges between points at l1 distance one."""
    if d < 1 or n < 0:
        raise ValueError("lattice needs d >= 1 and n >= 0")
    side = 2 * n + 1
    total = side**d
    edges = []
    for idx in range(total):
        for axis in range(d):
            stride = side**axis
            if (idx // stride) % side < side - 1:
                edges.append((idx, idx + stride))
    return Graph.from_edges(total, edges, 2 * d)


def lattice_coordinates(d: int, n: int) -> np.ndarray:
    """Coordinates in ``{-n..n}^d`` of the vertices of :func:`lattice_graph`."""
    side = 2 * n + 1
    idx = np.arange(side**d)
    return np.stack([(idx // side**a) % side - n for a in range(d)], axis=1)


def _rng(seed: int, *stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *stream])))


def random_regular_graph(n: int, degree: int, seed: int) -> Graph:
    """Configuration model with full rejection of loops and multi-edges."""
    if n < 1 or degree < 0:
        raise ValueError("need n >= 1 and degree >= 0")
    if (n * degree) % 2:
        raise ValueError(f"n*degree must be even (n={n}, degree={degree})")
    if degree >= n:
        raise ValueError("degree must be smaller than n")
    stubs = np.repeat(np.arange(n), degree)
    for attempt in range(MAX_REGULAR_ATTEMPTS):
        rng = _rng(seed, n, degree, attempt)
        perm = rng.permutation(stubs)
        pairs = perm.reshape(-1, 2)
        if np.any(pairs[:, 0] == pairs[:, 1]):
            continue
        edges = {_norm_edge(int(a), int(b)) for a, b in pairs}
        if len(edges) == len(pairs):
            return Graph(n, frozenset(edges), degree)
    raise InfeasibleError(f"no simple {degree}-regular graph on {n} vertices after {MAX_REGULAR_ATTEMPTS} attempts")


def random_bipartite_regular_graph(n: int, degree: int, seed: int) -> Graph:
    """Bipartite configuration model: sides ``0..n/2-1`` and ``n/2..n-1``."""
    if n < 2 or n % 2:
        raise ValueError("bipartite regular graph needs an even number of vertices")
    half = n // 2
    if degree > half:
        raise ValueError("degree exceeds side size")
    left = np.repeat(np.arange(half), degree)
    for attempt in range(MAX_REGULAR_ATTEMPTS):
        rng = _rng(seed, n, degree, attempt, 1)
        right = rng.permutation(left) + half
        edges = {(int(a), int(b)) for a, b in zip(left, right)}
        if len(edges) == len(left):
            return Graph(n, frozenset(edges), degree)
    raise InfeasibleError(f"no simple bipartite {degree}-regular graph on {n} vertices")


def erdos_renyi_graph(n: int, c: float, seed: int) -> Graph:
    """G(n, c/n); the degree bound is the observed maximum degree."""
    if n < 1 or c < 0:
        raise ValueError("need n >= 1 and c >= 0")
    p = min(1.0, c / n)
    rng = _rng(seed, n)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.size) < p
    return Graph.from_edges(n, zip(iu[keep].tolist(), ju[keep].tolist()))


# ---------------------------------------------------------------------------
# graph spec strings


def parse_graph(spec: str) -> Graph:
    """``"cycle:5"``, ``"path:4"``, ``"complete:3"``, ``"empty:10"``, ``"lattice:d:n"``,
    ``"regular:n:deg:seed"``, ``"bipartite:n:deg:seed"``, ``"er:n:c:seed"``, with an optional
    ``"copies*"`` prefix.  An existing file path is read as JSON or as an edge list."""
    if os.path.exists(spec):
        with open(spec, encoding="utf-8") as fh:
            text = fh.read()
        return Graph.from_json(text) if text.lstrip().startswith("{") else Graph.from_edgelist(text)
    copies = 1
    if "*" in spec:
        head, spec = spec.split("*", 1)
        copies = int(head)
    kind, *args = spec.split(":")
    try:
        a = [int(v) for v in args] if kind != "er" else [int(args[0]), float(args[1]), int(args[2])]
    except (IndexError, ValueError) as exc:
        raise ValueError(f"bad arguments for {kind!r}: {args}") from exc
    makers = {
        "cycle": lambda: cycle_graph(*a),
        "path": lambda: path_graph(*a),
        "complete": lambda: complete_graph(*a),
        "empty": lambda: empty_graph(*a),
        "lattice": lambda: lattice_graph(*a),
        "regular": lambda: random_regular_graph(*a),
        "bipartite": lambda: random_bipartite_regular_graph(*a),
        "er": lambda: erdos_renyi_graph(*a),
    }
    if kind not in makers:
        raise ValueError(f"unknown graph kind {kind!r}")
    try:
        base = makers[kind]()
    except TypeError as exc:
        raise ValueError(f"bad arguments for {kind!r}: {args}") from exc
    return base if copies == 1 else disjoint_copies(base, copies)


# ---------------------------------------------------------------------------
# families


@dataclass(frozen=True)
class DisjointCopies:
    base: Graph
    count: int | None = None  # None: use the sequence index

    def realize(self, index: int) -> Graph:
        return disjoint_copies(self.base, self.count if self.count is not None else index)


@dataclass(frozen=True)
class Cycle:
    length: int | None = None

    def realize(self, index: int) -> Graph:
        return cycle_graph(self.length if self.length is not None else index)


@dataclass(frozen=True)
class CycleUnion:
    """``index`` disjoint cycles of a fixed length (the C4/C6 constructions)."""

    length: int

    def realize(self, index: int) -> Graph:
        return disjoint_copies(cycle_graph(self.length), index)


@dataclass(frozen=True)
class Lattice:
    d: int
    n: int | None = None

    def realize(self, index: int) -> Graph:
        return lattice_graph(self.d, self.n if self.n is not None else index)


@dataclass(frozen=True)
class RandomRegular:
    degree: int
    seed: int
    n: int | None = None

    def realize(self, index: int) -> Graph:
        n = self.n if self.n is not None else index
        return random_regular_graph(n, self.degree, self.seed + 7919 * index)


@dataclass(frozen=True)
class RandomBipartiteRegular:
    degree: int
    seed: int
    n: int | None = None

    def realize(self, index: int) -> Graph:
        n = self.n if self.n is not None else index
        return random_bipartite_regular_graph(n, self.degree, self.seed + 7919 * index)


@dataclass(frozen=True)
class ErdosRenyi:
    c: float
    seed: int
    n: int | None = None

    def realize(self, index: int) -> Graph:
        n = self.n if self.n is not None else index
        return erdos_renyi_graph(n, self.c, self.seed + 7919 * index)


@dataclass(frozen=True)
class EdgeDeleted:
    """A family with its lowest-numbered edge removed at every index."""

    inner: object
    count: int = 1

    def realize(self, index: int) -> Graph:
        g = realize(self.inner, index)
        return g.remove_edges(g.edge_list[: self.count])


@dataclass(frozen=True)
class AlternatingFamily:
    even: object
    odd: object

    def realize(self, index: int) -> Graph:
        return realize(self.even if index % 2 == 0 else self.odd, index)


@dataclass(frozen=True)
class Doubled:
    """Even index ``2m``: member ``m`` of ``inner``; odd ``2m+1``: two disjoint copies of it."""

    inner: object

    def realize(self, index: int) -> Graph:
        g = realize(self.inner, index // 2)
        return g if index % 2 == 0 else disjoint_copies(g, 2)


def realize(family, index: int) -> Graph:
    if index < 1:
        raise ValueError("index must be positive")
    return family.realize(index)


EXPANSION_LIMIT = 24


def edge_expansion(g: Graph, limit: int = EXPANSION_LIMIT) -> Fraction:
    """Exact ``min |E(W, W^c)| / |W|`` over nonempty ``W`` with ``|W| <= n/2``, by enumeration."""
    n = g.n
    if n < 2:
        raise ValueError("edge expansion needs at least two vertices")
    if n > limit:
        raise InfeasibleError(f"{n} vertices exceeds the enumeration limit {limit}")
    ea = g.edge_array
    best = None
    chunk = 1 << 16
    for start in range(1, 1 << n, chunk):
        masks = np.arange(start, min(start + chunk, 1 << n), dtype=np.int64)
        bits = (masks[:, None] >> np.arange(n, dtype=np.int64)) & 1
        size = bits.sum(axis=1)
        cut = (bits[:, ea[:, 0]] != bits[:, ea[:, 1]]).sum(axis=1) if len(ea) else np.zeros(len(masks), np.int64)
        ok = (2 * size <= n) & (size > 0)
        if not ok.any():
            continue
        c, s = cut[ok], size[ok]
        ratio = c / s
        near = ratio <= ratio.min() + 1e-9
        r = min(Fraction(int(a), int(b)) for a, b in zip(c[near], s[near]))
        if best is None or r < best:
            best = r
    return best


# ---------------------------------------------------------------------------
# edit distance and equivalence


def edit_distance_labeled(g: Graph, h: Graph) -> int:
    if g.n != h.n:
        raise ValueError(f"vertex counts differ: {g.n} vs {h.n}")
    return len(g.edges ^ h.edges)


def edit_distance_iso(g: Graph, h: Graph, limit: int = EXACT_ISO_LIMIT) -> int:
    """Minimum labeled edit distance over all relabelings of ``g``."""
    if g.n != h.n:
        raise ValueError(f"vertex counts differ: {g.n} vs {h.n}")
    if g.n > limit:
        raise InfeasibleError(f"exact search infeasible: {g.n} vertices exceeds limit {limit}")
    n = g.n
    if n == 0:
        return 0
    hadj = np.zeros((n, n), dtype=bool)
    for u, v in h.edge_list:
        hadj[u, v] = hadj[v, u] = True
    perms = np.array(list(itertools.permutations(range(n))), dtype=np.int64)
    ge = g.edge_array
    if len(ge):
        kept = hadj[perms[:, ge[:, 0]], perms[:, ge[:, 1]]].sum(axis=1)
    else:
        kept = np.zeros(len(perms), dtype=np.int64)
    # |E(g') \ E(h)| + |E(h) \ E(g')| = |E(g)| + |E(h)| - 2 |common|
    return int(g.num_edges + h.num_edges - 2 * kept.max())


@dataclass
class EquivalenceReport:
    indices: list
    vertex_counts: list
    distances: list
    ratios: list
    decreasing: bool
    below_tol: bool
    method: str = "labeled"
    notes: list = field(default_factory=list)

    @property
    def looks_equivalent(self) -> bool:
        return self.decreasing and self.below_tol


def is_equivalent_sequence(a, b, indices: Sequence[int], slope_tol: float) -> EquivalenceReport:
    """Finite-sample check of ``edit distance / |V| -> 0`` along ``indices``.

    Uses the labeled distance, an upper bound on the isomorphism-minimized one.
    """
    counts, dists, ratios = [], [], []
    for i in indices:
        ga, gb = realize(a, i), realize(b, i)
        if ga.n != gb.n:
            raise ValueError(f"vertex counts differ at index {i}: {ga.n} vs {gb.n}")
        d = edit_distance_labeled(ga, gb)
        counts.append(ga.n)
        dists.append(d)
        ratios.append(d / ga.n if ga.n else 0.0)
    decreasing = all(r2 <= r1 for r1, r2 in zip(ratios, ratios[1:]))
    return EquivalenceReport(list(indices), counts, dists, ratios, decreasing, ratios[-1] <= slope_tol)
