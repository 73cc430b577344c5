"""Weighted homomorphism counts ``hom(G, H)`` and derived free energies.

All values are kept in log space.  Brute force streams over coloring
chunks; paths and cycles use the transfer matrix ``diag(alpha) A`` with
normalized repeated squaring, which never subtracts and so keeps exact
zeros.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import BudgetExceededError, InfeasibleError
from .graphs import Graph, realize
from .quotients import ENUMERATION_BUDGET, _component_signature, check_budget, coloring_chunks

NEG_INF = -math.inf
EXACT_BRUTE_LIMIT = 1 << 16


def _num(v):
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, (Fraction, int)) and not isinstance(v, bool):
        return v
    return float(v)


@dataclass(frozen=True)
class TargetGraph:
    """Weighted target: positive node weights ``alpha`` and symmetric nonnegative ``A``."""

    alpha: tuple
    A: tuple
    labels: tuple | None = None

    def __post_init__(self):
        alpha = tuple(_num(a) for a in self.alpha)
        A = tuple(tuple(_num(v) for v in row) for row in self.A)
        k = len(alpha)
        if k < 1 or len(A) != k or any(len(r) != k for r in A):
            raise ValueError("alpha must have length k and A must be k x k")
        if any(not a > 0 for a in alpha):
            raise ValueError("node weights must be positive")
        if any(not v >= 0 for r in A for v in r):
            raise ValueError("edge weights must be nonnegative")
        if any(A[i][j] != A[j][i] for i in range(k) for j in range(i)):
            raise ValueError("edge weight matrix must be symmetric")
        if self.labels is not None and len(self.labels) != k:
            raise ValueError("labels must have length k")
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "A", A)

    @property
    def k(self) -> int:
        return len(self.alpha)

    @property
    def soft_core(self) -> bool:
        return all(v > 0 for r in self.A for v in r)

    @property
    def rational(self) -> bool:
        return all(isinstance(v, (int, Fraction)) for v in self.alpha + tuple(x for r in self.A for x in r))

    def log_alpha(self) -> np.ndarray:
        return np.log(np.array([float(a) for a in self.alpha]))

    def log_A(self) -> np.ndarray:
        a = np.array([[float(v) for v in r] for r in self.A])
        with np.errstate(divide="ignore"):
            return np.log(a)

    def to_dict(self) -> dict:
        enc = lambda v: str(v) if isinstance(v, Fraction) else v  # noqa: E731
        d = {"alpha": [enc(a) for a in self.alpha], "A": [[enc(v) for v in r] for r in self.A]}
        if self.labels is not None:
            d["labels"] = list(self.labels)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> TargetGraph:
        labels = d.get("labels")
        return cls(tuple(d["alpha"]), tuple(tuple(r) for r in d["A"]), tuple(labels) if labels else None)


def hard_core_k2() -> TargetGraph:
    return TargetGraph((1, 1), ((0, 1), (1, 0)))


def ising_target(beta: float) -> TargetGraph:
    """``alpha = (1, 1)``, unit diagonal, ``e^beta`` across (rewards cut edges)."""
    eb = math.exp(beta)
    return TargetGraph((1, 1), ((1, eb), (eb, 1)))


@dataclass(frozen=True)
class LogPartition:
    log_value: float
    n: int
    exact: bool = False
    value: Fraction | None = None
    algorithm: str = ""

    @property
    def per_vertex(self) -> float:
        return self.log_value / self.n if self.n else 0.0

    def to_dict(self) -> dict:
        return {
            "log_value": "-inf" if self.log_value == NEG_INF else self.log_value,
            "per_vertex": "-inf" if self.log_value == NEG_INF else self.per_vertex,
            "n": self.n,
            "exact": self.exact,
            "value": None if self.value is None else str(self.value),
            "algorithm": self.algorithm,
        }


# ---------------------------------------------------------------------------
# brute force


def _merge_lse(acc: tuple[float, float], m: float, s: float) -> tuple[float, float]:
    am, asum = acc
    if m == NEG_INF:
        return acc
    if am == NEG_INF:
        return m, s
    if m > am:
        return m, asum * math.exp(am - m) + s
    return am, asum + s * math.exp(m - am)


def coloring_log_weights(g: Graph, h: TargetGraph, block: np.ndarray) -> np.ndarray:
    la, lA = h.log_alpha(), h.log_A()
    w = la[block].sum(axis=1)
    ea = g.edge_array
    if len(ea):
        w = w + lA[block[:, ea[:, 0]], block[:, ea[:, 1]]].sum(axis=1)
    return w


def _brute_log(g: Graph, h: TargetGraph, budget: int) -> float:
    check_budget(g.n, h.k, budget)
    acc = (NEG_INF, 0.0)
    for block in coloring_chunks(g.n, h.k):
        w = coloring_log_weights(g, h, block)
        m = float(w.max())
        if m == NEG_INF:
            continue
        acc = _merge_lse(acc, m, math.fsum(np.exp(w - m).tolist()))
    return NEG_INF if acc[0] == NEG_INF or acc[1] == 0 else acc[0] + math.log(acc[1])


def _brute_exact(g: Graph, h: TargetGraph) -> Fraction:
    total = Fraction(0)
    ea = g.edge_list
    for block in coloring_chunks(g.n, h.k):
        for row in block.tolist():
            t = Fraction(1)
            for c in row:
                t *= h.alpha[c]
            for u, v in ea:
                t *= h.A[row[u]][row[v]]
                if not t:
                    break
            total += t
    return total


# ---------------------------------------------------------------------------
# transfer matrices


def _path_or_cycle(g: Graph) -> tuple[str, list[int]] | None:
    """Classify a connected graph as ``("vertex"|"path"|"cycle", order)``, or None."""
    if g.n == 1:
        return "vertex", [0]
    deg = g.degrees
    if any(d > 2 for d in deg) or not g.edges:
        return None
    ends = [v for v in range(g.n) if deg[v] == 1]
    if ends and len(ends) != 2:
        return None
    start = ends[0] if ends else 0
    order, prev, cur = [start], None, start
    while True:
        nxt = [w for w in g.adjacency[cur] if w != prev]
        if not nxt or nxt[0] == start:
            break
        prev, cur = cur, nxt[0]
        order.append(cur)
    if len(order) != g.n:
        return None
    return ("path" if ends else "cycle"), order


def _normalize(m: np.ndarray, scale: float) -> tuple[np.ndarray, float]:
    top = float(m.max())
    if top == 0:
        return m, scale
    return m / top, scale + math.log(top)


def _log_matpow(t: np.ndarray, power: int) -> tuple[np.ndarray, float]:
    """``t**power`` as ``(M, s)`` with ``t**power = M * exp(s)``; entries of ``t`` nonnegative."""
    result, rs = np.eye(t.shape[0]), 0.0
    base, bs = _normalize(t.copy(), 0.0)
    while power:
        if power & 1:
            result, rs = _normalize(result @ base, rs + bs)
        power >>= 1
        if power:
            base, bs = _normalize(base @ base, 2 * bs)
    return result, rs


def _safe_log(x: float) -> float:
    return NEG_INF if x <= 0 else math.log(x)


def _transfer_log(kind: str, length: int, h: TargetGraph) -> float:
    alpha = np.array([float(a) for a in h.alpha])
    A = np.array([[float(v) for v in r] for r in h.A])
    if kind == "vertex":
        return math.log(alpha.sum())
    if kind == "cycle":
        m, s = _log_matpow(alpha[:, None] * A, length)
        return _safe_log(float(np.trace(m))) + s
    m, s = _log_matpow(A * alpha[None, :], length - 1)
    return _safe_log(float(alpha @ m @ np.ones(len(alpha)))) + s


def _frac_matmul(a, b):
    k = len(a)
    return [[sum(a[i][t] * b[t][j] for t in range(k)) for j in range(k)] for i in range(k)]


def _frac_matpow(t, power: int):
    k = len(t)
    result = [[Fraction(int(i == j)) for j in range(k)] for i in range(k)]
    base = [row[:] for row in t]
    while power:
        if power & 1:
            result = _frac_matmul(result, base)
        power >>= 1
        if power:
            base = _frac_matmul(base, base)
    return result


def _transfer_exact(kind: str, length: int, h: TargetGraph) -> Fraction:
    k = h.k
    alpha = [Fraction(a) for a in h.alpha]
    A = [[Fraction(v) for v in r] for r in h.A]
    if kind == "vertex":
        return sum(alpha)
    if kind == "cycle":
        m = _frac_matpow([[alpha[i] * A[i][j] for j in range(k)] for i in range(k)], length)
        return sum(m[i][i] for i in range(k))
    m = _frac_matpow([[A[i][j] * alpha[j] for j in range(k)] for i in range(k)], length - 1)
    return sum(alpha[i] * m[i][j] for i in range(k) for j in range(k))


# ---------------------------------------------------------------------------
# dispatch


def _component_value(c: Graph, h: TargetGraph, algorithm: str, budget: int, want_exact: bool):
    shape = _path_or_cycle(c)
    if algorithm == "transfer" or (algorithm == "components" and shape is not None):
        if shape is None:
            raise InfeasibleError("transfer matrices need a disjoint union of paths and cycles")
        kind, order = shape
        exact = _transfer_exact(kind, len(order), h) if want_exact else None
        return _transfer_log(kind, len(order), h), exact
    log_value = _brute_log(c, h, budget)
    exact = None
    if want_exact and h.k**c.n <= EXACT_BRUTE_LIMIT:
        exact = _brute_exact(c, h)
    return log_value, exact


def hom_count(g: Graph, h: TargetGraph, algorithm: str = "components",
              budget: int = ENUMERATION_BUDGET) -> LogPartition:
    """``log hom(g, h)``, summing ``prod alpha * prod A`` over all maps ``V(g) -> [k]``."""
    if algorithm not in ("brute", "transfer", "components"):
        raise ValueError(f"unknown algorithm {algorithm!r}")
    want_exact = h.rational
    if g.n == 0:
        return LogPartition(0.0, 0, True, Fraction(1), algorithm)
    if algorithm == "brute":
        log_value = _brute_log(g, h, budget)
        exact = _brute_exact(g, h) if want_exact and h.k**g.n <= EXACT_BRUTE_LIMIT else None
        return LogPartition(log_value, g.n, exact is not None, exact, algorithm)
    total, exact_total = 0.0, Fraction(1) if want_exact else None
    cache: dict = {}
    for comp in g.components():
        sig = _component_signature(g, comp)
        if sig not in cache:
            cache[sig] = _component_value(g.induced(comp), h, algorithm, budget, want_exact)
        lv, ex = cache[sig]
        total += lv
        if exact_total is not None:
            exact_total = None if ex is None else exact_total * ex
    if total == NEG_INF:
        exact_total = Fraction(0) if exact_total is not None else None
    return LogPartition(total, g.n, exact_total is not None, exact_total, algorithm)


def free_energy(g: Graph, h: TargetGraph, algorithm: str = "components",
                budget: int = ENUMERATION_BUDGET) -> float:
    """``-(1/|V|) log hom(g, h)``; ``+inf`` when there is no homomorphism."""
    lp = hom_count(g, h, algorithm, budget)
    return math.inf if lp.log_value == NEG_INF else -lp.per_vertex


def soften(h: TargetGraph, lam) -> TargetGraph:
    """Raise every edge weight to at least ``lam``."""
    if not lam > 0:
        raise ValueError("lambda must be positive")
    A = tuple(tuple(v if v >= lam else lam for v in r) for r in h.A)
    return TargetGraph(h.alpha, A, h.labels)


def random_soft_core_target(k: int, seed: int, rational: bool = True, denominator: int = 8) -> TargetGraph:
    """Seeded soft-core target with entries in ``[1/denominator, 2]``.

    Rational targets use multiples of ``1/denominator`` so exact counts stay
    available; otherwise entries are uniform floats on the same range.
    """
    if k < 1:
        raise ValueError("k must be positive")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, k, 7])))
    if rational:
        draw = lambda: Fraction(int(rng.integers(1, 2 * denominator + 1)), denominator)  # noqa: E731
    else:
        draw = lambda: float(rng.uniform(1 / denominator, 2.0))  # noqa: E731
    alpha = tuple(draw() for _ in range(k))
    A = [[None] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            A[i][j] = A[j][i] = draw()
    return TargetGraph(alpha, tuple(map(tuple, A)))


# ---------------------------------------------------------------------------
# lambda table


@dataclass
class LambdaTable:
    rows: list
    monotone: bool
    estimate: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "n", "lambda", "free_energy"])
        for r in self.rows:
            w.writerow([r["index"], r["n"], repr(r["lambda"]), repr(r["free_energy"])])
        return buf.getvalue()


def lambda_schedule(levels: int = 10) -> list[float]:
    return [2.0**-j for j in range(1, levels + 1)]


def lambda_limit(family, h: TargetGraph, schedule: Sequence[float] | None = None,
                 indices: Sequence[int] = (1,), budget: int = ENUMERATION_BUDGET) -> LambdaTable:
    """Free energies ``f(G_index, H_lambda)`` over a decreasing lambda schedule.

    ``family`` is a graph family or a single graph.  The table only records
    finite-n values; ``estimate`` is the entry at the smallest lambda and the
    largest index.
    """
    lams = sorted(schedule or lambda_schedule(), reverse=True)
    rows = []
    monotone = True
    for idx in indices:
        g = family if isinstance(family, Graph) else realize(family, idx)
        prev = -math.inf
        for lam in lams:
            f = free_energy(g, soften(h, lam), budget=budget)
            monotone &= f >= prev
            prev = f
            rows.append({"index": idx, "n": g.n, "lambda": lam, "free_energy": f})
    return LambdaTable(rows, monotone, rows[-1]["free_energy"])


# ---------------------------------------------------------------------------
# edge-deletion witness


@dataclass
class DeletionWitness:
    removed_edges: tuple
    log_hom_after: float
    epsilon: float
    lam: float
    f_hat: float
    r0: int
    feasible: bool
    reasons: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "removed_edges": [list(e) for e in self.removed_edges],
            "log_hom_after": "-inf" if self.log_hom_after == NEG_INF else self.log_hom_after,
            "epsilon": self.epsilon,
            "lambda": self.lam,
            "f_hat": self.f_hat,
            "r0": self.r0,
            "feasible": self.feasible,
            "reasons": self.reasons,
        }


def deletion_witness(g: Graph, h: TargetGraph, epsilon: float, lam: float = 0.01,
                     budget: int = ENUMERATION_BUDGET) -> DeletionWitness:
    """Small edge set ``E0`` whose removal lets the hard-core count reach the softened free energy.

    Colorings are grouped by the set ``E0(sigma)`` of edges mapped onto
    zero-weight pairs.  ``r0`` maximizes the ``H_lambda`` weight of colorings
    with ``|E0(sigma)| = r``; ``E0`` maximizes the weight of colorings with
    ``E0(sigma) = E0`` among sets of size ``r0`` (lexicographic tie-break).
    """
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    check_budget(g.n, h.k, budget)
    edges = g.edge_list
    m = len(edges)
    if m > 62:
        raise InfeasibleError("too many edges for bitmask grouping")
    hl = soften(h, lam)
    zero = np.array([[float(v) == 0.0 for v in r] for r in h.A])
    ea = g.edge_array
    bits = (np.int64(1) << np.arange(m, dtype=np.int64)) if m else np.zeros(0, dtype=np.int64)
    groups: dict = {}
    for block in coloring_chunks(g.n, h.k):
        w = coloring_log_weights(g, hl, block)
        if m:
            bad = zero[block[:, ea[:, 0]], block[:, ea[:, 1]]]
            masks = (bad * bits).sum(axis=1)
        else:
            masks = np.zeros(len(block), dtype=np.int64)
        uniq, inv = np.unique(masks, return_inverse=True)
        top = np.full(len(uniq), -np.inf)
        np.maximum.at(top, inv, w)
        sums = np.zeros(len(uniq))
        np.add.at(sums, inv, np.exp(w - top[inv]))
        for mask, t, s in zip(uniq.tolist(), top.tolist(), sums.tolist()):
            groups[mask] = _merge_lse(groups.get(mask, (NEG_INF, 0.0)), t, s)
    logw = {mask: t + math.log(s) for mask, (t, s) in groups.items()}
    by_r: dict = {}
    for mask, lw in logw.items():
        r = bin(mask).count("1")
        by_r[r] = _merge_lse(by_r.get(r, (NEG_INF, 0.0)), lw, 1.0)
    r0 = max(sorted(by_r), key=lambda r: by_r[r][0] + math.log(by_r[r][1]))

    def edge_set(mask):
        return tuple(edges[i] for i in range(m) if mask >> i & 1)

    cands = [mask for mask in logw if bin(mask).count("1") == r0]
    best_w = max(logw[mk] for mk in cands)
    ties = [mk for mk in cands if logw[mk] >= best_w - 1e-12 * max(1.0, abs(best_w))]
    e0 = min((edge_set(mk) for mk in ties))
    f_hat = free_energy(g, hl, budget=budget)
    after = hom_count(g.remove_edges(e0), h, budget=budget).log_value
    reasons = []
    if len(e0) > epsilon * g.n:
        reasons.append(f"|E0| = {len(e0)} exceeds epsilon*|V| = {epsilon * g.n}")
    if after < -(f_hat + epsilon) * g.n:
        reasons.append("log hom after deletion below -(f_hat + epsilon)|V|")
    return DeletionWitness(e0, after, epsilon, lam, f_hat, r0, not reasons, reasons)


# ---------------------------------------------------------------------------
# MaxCut


def maxcut_exact(g: Graph, limit: int = 24) -> int:
    """Largest cut by enumerating all bipartitions with vertex 0 fixed on one side."""
    if g.n > limit:
        raise InfeasibleError(f"exact MaxCut limited to {limit} vertices")
    if g.n <= 1 or not g.edges:
        return 0
    ea = g.edge_array
    best = 0
    for block in coloring_chunks(g.n - 1, 2):
        side = np.concatenate([np.zeros((len(block), 1), dtype=np.int64), block], axis=1)
        best = max(best, int((side[:, ea[:, 0]] != side[:, ea[:, 1]]).sum(axis=1).max()))
    return best


@dataclass
class MaxCutReport:
    rows: list
    exact: int | None

    @property
    def bracketed(self) -> bool:
        return self.exact is None or all(r["lower"] <= self.exact <= r["upper"] for r in self.rows)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["beta", "log_hom", "lower", "upper", "exact"])
        for r in self.rows:
            w.writerow([repr(r["beta"]), repr(r["log_hom"]), repr(r["lower"]), repr(r["upper"]),
                        "" if self.exact is None else self.exact])
        return buf.getvalue()


def maxcut_from_beta(g: Graph, betas: Sequence[float], budget: int = ENUMERATION_BUDGET,
                     exact_limit: int = 20) -> MaxCutReport:
    """``e^{beta MaxCut} <= hom(g, H_beta) <= 2^n e^{beta MaxCut}`` turned into bounds on MaxCut."""
    rows = []
    for beta in betas:
        if not beta > 0:
            raise ValueError("beta must be positive")
        lz = hom_count(g, ising_target(beta), budget=budget).log_value
        rows.append({"beta": beta, "log_hom": lz, "lower": (lz - g.n * math.log(2)) / beta, "upper": lz / beta})
    exact = maxcut_exact(g) if g.n <= exact_limit else None
    return MaxCutReport(rows, exact)


# ---------------------------------------------------------------------------
# homomorphism densities


def _hom_connected(f: Graph, g: Graph) -> int:
    order = [0]
    seen = {0}
    for v in order:
        for w in f.adjacency[v]:
            if w not in seen:
                seen.add(w)
                order.append(w)
    pos = {v: i for i, v in enumerate(order)}
    back = [[w for w in f.adjacency[v] if pos[w] < pos[v]] for v in order]
    gadj = [set(a) for a in g.adjacency]
    image = [0] * f.n

    def extend(i: int) -> int:
        if i == len(order):
            return 1
        v = order[i]
        earlier = back[i]
        total = 0
        for cand in gadj[image[earlier[0]]]:
            if all(cand in gadj[image[w]] for w in earlier[1:]):
                image[v] = cand
                total += extend(i + 1)
        return total

    total = 0
    for root in range(g.n):
        image[order[0]] = root
        total += extend(1)
    return total


def hom_number(f: Graph, g: Graph) -> int:
    """Number of homomorphisms ``f -> g``: rooted backtracking per component of ``f``, multiplied."""
    total = 1
    for comp in f.components():
        total *= _hom_connected(f.induced(comp), g)
        if not total:
            break
    return total


def hom_density_from(f: Graph, g: Graph) -> Fraction:
    """``hom(F, G) / |V(G)|`` as an exact rational."""
    if g.n == 0:
        raise ValueError("target graph has no vertices")
    return Fraction(hom_number(f, g), g.n)
