"""Weighted undirected graphs, shift operators and row-selection combinatorics."""
import csv
import itertools
import warnings
from dataclasses import dataclass, field
from math import comb

import numpy as np

from . import numerics
from .errors import DependentColumns, InfeasiblePartition, UsageError

EXACT_DELTA_MAX_N = 24
REPEAT_TOL = 1e-8
SHIFT_KINDS = ("adjacency", "laplacian")


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices ``0..n-1``.

    ``edges`` holds ``(u, v, w)`` with ``u < v``; duplicates and self-loops are
    rejected at construction.
    """

    n: int
    edges: tuple = ()

    def __post_init__(self):
        if self.n < 0:
            raise UsageError("vertex count must be non-negative")
        seen = set()
        clean = []
        for u, v, w in self.edges:
            u, v, w = int(u), int(v), float(w)
            if u == v:
                raise UsageError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise UsageError(f"edge ({u}, {v}) outside vertex range 0..{self.n - 1}")
            if not np.isfinite(w):
                raise UsageError(f"non-finite weight on edge ({u}, {v})")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise UsageError(f"duplicate edge {key}")
            seen.add(key)
            clean.append((key[0], key[1], w))
        object.__setattr__(self, "edges", tuple(sorted(clean)))

    @property
    def num_edges(self):
        return len(self.edges)

    def adjacency(self):
        a = np.zeros((self.n, self.n))
        for u, v, w in self.edges:
            a[u, v] = a[v, u] = w
        return a

    def laplacian(self):
        a = self.adjacency()
        return np.diag(a.sum(axis=1)) - a

    def neighbors(self):
        nb = [[] for _ in range(self.n)]
        for u, v, _ in self.edges:
            nb[u].append(v)
            nb[v].append(u)
        return nb

    def is_connected(self):
        if self.n <= 1:
            return True
        nb = self.neighbors()
        seen = {0}
        stack = [0]
        while stack:
            for v in nb[stack.pop()]:
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return len(seen) == self.n


@dataclass(frozen=True)
class ShiftOperator:
    kind: str
    matrix: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    warnings: tuple = field(default=())

    @property
    def n(self):
        return self.matrix.shape[0]

    def has_simple_spectrum(self):
        return not self.warnings


def build_shift(g, kind="laplacian"):
    if kind not in SHIFT_KINDS:
        raise UsageError(f"unknown shift kind {kind!r}; expected one of {SHIFT_KINDS}")
    if g.n < 1:
        raise UsageError("graph has no vertices")
    m = g.adjacency() if kind == "adjacency" else g.laplacian()
    vals, vecs = numerics.sym_eig(m)
    notes = ()
    gaps = np.diff(vals)
    if gaps.size and gaps.min() < REPEAT_TOL:
        notes = (f"repeated eigenvalue(s) within {REPEAT_TOL:g}: "
                 f"minimum gap {gaps.min():.3e}",)
        warnings.warn(notes[0], RuntimeWarning, stacklevel=2)
    for arr in (m, vals, vecs):
        arr.setflags(write=False)
    return ShiftOperator(kind, m, vals, vecs, notes)


def product_graph(g, g2):
    """Cartesian product; vertex (v, u) gets id ``v * g2.n + u``."""
    if g.n < 1 or g2.n < 1:
        raise UsageError("product of an empty graph")
    n2 = g2.n
    edges = []
    for v in range(g.n):
        for a, b, w in g2.edges:
            edges.append((v * n2 + a, v * n2 + b, w))
    for a, b, w in g.edges:
        for u in range(n2):
            edges.append((a * n2 + u, b * n2 + u, w))
    return Graph(g.n * n2, tuple(edges))


def standard_graph(topology, n):
    """Unit-weight path, cycle, complete or empty graph."""
    if topology == "path":
        edges = [(i, i + 1, 1.0) for i in range(n - 1)]
    elif topology == "cycle":
        if n < 3:
            raise UsageError("a cycle needs at least 3 vertices")
        edges = [(i, (i + 1) % n, 1.0) for i in range(n)]
    elif topology == "complete":
        edges = [(i, j, 1.0) for i, j in itertools.combinations(range(n), 2)]
    elif topology == "empty":
        edges = []
    else:
        raise UsageError(f"unknown topology {topology!r}")
    return Graph(n, tuple(edges))


def random_weighted_graph(n, topology="complete", seed=None, p=None):
    """Graph with i.i.d. uniform(0, 1] weights; ``topology`` may be ``"er"``
    (with edge probability ``p``) or any :func:`standard_graph` topology."""
    if n < 1:
        raise UsageError("n must be >= 1")
    rng = np.random.default_rng(seed)
    if topology == "er":
        if p is None or not 0.0 <= p <= 1.0:
            raise UsageError("er topology needs p in [0, 1]")
        pairs = [pr for pr in itertools.combinations(range(n), 2) if rng.random() < p]
    else:
        pairs = [(u, v) for u, v, _ in standard_graph(topology, n).edges]
    weights = 1.0 - rng.random(len(pairs))
    return Graph(n, tuple((u, v, w) for (u, v), w in zip(pairs, weights)))


def read_edge_csv(path, n=None):
    """Load an edge list with header ``u,v,w``.  ``n`` defaults to max id + 1."""
    edges = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [h.strip() for h in reader.fieldnames] != ["u", "v", "w"]:
            raise UsageError(f"{path}: expected header u,v,w")
        for lineno, row in enumerate(reader, start=2):
            try:
                edges.append((int(row["u"]), int(row["v"]), float(row["w"])))
            except (TypeError, ValueError) as exc:
                raise UsageError(f"{path}:{lineno}: bad edge row {row}") from exc
    if n is None:
        n = 1 + max((max(u, v) for u, v, _ in edges), default=-1)
    return Graph(n, tuple(edges))


def write_edge_csv(g, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["u", "v", "w"])
        for u, v, wt in g.edges:
            w.writerow([u, v, f"{wt:.17g}"])


# ----------------------------------------------------------- row selection

def _check_columns(phi, rel_tol):
    phi = np.atleast_2d(np.asarray(phi))
    if phi.ndim != 2:
        raise UsageError("expected an n x k matrix of column vectors")
    n, k = phi.shape
    if k > n:
        raise DependentColumns(f"{k} vectors in C^{n} cannot be independent")
    if numerics.numeric_rank(phi, rel_tol) < k:
        raise DependentColumns("columns are linearly dependent")
    return phi


def select_vertex_subset(phi, rel_tol=numerics.RANK_RTOL):
    """Pick ``k`` rows of ``phi`` forming an invertible ``k x k`` minor.

    Greedy pivoting: repeatedly take the row with the largest component
    orthogonal to the rows already chosen (ties go to the lower index).
    """
    phi = _check_columns(phi, rel_tol)
    k = phi.shape[1]
    resid = np.array(phi, dtype=complex)
    chosen = []
    for _ in range(k):
        norms = np.linalg.norm(resid, axis=1)
        norms[chosen] = -1.0
        r = int(np.argmax(norms))
        chosen.append(r)
        q = resid[r] / np.linalg.norm(resid[r])
        resid = resid - np.outer(resid @ q.conj(), q)
    return sorted(chosen)


def _full_rank(phi, rows, k, rel_tol):
    return numerics.numeric_rank(phi[list(rows)], rel_tol) == k


def _greedy_packing(phi, k, rel_tol):
    """Disjoint row bases found greedily (a lower bound on delta)."""
    remaining = list(range(phi.shape[0]))
    blocks = []
    while len(remaining) >= k:
        sub = phi[remaining]
        if numerics.numeric_rank(sub, rel_tol) < k:
            break
        pick = [remaining[i] for i in select_vertex_subset(sub, rel_tol)]
        blocks.append(sorted(pick))
        remaining = [r for r in remaining if r not in pick]
    return blocks


def _search_packing(phi, k, t, rel_tol):
    """Depth-first search for ``t`` disjoint k-row bases; None if impossible."""
    n = phi.shape[0]

    def extend(blocks, free):
        if len(blocks) == t:
            return blocks
        need = k * (t - len(blocks))
        if len(free) < need or numerics.numeric_rank(phi[free], rel_tol) < k:
            return None
        min_start = blocks[-1][0] + 1 if blocks else 0
        for first_pos, first in enumerate(free):
            if first < min_start:
                continue
            if len(free) - first_pos < k:
                break
            rest = free[first_pos + 1:]
            for others in itertools.combinations(rest, k - 1):
                block = (first, *others)
                if not _full_rank(phi, block, k, rel_tol):
                    continue
                out = extend(blocks + [block], [r for r in free if r not in block])
                if out is not None:
                    return out
        return None

    return extend([], list(range(n)))


@dataclass(frozen=True)
class DeltaResult:
    value: int
    exact: bool
    blocks: tuple


def delta(phi, rel_tol=numerics.RANK_RTOL, exact_max_n=EXACT_DELTA_MAX_N):
    """Largest ``t`` such that the rows split into ``t`` blocks, each of full
    column rank.  Exact for ``n <= exact_max_n`` (or whenever the greedy bound
    already meets ``floor(n/k)``); otherwise a greedy lower bound."""
    phi = _check_columns(phi, rel_tol)
    n, k = phi.shape
    if k == 0:
        raise UsageError("need at least one vector")
    upper = n // k
    blocks = _greedy_packing(phi, k, rel_tol)
    if len(blocks) == upper:
        return DeltaResult(upper, True, tuple(tuple(b) for b in blocks))
    if n > exact_max_n:
        return DeltaResult(len(blocks), False, tuple(tuple(b) for b in blocks))
    for t in range(upper, len(blocks), -1):
        found = _search_packing(phi, k, t, rel_tol)
        if found is not None:
            return DeltaResult(t, True, tuple(tuple(b) for b in found))
    return DeltaResult(len(blocks), True, tuple(tuple(b) for b in blocks))


def partition_vertices(phi, t, rel_tol=numerics.RANK_RTOL):
    """Split ``0..n-1`` into ``t`` disjoint blocks whose row restrictions all
    have full column rank.  Vertices not needed by any basis are appended to
    the smallest block."""
    phi = _check_columns(phi, rel_tol)
    n, k = phi.shape
    if t < 1:
        raise UsageError("t must be >= 1")
    if t == 1:
        return [list(range(n))]
    if t > n // k:
        raise InfeasiblePartition(f"t={t} exceeds floor(n/k)={n // k}")
    blocks = _greedy_packing(phi, k, rel_tol)
    if len(blocks) >= t:
        blocks = blocks[:t]
    else:
        if n > EXACT_DELTA_MAX_N and comb(n, k) > 10**6:
            raise InfeasiblePartition(f"greedy packing found {len(blocks)} < {t} blocks")
        found = _search_packing(phi, k, t, rel_tol)
        if found is None:
            raise InfeasiblePartition(f"no partition into {t} full-rank blocks")
        blocks = found
    blocks = [sorted(b) for b in blocks]
    used = {v for b in blocks for v in b}
    for v in range(n):
        if v not in used:
            min(blocks, key=len).append(v)
    return [sorted(b) for b in blocks]
