"""Sample sets W in V x Omega, the determination test and recovery."""
import csv
from dataclasses import dataclass

import numpy as np
from scipy import stats

from . import numerics
from .errors import DimensionMismatch, OutOfDomain, PlanFailed, UsageError
from .graph import partition_vertices, select_vertex_subset
from .signal import _fmt, _rows

MAX_REDRAWS = 10
# Random plans cluster points; 1e-9 would call 3-12% of generic draws singular.
SAMPLING_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class SampleSet:
    """Sample points ``(vertices[l], xs[l])``; points must be distinct."""

    vertices: np.ndarray
    xs: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vertices, dtype=int).ravel()
        x = np.asarray(self.xs, dtype=float).ravel()
        if v.shape != x.shape:
            raise DimensionMismatch("vertices and xs differ in length")
        if not np.all(np.isfinite(x)):
            raise OutOfDomain("sample positions must be finite")
        if len(set(zip(v.tolist(), x.tolist()))) != v.size:
            raise UsageError("sample points must be distinct")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "xs", x)

    def __len__(self):
        return self.vertices.size

    def k_v(self, n):
        """Number of samples at each of the ``n`` vertices."""
        return np.bincount(self.vertices, minlength=n)

    def check(self, shift, basis):
        if np.any(self.vertices < 0) or np.any(self.vertices >= shift.n):
            raise OutOfDomain("sample vertex outside the graph")
        basis.check_points(self.xs)
        return self


@dataclass(frozen=True)
class SubspaceSpec:
    """Band Phi' x Xi' given as positions into the eigenvector and basis orders."""

    phi_indices: tuple
    xi_indices: tuple

    def __post_init__(self):
        phi = tuple(int(i) for i in self.phi_indices)
        xi = tuple(int(i) for i in self.xi_indices)
        if not phi or not xi:
            raise UsageError("subspace needs at least one Phi and one Xi index")
        if len(set(phi)) != len(phi) or len(set(xi)) != len(xi):
            raise UsageError("subspace indices must be distinct")
        object.__setattr__(self, "phi_indices", phi)
        object.__setattr__(self, "xi_indices", xi)

    @property
    def dim(self):
        return len(self.phi_indices) * len(self.xi_indices)

    def check(self, shift, basis):
        if max(self.phi_indices) >= shift.n or min(self.phi_indices) < 0:
            raise DimensionMismatch("Phi index outside the graph spectrum")
        if max(self.xi_indices) >= basis.size or min(self.xi_indices) < 0:
            raise DimensionMismatch("Xi index outside the truncated basis")
        return self

    def scatter(self, sub, n, M):
        """Place band coefficients (|Phi'| x |Xi'|) into a full ``n x M`` grid."""
        full = np.zeros((n, M), dtype=complex)
        full[np.ix_(self.phi_indices, self.xi_indices)] = np.asarray(sub).reshape(
            len(self.phi_indices), len(self.xi_indices))
        return full

    def gather(self, grid):
        return np.asarray(grid)[np.ix_(self.phi_indices, self.xi_indices)]


def lowest(basis, count):
    """Positions of the ``count`` elements with the smallest |freq_label|."""
    if not 1 <= count <= basis.size:
        raise UsageError(f"band size {count} outside 1..{basis.size}")
    order = np.argsort(np.abs(basis.freq_labels), kind="stable")
    return tuple(sorted(int(p) for p in order[:count]))


def sampling_matrix(w, spec, shift, basis):
    """Entry (l, (i, m)) = phi_i(v_l) xi_m(x_l), columns in grid order."""
    spec.check(shift, basis)
    w.check(shift, basis)
    phi = shift.eigenvectors[np.ix_(w.vertices, spec.phi_indices)]
    xi = basis.eval_matrix(w.xs, spec.xi_indices)
    return (phi[:, :, None] * xi[:, None, :]).reshape(len(w), spec.dim)


def determines(w, spec, shift, basis, rel_tol=SAMPLING_RTOL):
    if len(w) < spec.dim:
        return False
    return numerics.numeric_rank(sampling_matrix(w, spec, shift, basis), rel_tol) == spec.dim


# -------------------------------------------------------------------- plans

def interior_points(basis, count):
    """``count`` deterministic points of Omega: equispaced interior points for
    continuous domains, pivoted rows of the Xi' evaluation for discrete ones."""
    lo, hi = basis.domain
    if basis.discrete:
        raise UsageError("use discrete_points for graph_basis domains")
    return lo + (hi - lo) * np.arange(1, count + 1) / (count + 1)


def _omega_points(basis, spec):
    k = len(spec.xi_indices)
    if basis.discrete:
        ev = basis.eval_matrix(np.arange(basis.shift.n), spec.xi_indices)
        return np.array(select_vertex_subset(ev), dtype=float)
    return interior_points(basis, k)


@dataclass(frozen=True)
class Strategy:
    """``name`` in {vertex_subset, distributed, random_async}.

    ``distribution`` is ``uniform`` or ``truncnorm`` (with ``mu``, ``sigma``);
    ``counts`` gives k_v per vertex for random_async.
    """

    name: str
    t: int = 1
    distribution: str = "uniform"
    mu: float = 0.0
    sigma: float = 1.0
    counts: tuple = None
    seed: int = None


def plan_samples(spec, shift, basis, strategy, rel_tol=SAMPLING_RTOL):
    """Vertex selection and partitioning use the structural tolerance
    (``numerics.RANK_RTOL``); ``rel_tol`` applies to the determines check."""
    spec.check(shift, basis)
    phi = shift.eigenvectors[:, list(spec.phi_indices)]
    if strategy.name == "vertex_subset":
        verts = select_vertex_subset(phi)
        pts = _omega_points(basis, spec)
        return SampleSet(np.repeat(verts, pts.size), np.tile(pts, len(verts)))
    if strategy.name == "distributed":
        blocks = partition_vertices(phi, strategy.t)
        pts = _omega_points(basis, spec)
        chunks = np.array_split(pts, strategy.t)
        vs, xs = [], []
        for block, chunk in zip(blocks, chunks):
            for v in block:
                vs.extend([v] * chunk.size)
                xs.extend(chunk.tolist())
        return SampleSet(np.array(vs, dtype=int), np.array(xs))
    if strategy.name == "random_async":
        rng = np.random.default_rng(strategy.seed)
        counts = _check_counts(strategy.counts, shift.n)
        for _ in range(MAX_REDRAWS):
            w = _draw(basis, counts, strategy, rng)
            if determines(w, spec, shift, basis, rel_tol):
                return w
        raise PlanFailed(f"no determining random plan after {MAX_REDRAWS} draws")
    raise UsageError(f"unknown strategy {strategy.name!r}")


def _check_counts(counts, n):
    if counts is None:
        raise UsageError("random_async needs per-vertex counts")
    counts = np.asarray(counts, dtype=int)
    if counts.shape != (n,) or np.any(counts < 0):
        raise DimensionMismatch(f"need {n} non-negative per-vertex counts")
    return counts


def draw_positions(basis, size, strategy, rng):
    lo, hi = basis.domain
    if basis.discrete:
        if strategy.distribution != "uniform":
            raise UsageError("discrete domains only support uniform draws")
        return rng.choice(np.arange(lo, hi + 1), size=size, replace=False).astype(float)
    if strategy.distribution == "uniform":
        return rng.uniform(lo, hi, size)
    if strategy.distribution == "truncnorm":
        a = (lo - strategy.mu) / strategy.sigma
        b = (hi - strategy.mu) / strategy.sigma
        return stats.truncnorm.rvs(a, b, loc=strategy.mu, scale=strategy.sigma,
                                   size=size, random_state=rng)
    raise UsageError(f"unknown distribution {strategy.distribution!r}")


def _draw(basis, counts, strategy, rng):
    vs, xs = [], []
    for v, k in enumerate(counts):
        if k:
            vs.append(np.full(k, v))
            xs.append(draw_positions(basis, int(k), strategy, rng))
    if not vs:
        return SampleSet(np.zeros(0, dtype=int), np.zeros(0))
    return SampleSet(np.concatenate(vs), np.concatenate(xs))


def randomize_positions(w, basis, strategy, seed=None):
    """Keep the vertex multiset of ``w`` and redraw every x."""
    rng = np.random.default_rng(seed)
    counts = w.k_v(int(w.vertices.max(initial=-1)) + 1)
    return _draw(basis, counts, strategy, rng)


# ----------------------------------------------------------------- recovery

@dataclass(frozen=True, eq=False)
class Recovery:
    coeffs: np.ndarray          # full n x M grid
    band: np.ndarray            # |Phi'| x |Xi'|
    residual_norm: float
    rank: int
    rank_deficient: bool


def recover(w, values, spec, shift, basis, rel_tol=SAMPLING_RTOL):
    values = np.asarray(values, dtype=complex).ravel()
    if values.size != len(w):
        raise DimensionMismatch(f"{values.size} values for {len(w)} samples")
    if len(w) == 0:
        z = np.zeros((len(spec.phi_indices), len(spec.xi_indices)), dtype=complex)
        return Recovery(spec.scatter(z, shift.n, basis.size), z, 0.0, 0, True)
    m = sampling_matrix(w, spec, shift, basis)
    res = numerics.lstsq(m, values, rel_tol)
    band = res.x.reshape(len(spec.phi_indices), len(spec.xi_indices))
    return Recovery(spec.scatter(band, shift.n, basis.size), band,
                    float(res.residual_norm), res.rank, res.rank_deficient)


# ---------------------------------------------------------------------- I/O

def write_plan_csv(w, path):
    with open(path, "w", newline="") as fh:
        out = csv.writer(fh, lineterminator="\n")
        out.writerow(["vertex", "x"])
        for v, x in zip(w.vertices, w.xs):
            out.writerow([int(v), _fmt(float(x))])


def read_plan_csv(path):
    vs, xs = [], []
    for lineno, row in _rows(path, ["vertex", "x"]):
        try:
            vs.append(int(row[0]))
            xs.append(float(row[1]))
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: malformed row") from exc
    return SampleSet(np.array(vs, dtype=int), np.array(xs))
