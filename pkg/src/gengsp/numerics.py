"""Dense linear algebra and quadrature shared by the rest of the package."""
import functools
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotSymmetric, UsageError

RANK_RTOL = 1e-9
SIGN_TOL = 1e-9


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights for integrating against a measure on ``domain``."""

    nodes: np.ndarray
    weights: np.ndarray
    domain: tuple

    def integrate(self, values):
        return np.asarray(values) @ self.weights


@dataclass(frozen=True)
class LstsqResult:
    x: np.ndarray
    rank: int
    rank_deficient: bool
    residual_norm: float


def _finite(m, name="matrix"):
    m = np.asarray(m)
    if not np.all(np.isfinite(m)):
        raise UsageError(f"{name} has non-finite entries")
    return m


def fix_signs(vectors, tol=SIGN_TOL):
    """Rotate each column so its last component with modulus > tol is real-positive."""
    v = np.array(vectors, copy=True)
    for j in range(v.shape[1]):
        big = np.nonzero(np.abs(v[:, j]) > tol)[0]
        if big.size:
            pivot = v[big[-1], j]
            v[:, j] *= np.conj(pivot) / abs(pivot)
    if np.iscomplexobj(v) and np.all(np.abs(v.imag) <= tol * 1e-3):
        v = v.real
    return v


def sym_eig(m, sym_tol=1e-10):
    """Eigen-decomposition of a real symmetric matrix.

    Returns ascending eigenvalues and orthonormal eigenvectors as columns, with
    the deterministic sign rule of :func:`fix_signs`.
    """
    m = _finite(np.asarray(m, dtype=float))
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {m.shape}")
    scale = max(np.abs(m).max(initial=0.0), 1.0)
    if np.abs(m - m.T).max(initial=0.0) > sym_tol * scale:
        raise NotSymmetric("matrix is not symmetric within tolerance")
    vals, vecs = np.linalg.eigh(0.5 * (m + m.T))
    return vals, fix_signs(vecs)


def singular_values(m):
    m = _finite(m)
    if m.size == 0:
        return np.zeros(0)
    return np.linalg.svd(m, compute_uv=False)


def numeric_rank(m, rel_tol=RANK_RTOL):
    """Count singular values above ``rel_tol * sigma_max``."""
    if not 0.0 < rel_tol < 1.0:
        raise UsageError("rel_tol must lie in (0, 1)")
    s = singular_values(np.atleast_2d(m))
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rel_tol * s[0]))


def lstsq(m, b, rel_tol=RANK_RTOL):
    """Least-squares solve via SVD; minimum-norm solution when rank deficient."""
    m = _finite(np.atleast_2d(m))
    b = _finite(np.asarray(b), "right-hand side")
    if m.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"matrix has {m.shape[0]} rows, rhs has {b.shape[0]}")
    x, _, rank, _ = np.linalg.lstsq(m, b, rcond=rel_tol)
    resid = float(np.linalg.norm(m @ x - b))
    return LstsqResult(x=x, rank=int(rank), rank_deficient=int(rank) < m.shape[1],
                       residual_norm=resid)


@functools.lru_cache(maxsize=64)
def _leggauss(order):
    t, w = np.polynomial.legendre.leggauss(order)
    t.flags.writeable = False
    w.flags.writeable = False
    return t, w


def gauss_quadrature(order, domain=(-1.0, 1.0)):
    """Gauss-Legendre rule with ``order`` nodes mapped onto ``domain``."""
    if order < 1:
        raise UsageError("quadrature order must be >= 1")
    a, b = float(domain[0]), float(domain[1])
    if not b > a:
        raise UsageError("empty quadrature domain")
    t, w = _leggauss(int(order))
    half = 0.5 * (b - a)
    return QuadratureRule(nodes=a + half * (t + 1.0), weights=half * w, domain=(a, b))


def composite_gauss(order, domain, breakpoints=()):
    """Gauss-Legendre on each piece of ``domain`` cut at ``breakpoints``."""
    a, b = float(domain[0]), float(domain[1])
    cuts = sorted({a, b, *(float(p) for p in breakpoints if a < p < b)})
    nodes, weights = [], []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        r = gauss_quadrature(order, (lo, hi))
        nodes.append(r.nodes)
        weights.append(r.weights)
    return QuadratureRule(np.concatenate(nodes), np.concatenate(weights), (a, b))
