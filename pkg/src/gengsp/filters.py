"""Filters acting on coefficient grids.

Polynomial, convolution and band-pass filters are diagonal on the
Phi (x) Xi grid; tensor, adaptive and truncated filters are not.  Every filter
exposes ``grid_apply(coeffs, shift, basis)`` plus ``apply(signal)``, and
``matrix(shift, basis)`` materialises its action on the truncated grid.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import (ContextMismatch, CutoffOutOfRange, DimensionMismatch,
                     NotRepresentable, UnboundedFreqLabel, UsageError)
from .signal import GeneralizedSignal, same_context

MATCH_TOL = 1e-9


def poly_eval(coeffs, x):
    """sum_j coeffs[j] x**j for scalar or array x (matrices: use poly_matrix)."""
    out = np.zeros_like(np.asarray(x, dtype=complex))
    for a in reversed(coeffs):
        out = out * x + a
    return out


def poly_matrix(coeffs, m):
    m = np.asarray(m)
    out = np.zeros(m.shape, dtype=np.result_type(m, complex))
    eye = np.eye(m.shape[0])
    for a in reversed(coeffs):
        out = out @ m + a * eye
    return out


class Filter:
    """Base class; subclasses implement :meth:`grid_apply`."""

    def grid_apply(self, coeffs, shift, basis):
        raise NotImplementedError

    def apply(self, f):
        if not isinstance(f, GeneralizedSignal):
            raise UsageError("apply expects a GeneralizedSignal")
        return GeneralizedSignal(f.shift, f.basis, self.grid_apply(f.coeffs, f.shift, f.basis))

    def matrix(self, shift, basis):
        """Matrix of the filter on the flattened grid (index ``i * M + m``)."""
        n, M = shift.n, basis.size
        eye = np.eye(n * M, dtype=complex)
        cols = [self.grid_apply(eye[j].reshape(n, M), shift, basis).ravel() for j in range(n * M)]
        return np.array(cols).T


class DiagonalFilter(Filter):
    """Filters acting by pointwise multiplication of the grid."""

    def multiplier(self, shift, basis):
        raise NotImplementedError

    def grid_apply(self, coeffs, shift, basis):
        return self.multiplier(shift, basis) * coeffs

    def matrix(self, shift, basis):
        return np.diag(self.multiplier(shift, basis).ravel())


@dataclass(frozen=True)
class PolynomialFilter(DiagonalFilter):
    """P(A_G (x) A): grid entry (i, m) scaled by P(lambda_phi_i * lambda_xi_m)."""

    coeffs: tuple

    def multiplier(self, shift, basis):
        lam_xi = basis.op_eigenvalues
        if not np.all(np.isfinite(lam_xi)):
            bad = basis.labels[~np.isfinite(lam_xi)]
            raise UnboundedFreqLabel(
                f"basis elements {bad.tolist()} have freq_label 0; A is not injective there")
        return poly_eval(self.coeffs, np.outer(shift.eigenvalues, lam_xi))


@dataclass(frozen=True, eq=False)
class ConvolutionFilter(DiagonalFilter):
    """g * f: entrywise product with the coefficient grid of ``g``."""

    kernel: np.ndarray

    def multiplier(self, shift, basis):
        g = self.kernel
        if isinstance(g, GeneralizedSignal):
            if not same_context(g.shift, g.basis, shift, basis):
                raise ContextMismatch("convolution kernel built on another (shift, basis)")
            g = g.coeffs
        g = np.asarray(g, dtype=complex)
        if g.shape != (shift.n, basis.size):
            raise DimensionMismatch(f"kernel grid {g.shape} != {(shift.n, basis.size)}")
        return g


@dataclass(frozen=True)
class BandPassFilter(DiagonalFilter):
    """Projection onto frequency pairs inside closed rectangles
    ``(g_lo, g_hi, h_lo, h_hi)`` or equal (within 1e-9) to listed points."""

    rectangles: tuple = ()
    points: tuple = ()

    def contains(self, graph_freq, hilbert_freq):
        g = np.asarray(graph_freq, dtype=float)
        h = np.asarray(hilbert_freq, dtype=float)
        keep = np.zeros(np.broadcast(g, h).shape, dtype=bool)
        for g_lo, g_hi, h_lo, h_hi in self.rectangles:
            keep |= ((g >= g_lo - MATCH_TOL) & (g <= g_hi + MATCH_TOL)
                     & (h >= h_lo - MATCH_TOL) & (h <= h_hi + MATCH_TOL))
        for pg, ph in self.points:
            keep |= (np.abs(g - pg) <= MATCH_TOL) & (np.abs(h - ph) <= MATCH_TOL)
        return keep

    def multiplier(self, shift, basis):
        g, h = np.meshgrid(shift.eigenvalues, basis.freq_labels, indexing="ij")
        return self.contains(g, h).astype(complex)


@dataclass(frozen=True, eq=False)
class TensorFilter(Filter):
    """B_G (x) B_H with B_G acting on vertex values (n x n) and B_H on
    Xi-coefficients (M x M matrix, or a length-M diagonal)."""

    graph_op: np.ndarray
    hilbert_op: np.ndarray

    def grid_apply(self, coeffs, shift, basis):
        phi = shift.eigenvectors
        bg = np.asarray(self.graph_op)
        bh = np.asarray(self.hilbert_op)
        if bg.shape != (shift.n, shift.n):
            raise DimensionMismatch(f"graph operator {bg.shape} != {(shift.n, shift.n)}")
        out = phi.conj().T @ bg @ phi @ coeffs
        if bh.ndim == 1:
            if bh.shape[0] != basis.size:
                raise DimensionMismatch("Hilbert diagonal has the wrong length")
            return out * bh[None, :]
        if bh.shape != (basis.size, basis.size):
            raise DimensionMismatch(f"Hilbert operator {bh.shape} != {(basis.size,) * 2}")
        return out @ bh.T


@dataclass(frozen=True, eq=False)
class AdaptiveFilter(Filter):
    """sum_u P1(M)_u (x) P2(A_u), where P1(M)_u keeps only column u of P1(M).

    Acting on vertex values f(u) in C^m: out(v) = sum_u P1(M)[v, u] P2(A_u) f(u).
    """

    p1: tuple
    mixing: np.ndarray
    local_ops: tuple
    p2: tuple

    def __post_init__(self):
        mix = np.asarray(self.mixing)
        ops = [np.asarray(a) for a in self.local_ops]
        if mix.ndim != 2 or mix.shape[0] != mix.shape[1] or len(ops) != mix.shape[0]:
            raise DimensionMismatch("need an n x n mixing matrix and n local operators")
        m = ops[0].shape[0]
        if any(a.shape != (m, m) for a in ops):
            raise DimensionMismatch("local operators must all be m x m")
        object.__setattr__(self, "local_ops", tuple(ops))

    @property
    def m(self):
        return self.local_ops[0].shape[0]

    def apply_values(self, values):
        """Act on an ``n x m`` array of vertex values."""
        values = np.asarray(values)
        if values.shape != (len(self.local_ops), self.m):
            raise DimensionMismatch(f"values {values.shape} != {(len(self.local_ops), self.m)}")
        mix = poly_matrix(self.p1, self.mixing)
        local = np.array([poly_matrix(self.p2, a) @ values[u] for u, a in enumerate(self.local_ops)])
        return mix @ local

    def as_matrix(self):
        """Dense (n m) x (n m) matrix in vertex-major value coordinates."""
        mix = poly_matrix(self.p1, self.mixing)
        n = mix.shape[0]
        out = np.zeros((n * self.m, n * self.m), dtype=complex)
        for u, a in enumerate(self.local_ops):
            col = np.zeros_like(mix)
            col[:, u] = mix[:, u]
            out += np.kron(col, poly_matrix(self.p2, a))
        return out

    def grid_apply(self, coeffs, shift, basis):
        if not basis.discrete or basis.size != self.m or basis.shift.n != self.m:
            raise NotRepresentable("adaptive filters need a complete graph_basis with H = C^m")
        if shift.n != len(self.local_ops):
            raise ContextMismatch("mixing matrix size differs from the vertex count")
        phi = shift.eigenvectors
        xi = basis.eval_matrix(np.arange(self.m))       # xi[x, p]
        values = phi @ coeffs @ xi.T
        out = self.apply_values(values)
        return phi.conj().T @ out @ xi.conj()


@dataclass(frozen=True, eq=False)
class TruncatedFilter(Filter):
    """Filter followed by projection onto the first ``cutoff`` grid points."""

    inner: Filter
    cutoff: int

    def grid_apply(self, coeffs, shift, basis):
        size = shift.n * basis.size
        if not 0 <= self.cutoff <= size:
            raise CutoffOutOfRange(f"cutoff {self.cutoff} outside 0..{size}")
        out = self.inner.grid_apply(coeffs, shift, basis).ravel().copy()
        out[self.cutoff:] = 0.0
        return out.reshape(coeffs.shape)


def truncate_finite_rank(filt, cutoff):
    if cutoff < 0:
        raise CutoffOutOfRange("cutoff must be non-negative")
    return TruncatedFilter(filt, int(cutoff))


# ----------------------------------------------------------- invariance tests

@dataclass(frozen=True)
class InvarianceReport:
    shift_invariant: bool
    weakly_shift_invariant: bool
    commutator_norms: dict = field(default_factory=dict)


def commutator_norms(op, graph_eigs, op_eigs, tol=1e-10):
    """Commutators of a grid-coordinate matrix with A_G(x)Id, Id(x)A and A_G(x)A.

    ``nan`` entries of ``op_eigs`` (elements where A is not injective) are
    treated as 0.
    """
    op = np.asarray(op)
    g = np.asarray(graph_eigs, dtype=float)
    h = np.nan_to_num(np.asarray(op_eigs, dtype=float), nan=0.0)
    if op.shape != (g.size * h.size,) * 2:
        raise DimensionMismatch("operator size does not match the eigenvalue grid")
    diags = {
        "graph": np.kron(g, np.ones_like(h)),
        "hilbert": np.kron(np.ones_like(g), h),
        "joint": np.kron(g, h),
    }
    # [D, L] for diagonal D is (d_r - d_c) * L[r, c]
    norms = {name: float(np.linalg.norm((d[:, None] - d[None, :]) * op, 2))
             for name, d in diags.items()}
    scale = float(np.linalg.norm(op, 2))
    bound = tol * scale if scale > 0 else 0.0
    return InvarianceReport(
        shift_invariant=norms["graph"] <= bound and norms["hilbert"] <= bound,
        weakly_shift_invariant=norms["joint"] <= bound,
        commutator_norms=norms,
    )


def check_shift_invariance(filt, shift, basis, tol=1e-10):
    """Truncated-grid diagnostic; ``filt`` is a Filter or a grid matrix."""
    op = filt.matrix(shift, basis) if isinstance(filt, Filter) else np.asarray(filt)
    return commutator_norms(op, shift.eigenvalues, basis.op_eigenvalues, tol)


def signed_integral_matrix(xs):
    """Discretised (Af)(x) = int_{a}^{x} f - int_{x}^{b} f on a uniform grid
    (trapezoid rule); ``xs`` spans [a, b]."""
    xs = np.asarray(xs, dtype=float)
    h = np.diff(xs)
    n = xs.size
    cum = np.zeros((n, n))            # cum @ f = int_a^{x_r} f
    for r in range(1, n):
        cum[r] = cum[r - 1]
        cum[r, r - 1] += 0.5 * h[r - 1]
        cum[r, r] += 0.5 * h[r - 1]
    total = cum[-1]
    return 2 * cum - total[None, :]


def shift_truncate_matrix(xs, offset):
    """(A'f)(x) = f(x + offset) where x + offset stays on the grid and
    x <= xs[-1] - offset, else 0."""
    xs = np.asarray(xs, dtype=float)
    n = xs.size
    out = np.zeros((n, n))
    step = xs[1] - xs[0]
    k = int(round(offset / step))
    for r in range(n):
        if xs[r] <= xs[-1] - offset + 1e-12 and r + k < n:
            out[r, r + k] = 1.0
    return out


# --------------------------------------------------------------- JSON specs

def _cplx(v):
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise UsageError(f"complex value must be [re, im], got {v}")
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def _carray(v, ndim):
    """Nested lists of depth ``ndim`` whose leaves are numbers or [re, im]."""
    if ndim == 0:
        return _cplx(v)
    if not isinstance(v, (list, tuple)):
        raise UsageError(f"expected a nested list of depth {ndim}")
    return [_carray(x, ndim - 1) for x in v]


def _cmatrix(v):
    try:
        return np.asarray(_carray(v, 2), dtype=complex)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad complex matrix: {exc}") from exc


def _cmatrix_or_diag(v):
    """A flat list of numbers, or ``{"diag": [...]}``, is a diagonal."""
    if isinstance(v, dict) and "diag" in v:
        return np.asarray(_carray(v["diag"], 1), dtype=complex)
    if isinstance(v, list) and v and not isinstance(v[0], (list, tuple)):
        return np.asarray(_carray(v, 1), dtype=complex)
    return _cmatrix(v)


def filter_from_spec(spec, grid_loader=None):
    """Build a filter from a JSON-style dict with a ``kind`` key."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise UsageError("filter spec must be an object with a 'kind'")
    kind = spec["kind"]
    try:
        if kind == "polynomial":
            return PolynomialFilter(tuple(_cplx(c) for c in spec["coeffs"]))
        if kind == "band_pass":
            rects = tuple(tuple(float(x) for x in r) for r in spec.get("K", ()))
            if any(len(r) != 4 for r in rects):
                raise UsageError("band_pass rectangles need [g_lo, g_hi, h_lo, h_hi]")
            pts = tuple(tuple(float(x) for x in p) for p in spec.get("points", ()))
            return BandPassFilter(rects, pts)
        if kind == "convolution":
            if "grid" in spec:
                return ConvolutionFilter(_cmatrix(spec["grid"]))
            if grid_loader is None:
                raise UsageError("convolution needs an inline 'grid' or a 'grid_file'")
            return ConvolutionFilter(grid_loader(spec["grid_file"]))
        if kind == "tensor":
            return TensorFilter(_cmatrix(spec["B_G"]), _cmatrix_or_diag(spec["B_H"]))
        if kind == "adaptive":
            return AdaptiveFilter(tuple(_cplx(c) for c in spec["P1"]), _cmatrix(spec["M"]),
                                  tuple(_cmatrix(a) for a in spec["A_u"]),
                                  tuple(_cplx(c) for c in spec["P2"]))
        if kind == "truncation":
            return truncate_finite_rank(filter_from_spec(spec["inner"], grid_loader),
                                        int(spec["cutoff"]))
    except KeyError as exc:
        raise UsageError(f"filter spec of kind {kind!r} is missing {exc}") from exc
    raise UsageError(f"unknown filter kind {kind!r}")
