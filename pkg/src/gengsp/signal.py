"""Generalized graph signals as coefficient grids over Phi (x) Xi.

Grid axis 0 runs over shift eigenvectors (ascending eigenvalue), axis 1 over
basis elements (ascending frequency label).  Flattened index ``i * M + m`` is
the fixed ordering used by truncation and sampling matrices.
"""
import csv
from dataclasses import dataclass

import numpy as np

from . import _kernels, hilbert, numerics
from .errors import BasisMismatch, DimensionMismatch, UsageError

FREQ_TOL = 1e-10


def same_context(shift_a, basis_a, shift_b, basis_b):
    if shift_a is not shift_b and not (
        shift_a.kind == shift_b.kind
        and np.array_equal(shift_a.eigenvectors, shift_b.eigenvectors)
    ):
        return False
    return basis_a is basis_b or basis_a.key() == basis_b.key()


@dataclass(frozen=True, eq=False)
class GeneralizedSignal:
    shift: object
    basis: object
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        want = (self.shift.n, self.basis.size)
        if c.shape != want:
            raise DimensionMismatch(f"coefficient grid {c.shape} != {want}")
        object.__setattr__(self, "coeffs", c)

    @property
    def n(self):
        return self.shift.n

    def _check(self, other):
        if not same_context(self.shift, self.basis, other.shift, other.basis):
            raise BasisMismatch("signals live on different (shift, basis) pairs")

    def __add__(self, other):
        self._check(other)
        return GeneralizedSignal(self.shift, self.basis, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check(other)
        return GeneralizedSignal(self.shift, self.basis, self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return GeneralizedSignal(self.shift, self.basis, scalar * self.coeffs)

    __rmul__ = __mul__

    def vertex_coeffs(self):
        """H-transform for every element: ``Phi @ coeffs`` (n x M)."""
        return self.shift.eigenvectors @ self.coeffs

    def values(self, xs):
        """f(v, x) for all vertices and the given points, shape (n, len(xs))."""
        return self.vertex_coeffs() @ self.basis.eval_matrix(xs).T

    def evaluate(self, v, x):
        """f(v, x) with ``v`` and ``x`` broadcast against each other."""
        vb, xb = np.broadcast_arrays(np.asarray(v, dtype=int), np.asarray(x, dtype=float))
        rows = self.vertex_coeffs()[vb.ravel()]
        out = np.sum(rows * self.basis.eval_matrix(xb.ravel()), axis=1)
        return out[0] if vb.ndim == 0 else out.reshape(vb.shape)

    def __call__(self, v, x):
        return self.evaluate(v, x)


def _as_callable(f):
    return f.evaluate if isinstance(f, GeneralizedSignal) else f


def h_transform_all(f, basis, n, order=None, breakpoints=()):
    """h[v, p] = <f(v, .), xi_p>_H for a callable ``f(v, xs)``."""
    if isinstance(f, GeneralizedSignal):
        return f.vertex_coeffs()
    return np.array([hilbert.project_all(basis, lambda xs, v=v: f(v, xs), order, breakpoints)
                     for v in range(n)])


def f_transform(f, shift, basis, order=None, breakpoints=()):
    """Joint transform c[i, p] = sum_v conj(phi_i(v)) <f(v, .), xi_p>_H."""
    if isinstance(f, GeneralizedSignal):
        if not same_context(f.shift, f.basis, shift, basis):
            raise BasisMismatch("signal built on a different (shift, basis) pair")
        return f.coeffs.copy()
    h = h_transform_all(f, basis, shift.n, order, breakpoints)
    return shift.eigenvectors.conj().T @ h


def h_transform(f, basis, m, n=None, order=None, breakpoints=()):
    """Vector v -> <f(v, .), xi_m>_H.  ``n`` is required for plain callables."""
    pos = basis.position(m)
    if isinstance(f, GeneralizedSignal):
        return f.vertex_coeffs()[:, pos]
    if n is None:
        raise UsageError("h_transform of a callable needs the vertex count n")
    return h_transform_all(f, basis, n, order, breakpoints)[:, pos]


def g_transform(f, shift, i, x):
    """x -> <f(., x), phi_i>_{C^n}; ``x`` may be an array."""
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    phi = shift.eigenvectors[:, i]
    if isinstance(f, GeneralizedSignal):
        f.basis.check_points(xs)
        vals = f.values(xs)
    else:
        vals = np.array([np.asarray(f(v, xs), dtype=complex) for v in range(shift.n)])
    out = phi.conj() @ vals
    return out[0] if np.ndim(x) == 0 else out


def inverse_f_transform(coeffs, shift, basis):
    return GeneralizedSignal(shift, basis, coeffs)


@dataclass(frozen=True, order=True)
class FrequencyPoint:
    graph_freq: float
    hilbert_freq: float


def frequency_range(f, shift=None, basis=None, tol=FREQ_TOL):
    """Frequency pairs (lambda_phi, freq_label) carrying coefficients above ``tol``."""
    if tol < 0:
        raise UsageError("tolerance must be non-negative")
    if isinstance(f, GeneralizedSignal):
        coeffs, shift, basis = f.coeffs, f.shift, f.basis
    else:
        coeffs = np.asarray(f)
        if shift is None or basis is None:
            raise UsageError("a raw grid needs its shift and basis")
    ii, mm = np.nonzero(np.abs(coeffs) > tol)
    return {FrequencyPoint(float(shift.eigenvalues[i]), float(basis.freq_labels[m]))
            for i, m in zip(ii, mm)}


def inner_product(f, g):
    """<f, g> from coefficients (Parseval)."""
    f._check(g)
    return complex(np.vdot(g.coeffs, f.coeffs))


def quadrature_inner_product(f, g, n, basis, order=None, breakpoints=()):
    """sum_v integral f(v,x) conj(g(v,x)) dmu(x), evaluated pointwise."""
    rule = basis.rule(order, breakpoints)
    f, g = _as_callable(f), _as_callable(g)
    total = 0j
    for v in range(n):
        fv = np.asarray(f(v, rule.nodes), dtype=complex)
        gv = np.asarray(g(v, rule.nodes), dtype=complex)
        total += np.sum(fv * gv.conj() * rule.weights)
    return total


def design_matrix(shift, basis, vertices, xs, phi_idx=None, xi_idx=None):
    """Rows phi_i(v_l) * xi_m(x_l); columns in grid order over the index sets."""
    vertices = np.asarray(vertices, dtype=int)
    phi_idx = np.arange(shift.n) if phi_idx is None else np.asarray(phi_idx, dtype=int)
    phi_rows = np.ascontiguousarray(shift.eigenvectors[vertices][:, phi_idx], dtype=complex)
    xi_rows = np.ascontiguousarray(basis.eval_matrix(xs, xi_idx), dtype=complex)
    return _kernels.design_matrix(phi_rows, xi_rows)


def grid_from_samples(shift, basis, vertices, xs, values, rel_tol=numerics.RANK_RTOL):
    """Least-squares coefficient grid matching a sample table."""
    vertices = np.asarray(vertices, dtype=int)
    if np.any(vertices < 0) or np.any(vertices >= shift.n):
        raise UsageError("sample vertex outside the graph")
    m = design_matrix(shift, basis, vertices, xs)
    res = numerics.lstsq(m, np.asarray(values, dtype=complex), rel_tol)
    return res.x.reshape(shift.n, basis.size), res


# ------------------------------------------------------------------------ I/O

def _fmt(x):
    return f"{x:.17g}"


def write_grid_csv(coeffs, path):
    coeffs = np.asarray(coeffs)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["phi_index", "xi_index", "re", "im"])
        for i in range(coeffs.shape[0]):
            for m in range(coeffs.shape[1]):
                c = complex(coeffs[i, m])
                w.writerow([i, m, _fmt(c.real), _fmt(c.imag)])


def _rows(path, header):
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        first = next(reader, None)
        if first is None or [h.strip() for h in first] != header:
            raise UsageError(f"{path}: expected header {','.join(header)}")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise UsageError(f"{path}:{lineno}: expected {len(header)} fields")
            yield lineno, row


def read_grid_csv(path, shape):
    out = np.zeros(shape, dtype=complex)
    for lineno, row in _rows(path, ["phi_index", "xi_index", "re", "im"]):
        try:
            i, m = int(row[0]), int(row[1])
            val = complex(float(row[2]), float(row[3]))
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: malformed row") from exc
        if not (0 <= i < shape[0] and 0 <= m < shape[1]):
            raise DimensionMismatch(f"{path}:{lineno}: index ({i}, {m}) outside grid {shape}")
        out[i, m] = val
    return out


def write_samples_csv(vertices, xs, values, path):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["vertex", "x", "re", "im"])
        for v, x, val in zip(vertices, xs, values):
            c = complex(val)
            w.writerow([int(v), _fmt(float(x)), _fmt(c.real), _fmt(c.imag)])


def read_samples_csv(path):
    vs, xs, vals = [], [], []
    for lineno, row in _rows(path, ["vertex", "x", "re", "im"]):
        try:
            vs.append(int(row[0]))
            xs.append(float(row[1]))
            vals.append(complex(float(row[2]), float(row[3])))
        except ValueError as exc:
            raise UsageError(f"{path}:{lineno}: malformed row") from exc
    return np.array(vs, dtype=int), np.array(xs), np.array(vals, dtype=complex)
