"""Orthonormal bases of H = L^2(Omega, mu) with frequency labels.

Each basis element carries two numbers: ``freq_labels`` (the reciprocal of the
compact-operator eigenvalue, i.e. the frequency axis used for frequency
ranges and band-pass sets) and ``op_eigenvalues`` (the eigenvalue of the
operator ``A`` itself, used by polynomial filters; ``nan`` where ``A`` is not
injective on that element).
"""
from dataclasses import dataclass, field

import numpy as np

from . import _kernels, numerics
from .errors import OutOfDomain, QuadratureUnderResolved, UsageError

KINDS = ("half_integer_fourier", "fourier_series", "chebyshev", "graph_basis")
REFINE_TOL = 1e-6
_DOMAIN_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class HilbertBasis:
    kind: str
    truncation: int
    labels: np.ndarray          # element index (m, k or j)
    freq_labels: np.ndarray
    op_eigenvalues: np.ndarray
    domain: tuple
    discrete: bool = False
    period: float = None
    shift: object = field(default=None, repr=False)   # graph_basis only

    @property
    def size(self):
        return self.labels.shape[0]

    @property
    def measure(self):
        if self.discrete:
            return float(self.domain[1] - self.domain[0] + 1)
        if self.kind == "chebyshev":
            return np.pi
        return float(self.domain[1] - self.domain[0])

    def key(self):
        """Hashable identity used to detect mixed contexts."""
        extra = None if self.shift is None else self.shift.eigenvectors.tobytes()
        return (self.kind, self.truncation, self.period, self.domain, extra)

    def position(self, label):
        hit = np.nonzero(self.labels == label)[0]
        if hit.size == 0:
            raise UsageError(f"{self.kind} basis has no element {label}")
        return int(hit[0])

    def check_points(self, xs):
        xs = np.atleast_1d(np.asarray(xs, dtype=float))
        lo, hi = self.domain
        slack = _DOMAIN_SLACK * max(1.0, abs(lo), abs(hi))
        if np.any(xs < lo - slack) or np.any(xs > hi + slack) or not np.all(np.isfinite(xs)):
            raise OutOfDomain(f"points outside [{lo}, {hi}]")
        if self.discrete and np.any(xs != np.round(xs)):
            raise OutOfDomain("graph_basis points must be vertex ids")
        return xs

    def eval_matrix(self, xs, positions=None):
        """E[l, p] = xi_p(xs[l]) for element positions ``p`` (default: all)."""
        xs = self.check_points(xs)
        pos = np.arange(self.size) if positions is None else np.asarray(positions, dtype=int)
        if self.kind == "half_integer_fourier":
            freqs = self.freq_labels[pos].astype(float)
            return _kernels.exp_eval(xs, freqs, np.sqrt(2 * np.pi))
        if self.kind == "fourier_series":
            freqs = self.freq_labels[pos].astype(float)
            return _kernels.exp_eval(xs, freqs, np.sqrt(self.period))
        if self.kind == "chebyshev":
            full = _kernels.cheb_eval(np.clip(xs, -1.0, 1.0), int(pos.max(initial=-1)) + 1)
            return full[:, pos].astype(complex)
        vecs = self.shift.eigenvectors
        return vecs[np.round(xs).astype(int)][:, pos].astype(complex)

    def rule(self, order=None, breakpoints=()):
        """Quadrature rule for the basis measure (``None`` order = default)."""
        if self.discrete:
            nodes = np.arange(self.domain[0], self.domain[1] + 1, dtype=float)
            return numerics.QuadratureRule(nodes, np.ones_like(nodes), self.domain)
        if order is None:
            order = default_order(self.truncation)
        if self.kind == "chebyshev":
            # x = cos(theta) turns the weighted integral into plain dtheta on [0, pi].
            cuts = [np.arccos(np.clip(p, -1, 1)) for p in breakpoints]
            if cuts:
                r = numerics.composite_gauss(order, (0.0, np.pi), cuts)
                nodes, weights = np.cos(r.nodes), r.weights
            else:
                theta = (2 * np.arange(1, order + 1) - 1) * np.pi / (2 * order)
                nodes, weights = np.cos(theta), np.full(order, np.pi / order)
            idx = np.argsort(nodes)
            return numerics.QuadratureRule(nodes[idx], weights[idx], self.domain)
        return numerics.composite_gauss(order, self.domain, breakpoints)


def default_order(truncation):
    return 4 * truncation + 16


def make_basis(kind, truncation, period=None, graph=None, shift_kind="laplacian"):
    """Build a truncated basis.

    * ``half_integer_fourier``: exp(i(m+1/2)x)/sqrt(2pi) on [0, 2pi], m = -M..M-1
    * ``fourier_series``: exp(i 2pi k x/T)/sqrt(T) on [0, T], k = -M..M
    * ``chebyshev``: orthonormal T_j on [-1, 1] under dx/sqrt(1-x^2), j < M
    * ``graph_basis``: first M shift eigenvectors of ``graph`` (counting measure)
    """
    if truncation < 1:
        raise UsageError("truncation must be >= 1")
    M = int(truncation)
    if kind == "half_integer_fourier":
        labels = np.arange(-M, M)
        freq = labels + 0.5
        return HilbertBasis(kind, M, labels, freq, 1.0 / freq, (0.0, 2 * np.pi))
    if kind == "fourier_series":
        if period is None or not period > 0:
            raise UsageError("fourier_series needs a positive period")
        labels = np.arange(-M, M + 1)
        freq = 2 * np.pi * labels / period
        with np.errstate(divide="ignore"):
            op = np.where(freq == 0.0, np.nan, 1.0 / np.where(freq == 0.0, 1.0, freq))
        return HilbertBasis(kind, M, labels, freq, op, (0.0, float(period)), period=float(period))
    if kind == "chebyshev":
        labels = np.arange(M)
        freq = labels.astype(float)
        op = np.where(freq == 0.0, np.nan, 1.0 / np.where(freq == 0.0, 1.0, freq))
        return HilbertBasis(kind, M, labels, freq, op, (-1.0, 1.0))
    if kind == "graph_basis":
        from .graph import build_shift

        if graph is None:
            raise UsageError("graph_basis needs a graph")
        sh = build_shift(graph, shift_kind)
        if M > sh.n:
            raise UsageError(f"truncation {M} exceeds graph size {sh.n}")
        labels = np.arange(M)
        vals = sh.eigenvalues[:M].copy()
        return HilbertBasis(kind, M, labels, vals, vals, (0, sh.n - 1), discrete=True, shift=sh)
    raise UsageError(f"unknown basis kind {kind!r}; expected one of {KINDS}")


def eval_basis(basis, m, x):
    """Value of the element with label ``m`` at ``x`` (scalar or array)."""
    out = basis.eval_matrix(x, [basis.position(m)])[:, 0]
    return out[0] if np.ndim(x) == 0 else out


def _project_rule(basis, f, rule):
    vals = np.asarray(f(rule.nodes), dtype=complex)
    return (vals * rule.weights) @ basis.eval_matrix(rule.nodes).conj()


def project_all(basis, f, order=None, breakpoints=(), check=True):
    """All coefficients <f, xi_p>_H for a vectorised function handle ``f``.

    Continuous bases repeat the integral at twice the order and raise
    :class:`QuadratureUnderResolved` if the two disagree beyond 1e-6.
    """
    rule = basis.rule(order, breakpoints)
    coef = _project_rule(basis, f, rule)
    if check and not basis.discrete:
        fine_order = 2 * (order or default_order(basis.truncation))
        fine = _project_rule(basis, f, basis.rule(fine_order, breakpoints))
        err = np.abs(fine - coef).max(initial=0.0)
        if err > REFINE_TOL * max(1.0, np.abs(fine).max(initial=0.0)):
            raise QuadratureUnderResolved(
                f"projection changed by {err:.2e} on refinement; raise the order or pass breakpoints")
        coef = fine
    return coef


def fit_samples(basis, xs, values, rel_tol=numerics.RANK_RTOL):
    """Least-squares coefficients of a sample table in the truncated basis."""
    res = numerics.lstsq(basis.eval_matrix(xs), np.asarray(values, dtype=complex), rel_tol)
    return res.x, res


def project(basis, m, f, order=None, breakpoints=()):
    """<f, xi_m>_H.  ``f`` is a vectorised callable or a ``(xs, values)`` table."""
    pos = basis.position(m)
    if callable(f):
        return project_all(basis, f, order, breakpoints)[pos]
    xs, values = f
    return fit_samples(basis, xs, values)[0][pos]
