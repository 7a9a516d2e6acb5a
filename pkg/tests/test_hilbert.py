import numpy as np
import pytest

from gengsp import graph, hilbert
from gengsp.errors import OutOfDomain, QuadratureUnderResolved, UsageError

from conftest import all_bases


def test_half_integer_labels():
    b = hilbert.make_basis("half_integer_fourier", 2)
    assert b.labels.tolist() == [-2, -1, 0, 1]
    assert b.freq_labels.tolist() == [-1.5, -0.5, 0.5, 1.5]
    assert np.allclose(b.op_eigenvalues, 1 / b.freq_labels)


def test_chebyshev_single_element():
    b = hilbert.make_basis("chebyshev", 1)
    x = np.linspace(-1, 1, 5)
    assert np.allclose(b.eval_matrix(x)[:, 0], 1 / np.sqrt(np.pi))


def test_graph_basis_two_path():
    b = hilbert.make_basis("graph_basis", 2, graph=graph.standard_graph("path", 2))
    assert np.allclose(b.freq_labels, [0, 2])
    assert b.discrete and b.measure == 2


def test_fourier_series_labels():
    b = hilbert.make_basis("fourier_series", 2, period=4.0)
    assert b.labels.tolist() == [-2, -1, 0, 1, 2]
    assert np.allclose(b.freq_labels, 2 * np.pi * b.labels / 4.0)
    assert np.isnan(b.op_eigenvalues[2])


@pytest.mark.parametrize("kind,m,x,want", [
    ("half_integer_fourier", 0, 0.0, 1 / np.sqrt(2 * np.pi)),
    ("chebyshev", 2, 1.0, np.sqrt(2 / np.pi)),
    ("fourier_series", 1, np.pi, -1 / np.sqrt(2 * np.pi)),
])
def test_eval_basis_values(kind, m, x, want):
    b = hilbert.make_basis(kind, 4, period=2 * np.pi if kind == "fourier_series" else None)
    assert abs(hilbert.eval_basis(b, m, x) - want) < 1e-14


def test_chebyshev_matches_numpy_chebval():
    b = hilbert.make_basis("chebyshev", 9)
    x = np.linspace(-1, 1, 17)
    for j in range(9):
        ref = np.polynomial.chebyshev.chebval(x, np.eye(9)[j])
        ref = ref / np.sqrt(np.pi) if j == 0 else ref * np.sqrt(2 / np.pi)
        assert np.allclose(hilbert.eval_basis(b, j, x), ref, atol=1e-13)


def test_eval_out_of_domain():
    b = hilbert.make_basis("chebyshev", 3)
    with pytest.raises(OutOfDomain):
        hilbert.eval_basis(b, 0, 1.5)
    g = hilbert.make_basis("graph_basis", 2, graph=graph.standard_graph("path", 3))
    with pytest.raises(OutOfDomain):
        hilbert.eval_basis(g, 0, 0.5)


def test_unknown_kind_and_bad_truncation():
    with pytest.raises(UsageError):
        hilbert.make_basis("wavelet", 3)
    with pytest.raises(UsageError):
        hilbert.make_basis("chebyshev", 0)
    with pytest.raises(UsageError):
        hilbert.make_basis("fourier_series", 3)


@pytest.mark.parametrize("M", [1, 4, 16, 64])
def test_gram_identity(M):
    for b in all_bases(M):
        rule = b.rule()
        e = b.eval_matrix(rule.nodes)
        gram = (e.conj().T * rule.weights) @ e
        assert np.allclose(gram, np.eye(b.size), atol=1e-8), b.kind


def test_project_self_and_others():
    for b in all_bases(6):
        for p in (0, b.size // 2, b.size - 1):
            m = b.labels[p]
            coeffs = [hilbert.project(b, b.labels[q], lambda x, m=m: hilbert.eval_basis(b, m, x))
                      for q in range(b.size)]
            want = np.eye(b.size)[p]
            assert np.allclose(coeffs, want, atol=1e-10), b.kind


def test_project_sample_table():
    b = hilbert.make_basis("chebyshev", 5)
    xs = np.linspace(-0.9, 0.9, 11)
    vals = 2.0 * hilbert.eval_basis(b, 3, xs) - 1j * hilbert.eval_basis(b, 0, xs)
    assert abs(hilbert.project(b, 3, (xs, vals)) - 2.0) < 1e-10
    assert abs(hilbert.project(b, 0, (xs, vals)) + 1j) < 1e-10


def test_half_integer_antiperiodic():
    b = hilbert.make_basis("half_integer_fourier", 5)
    e = b.eval_matrix([0.0, 2 * np.pi])
    assert np.allclose(e[0] + e[1], 0, atol=1e-14)


def test_step_projection_against_closed_form():
    b = hilbert.make_basis("half_integer_fourier", 3)
    f = lambda x: (x <= np.pi).astype(float)
    got = hilbert.project(b, 0, f, breakpoints=[np.pi])
    # int_0^pi exp(-i x / 2) dx / sqrt(2 pi)
    want = (1 - np.exp(-0.5j * np.pi)) / (0.5j) / np.sqrt(2 * np.pi)
    assert abs(got - want) < 1e-8


def test_under_resolved_quadrature_raises():
    b = hilbert.make_basis("half_integer_fourier", 2)
    with pytest.raises(QuadratureUnderResolved):
        hilbert.project(b, 0, lambda x: np.cos(40 * x) * (x < 2.0), order=6)
