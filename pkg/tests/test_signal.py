import numpy as np
import pytest

from gengsp import graph, hilbert, signal
from gengsp.errors import BasisMismatch, DimensionMismatch, UsageError
from gengsp.signal import GeneralizedSignal

from conftest import all_bases, path_signal, random_grid


def _one_hot(shift, basis, i, p):
    c = np.zeros((shift.n, basis.size), dtype=complex)
    c[i, p] = 1.0
    return GeneralizedSignal(shift, basis, c)


def test_basis_element_transform(path3):
    b = hilbert.make_basis("half_integer_fourier", 2)
    one = _one_hot(path3, b, 1, b.position(0))
    grid = signal.f_transform(lambda v, x: one.evaluate(v, x), path3, b)
    assert np.allclose(grid, one.coeffs, atol=1e-12)


def test_example_value_and_g_transform(path3):
    b = hilbert.make_basis("half_integer_fourier", 2)
    f = path_signal()
    grid = signal.f_transform(f, path3, b)
    want = -np.sqrt(np.pi) / 2 + 1j * np.sqrt(np.pi) / 2
    assert abs(grid[1, b.position(-1)] - want) < 1e-8
    x = np.linspace(0, 2 * np.pi, 9)
    g = signal.g_transform(f, path3, 1, x)
    assert np.allclose(g, (0 - 2 * np.cos(x / 2) + np.sqrt(2) * np.sin(x / 2 + np.pi / 4)) / np.sqrt(2))


def test_round_trip_random_grid(rng):
    sh = graph.build_shift(graph.random_weighted_graph(4, "complete", seed=1))
    b = hilbert.make_basis("chebyshev", 8)
    c = random_grid(rng, (4, 8))
    f = signal.inverse_f_transform(c, sh, b)
    back = signal.f_transform(lambda v, x: f.evaluate(v, x), sh, b)
    assert np.allclose(back, c, atol=1e-8)


def test_inverse_dimension_mismatch(path3):
    with pytest.raises(DimensionMismatch):
        signal.inverse_f_transform(np.zeros((2, 4)), path3, hilbert.make_basis("chebyshev", 4))


def test_zero_and_one_hot_inverse(path3):
    b = hilbert.make_basis("fourier_series", 2, period=2.0)
    z = signal.inverse_f_transform(np.zeros((3, b.size)), path3, b)
    assert np.allclose(z.values([0.1, 1.3]), 0)
    one = _one_hot(path3, b, 2, 1)
    x = np.array([0.3, 1.7])
    want = np.outer(path3.eigenvectors[:, 2], b.eval_matrix(x)[:, 1])
    assert np.allclose(one.values(x), want)


def test_h_transform_vertex_delta(path3):
    b = hilbert.make_basis("half_integer_fourier", 3)
    m = 1
    f = lambda v, x: (v == 0) * hilbert.eval_basis(b, m, x)
    assert np.allclose(signal.h_transform(f, b, m, n=3), [1, 0, 0], atol=1e-12)
    with pytest.raises(UsageError):
        signal.h_transform(f, b, m)


def test_g_transform_of_basis_element(path3):
    b = hilbert.make_basis("chebyshev", 4)
    one = _one_hot(path3, b, 2, 3)
    x = np.linspace(-1, 1, 7)
    assert np.allclose(signal.g_transform(one, path3, 2, x), b.eval_matrix(x)[:, 3])


def test_transform_routes_agree(rng):
    sh = graph.build_shift(graph.random_weighted_graph(5, "complete", seed=2), "adjacency")
    b = hilbert.make_basis("half_integer_fourier", 4)
    c = random_grid(rng, (5, b.size))
    f = GeneralizedSignal(sh, b, c)
    fn = lambda v, x: f.evaluate(v, x)
    via_h = sh.eigenvectors.T @ np.array([signal.h_transform(fn, b, m, n=5) for m in b.labels]).T
    via_g = np.array([hilbert.project_all(b, lambda x, i=i: signal.g_transform(fn, sh, i, x))
                      for i in range(5)])
    assert np.allclose(via_h, c, atol=1e-8) and np.allclose(via_g, c, atol=1e-8)


def test_linearity(rng, path3):
    b = hilbert.make_basis("chebyshev", 5)
    f = GeneralizedSignal(path3, b, random_grid(rng, (3, 5)))
    g = GeneralizedSignal(path3, b, random_grid(rng, (3, 5)))
    a = 0.3 - 2j
    assert np.array_equal(signal.f_transform(a * f + g, path3, b),
                          a * signal.f_transform(f, path3, b) + signal.f_transform(g, path3, b))


def test_frequency_range_cases(path3):
    b = hilbert.make_basis("half_integer_fourier", 2)
    zero = GeneralizedSignal(path3, b, np.zeros((3, 4)))
    assert signal.frequency_range(zero) == set()
    one = _one_hot(path3, b, 0, b.position(0))
    (point,) = signal.frequency_range(one)
    assert point.graph_freq == pytest.approx(0.0, abs=1e-12) and point.hilbert_freq == 0.5
    with pytest.raises(UsageError):
        signal.frequency_range(one, tol=-1)


def test_inner_product_and_parseval(rng):
    for b in all_bases(5):
        sh = graph.build_shift(graph.random_weighted_graph(4, "complete", seed=3))
        f = GeneralizedSignal(sh, b, random_grid(rng, (4, b.size)))
        g = GeneralizedSignal(sh, b, random_grid(rng, (4, b.size)))
        assert abs(signal.inner_product(f, g) - signal.quadrature_inner_product(f, g, 4, b)) < 1e-8
        norm2 = signal.inner_product(f, f).real
        assert abs(norm2 - np.sum(np.abs(f.coeffs) ** 2)) < 1e-10


def test_inner_product_of_basis_elements(path3):
    b = hilbert.make_basis("chebyshev", 3)
    e1, e2 = _one_hot(path3, b, 0, 1), _one_hot(path3, b, 1, 1)
    assert signal.inner_product(e1, e1) == 1
    assert signal.inner_product(e1, e2) == 0


def test_inner_product_mismatch(path3):
    f = GeneralizedSignal(path3, hilbert.make_basis("chebyshev", 3), np.zeros((3, 3)))
    g = GeneralizedSignal(path3, hilbert.make_basis("half_integer_fourier", 2), np.zeros((3, 4)))
    with pytest.raises(BasisMismatch):
        signal.inner_product(f, g)
    with pytest.raises(BasisMismatch):
        f + g


def test_evaluate_broadcasting(rng, path3):
    b = hilbert.make_basis("chebyshev", 4)
    f = GeneralizedSignal(path3, b, random_grid(rng, (3, 4)))
    x = np.array([-0.5, 0.2])
    table = f.values(x)
    assert np.isclose(f(2, 0.2), table[2, 1])
    assert np.allclose(f.evaluate([0, 1, 2], 0.2), table[:, 1])
    assert np.allclose(f.evaluate(np.array([[0], [2]]), x), table[[0, 2]])


def test_grid_from_samples_and_csv(tmp_path, rng, path3):
    b = hilbert.make_basis("half_integer_fourier", 2)
    f = GeneralizedSignal(path3, b, random_grid(rng, (3, 4)))
    vs = np.repeat(np.arange(3), 6)
    xs = np.tile(np.linspace(0.1, 6.0, 6), 3)
    vals = f.evaluate(vs, xs)
    grid, res = signal.grid_from_samples(path3, b, vs, xs, vals)
    assert not res.rank_deficient and np.allclose(grid, f.coeffs, atol=1e-10)
    signal.write_grid_csv(grid, tmp_path / "g.csv")
    assert np.array_equal(signal.read_grid_csv(tmp_path / "g.csv", (3, 4)), grid)
    signal.write_samples_csv(vs, xs, vals, tmp_path / "s.csv")
    v2, x2, y2 = signal.read_samples_csv(tmp_path / "s.csv")
    assert np.array_equal(v2, vs) and np.array_equal(x2, xs) and np.array_equal(y2, vals)


def test_grid_csv_rejects_bad_rows(tmp_path):
    p = tmp_path / "g.csv"
    p.write_text("phi_index,xi_index,re,im\n5,0,1,0\n")
    with pytest.raises(DimensionMismatch):
        signal.read_grid_csv(p, (3, 4))
    p.write_text("phi_index,xi_index,re,im\n0,0,abc,0\n")
    with pytest.raises(UsageError):
        signal.read_grid_csv(p, (3, 4))
