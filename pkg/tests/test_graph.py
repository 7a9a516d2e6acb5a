import itertools

import numpy as np
import pytest

from gengsp import graph, numerics
from gengsp.errors import DependentColumns, InfeasiblePartition, UsageError


def test_graph_rejects_self_loops_and_duplicates():
    with pytest.raises(UsageError):
        graph.Graph(3, ((1, 1, 1.0),))
    with pytest.raises(UsageError):
        graph.Graph(3, ((0, 1, 1.0), (1, 0, 2.0)))
    with pytest.raises(UsageError):
        graph.Graph(2, ((0, 1, float("inf")),))
    with pytest.raises(UsageError):
        graph.Graph(2, ((0, 2, 1.0),))


def test_path3_laplacian_spectrum():
    sh = graph.build_shift(graph.standard_graph("path", 3), "laplacian")
    assert np.allclose(sh.eigenvalues, [0, 1, 3], atol=1e-12)


def test_cycle4_eigenspaces(cycle4):
    ref = np.array([[1, 1, 1, 1], [-1, 0, 1, 0], [0, -1, 0, 1], [-1, 1, -1, 1]], float).T
    # span of each eigenspace agrees with the reference vectors
    for lam, cols in ((0, [0]), (2, [1, 2]), (4, [3])):
        ours = cycle4.eigenvectors[:, np.isclose(cycle4.eigenvalues, lam)]
        assert ours.shape[1] == len(cols)
        proj = ours @ ours.T
        assert np.allclose(proj @ ref[:, cols], ref[:, cols], atol=1e-10)


def test_cycle4_warns_about_repeated_eigenvalue():
    with pytest.warns(RuntimeWarning, match="repeated"):
        sh = graph.build_shift(graph.standard_graph("cycle", 4))
    assert not sh.has_simple_spectrum()


def test_single_vertex_adjacency():
    sh = graph.build_shift(graph.Graph(1), "adjacency")
    assert sh.matrix.shape == (1, 1) and sh.eigenvalues.tolist() == [0.0]


def test_shift_properties(rng):
    g = graph.random_weighted_graph(9, "er", seed=3, p=0.5)
    for kind in graph.SHIFT_KINDS:
        sh = graph.build_shift(g, kind)
        assert np.array_equal(sh.matrix, sh.matrix.T)
        assert np.allclose(sh.eigenvectors.T @ sh.eigenvectors, np.eye(9), atol=1e-10)
    lap = graph.build_shift(g, "laplacian")
    assert np.allclose(lap.matrix.sum(axis=1), 0, atol=1e-12)
    assert lap.eigenvalues.min() >= -1e-10
    with pytest.raises(ValueError):
        lap.matrix[0, 0] = 5.0


def test_product_graph_k2_k2_is_4cycle():
    k2 = graph.standard_graph("path", 2)
    p = graph.product_graph(k2, k2)
    assert p.n == 4 and p.num_edges == 4
    assert all(d == 2 for d in p.adjacency().sum(axis=1))
    assert not np.any(np.diag(p.adjacency() @ p.adjacency() @ p.adjacency()))  # bipartite


def test_product_graph_identity_factor():
    g2 = graph.random_weighted_graph(5, "er", seed=1, p=0.6)
    p = graph.product_graph(graph.Graph(1), g2)
    assert np.array_equal(p.adjacency(), g2.adjacency())


def test_product_graph_grid_counts():
    g, g2 = graph.standard_graph("path", 3), graph.standard_graph("path", 2)
    p = graph.product_graph(g, g2)
    assert p.n == 6 and p.num_edges == 7
    assert p.num_edges == g.num_edges * g2.n + g2.num_edges * g.n


def test_product_graph_edge_definition():
    g = graph.random_weighted_graph(3, "complete", seed=2)
    g2 = graph.random_weighted_graph(2, "complete", seed=4)
    p = graph.product_graph(g, g2).adjacency()
    a, a2 = g.adjacency(), g2.adjacency()
    for (v1, u1), (v2, u2) in itertools.product(itertools.product(range(3), range(2)), repeat=2):
        want = (a2[u1, u2] if v1 == v2 else 0) + (a[v1, v2] if u1 == u2 else 0)
        assert p[v1 * 2 + u1, v2 * 2 + u2] == want


@pytest.mark.parametrize("pair", list(itertools.combinations(range(4), 2)))
def test_delta_cycle4_pairs(pair):
    ref = np.array([[1, 1, 1, 1], [-1, 0, 1, 0], [0, -1, 0, 1], [-1, 1, -1, 1]], float).T
    ref /= np.linalg.norm(ref, axis=0)
    res = graph.delta(ref[:, list(pair)])
    assert res.value == 2 and res.exact


def test_delta_full_basis_is_one(cycle4):
    assert graph.delta(cycle4.eigenvectors).value == 1


def test_delta_random_graph_generic():
    for seed in range(10):
        sh = graph.build_shift(graph.random_weighted_graph(6, "complete", seed=seed))
        phi = sh.eigenvectors[:, [1, 4]]
        res = graph.delta(phi)
        assert res.value == 3 and res.exact
        for block in res.blocks:
            assert numerics.numeric_rank(phi[list(block)]) == 2


def test_delta_upper_bound(rng):
    for _ in range(10):
        n, k = rng.integers(3, 9), rng.integers(1, 3)
        phi = np.linalg.qr(rng.normal(size=(n, k)))[0]
        assert graph.delta(phi).value <= n // k


def test_delta_needs_backtracking():
    # greedy pivoting pairs the two large rows and strands {2, 3}
    phi = np.array([[3.0, 0.5], [0.0, 3.0], [1.0, 0.0], [2.0, 0.0]])
    assert len(graph._greedy_packing(phi, 2, numerics.RANK_RTOL)) == 1
    res = graph.delta(phi)
    assert res.value == 2 and res.exact


def test_delta_dependent_columns():
    with pytest.raises(DependentColumns):
        graph.delta(np.array([[1.0, 2.0], [1.0, 2.0], [0.0, 0.0]]))


def test_select_vertex_subset_standard_basis():
    assert graph.select_vertex_subset(np.eye(4)[:, :2]) == [0, 1]


def test_select_vertex_subset_cycle4():
    phi = np.array([[1, 1, 1, 1], [-1, 0, 1, 0]], float).T
    rows = graph.select_vertex_subset(phi)
    assert len(rows) == 2 and abs(np.linalg.det(phi[rows])) > 1e-9


def test_select_vertex_subset_random(rng):
    phi = rng.normal(size=(8, 3))
    rows = graph.select_vertex_subset(phi)
    assert abs(np.linalg.det(phi[rows])) > 1e-9
    assert graph.select_vertex_subset(phi) == rows           # deterministic


def test_partition_vertices_cases(cycle4):
    phi = cycle4.eigenvectors[:, :2]
    assert graph.partition_vertices(phi, 1) == [[0, 1, 2, 3]]
    blocks = graph.partition_vertices(phi, 2)
    assert sorted(v for b in blocks for v in b) == [0, 1, 2, 3]
    for b in blocks:
        assert numerics.numeric_rank(phi[b]) == 2
    with pytest.raises(InfeasiblePartition):
        graph.partition_vertices(phi, 3)


def test_partition_random_six():
    sh = graph.build_shift(graph.random_weighted_graph(6, "complete", seed=11))
    phi = sh.eigenvectors[:, :2]
    blocks = graph.partition_vertices(phi, 3)
    assert len(blocks) == 3
    assert all(numerics.numeric_rank(phi[b]) == 2 for b in blocks)


def test_partition_infeasible_below_floor():
    phi = np.array([[1.0, 0.0], [2.0, 0.0], [0.0, 1.0], [3.0, 0.0]])
    with pytest.raises(InfeasiblePartition):
        graph.partition_vertices(phi, 2)


def test_random_weighted_graph_determinism_and_er0():
    a = graph.random_weighted_graph(3, "complete", seed=5)
    b = graph.random_weighted_graph(3, "complete", seed=5)
    assert a == b
    assert all(0 < w <= 1 for _, _, w in a.edges)
    assert graph.random_weighted_graph(5, "er", seed=1, p=0.0).num_edges == 0


def test_complete_graph_spectra_simple():
    for seed in range(100):
        sh = graph.build_shift(graph.random_weighted_graph(10, "complete", seed=seed), "adjacency")
        assert np.diff(sh.eigenvalues).min() > 1e-8


def test_edge_csv_round_trip(tmp_path):
    g = graph.random_weighted_graph(6, "er", seed=9, p=0.5)
    path = tmp_path / "g.csv"
    graph.write_edge_csv(g, path)
    assert graph.read_edge_csv(path, 6) == g


def test_edge_csv_rejects_bad_input(tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("a,b,c\n0,1,1\n")
    with pytest.raises(UsageError):
        graph.read_edge_csv(p)
    p.write_text("u,v,w\n0,1,x\n")
    with pytest.raises(UsageError):
        graph.read_edge_csv(p)
    p.write_text("u,v,w\n0,1,1\n1,0,1\n")
    with pytest.raises(UsageError):
        graph.read_edge_csv(p)
