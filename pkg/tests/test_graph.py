# -*- coding: utf-8 -*-
"""
Heat-kernel graphs, Laplacians and the eigenmaps operator.
"""
import numpy as np
import pytest
import scipy.sparse as sp

from bfmht.errors import InvalidInputError, IsolatedVertexError, ShapeError
from bfmht.graph import (
    check_symmetric,
    default_heat_scale,
    eigenmaps_operator,
    graph_laplacian,
    grid_graph,
    heat_kernel_graph,
    read_matrix_market,
    restricted_laplacian,
    write_matrix_market,
)
from bfmht.trees import PointCloud, torus_grid


def brute_force_kernel(X, t, threshold):
    d2 = np.sum((X[:, None, :] - X[None, :, :]) ** 2, axis=2)
    K = np.exp(-d2 / t)
    K[K <= threshold] = 0.0
    np.fill_diagonal(K, 1.0)
    return K


class TestHeatKernel:
    def test_matches_all_pairs_evaluation(self, rng):
        X = rng.uniform(-1.0, 1.0, size=(150, 2))
        K = heat_kernel_graph(X, 0.05, 1e-4)
        expected = brute_force_kernel(X, 0.05, 1e-4)
        assert np.allclose(K.toarray(), expected, rtol=1e-14, atol=0.0)

    def test_symmetric_with_unit_diagonal(self, cloud):
        K = heat_kernel_graph(cloud, 0.3, 1e-3)
        assert check_symmetric(K) == 0.0
        assert np.all(K.diagonal() == 1.0)

    def test_kept_entries_exceed_threshold(self, cloud):
        threshold = 1e-2
        K = heat_kernel_graph(cloud, 0.3, threshold).tocoo()
        off = K.row != K.col
        assert np.all(K.data[off] > threshold)

    def test_point_cloud_and_array_agree(self, cloud):
        a = heat_kernel_graph(cloud, 0.3, 1e-3)
        b = heat_kernel_graph(cloud.points, 0.3, 1e-3)
        assert (a != b).nnz == 0

    @pytest.mark.parametrize("t, threshold", [(0.0, 1e-3), (-1.0, 1e-3), (0.3, 0.0), (0.3, 1.0)])
    def test_rejects_bad_parameters(self, cloud, t, threshold):
        with pytest.raises(InvalidInputError):
            heat_kernel_graph(cloud, t, threshold)

    def test_default_scale_from_neighbour_distance(self):
        grid = torus_grid(8)
        spacing = 2 * np.pi / 8
        assert default_heat_scale(grid) == pytest.approx(0.25 * spacing**2 * np.sqrt(64))

    def test_default_scale_needs_two_points(self):
        with pytest.raises(InvalidInputError):
            default_heat_scale(PointCloud(np.zeros((1, 3))))


class TestLaplacians:
    def test_grid_graph_degrees(self):
        W = grid_graph(6)
        assert W.shape == (36, 36)
        assert np.all(np.asarray(W.sum(axis=1)).ravel() == 4)

    def test_open_grid_corners_have_degree_two(self):
        degree = np.asarray(grid_graph(5, periodic=False).sum(axis=1)).ravel()
        assert degree[0] == 2
        assert degree.max() == 4

    def test_grid_graph_needs_two_points_per_side(self):
        with pytest.raises(InvalidInputError):
            grid_graph(1)

    def test_laplacian_rows_sum_to_zero(self):
        L = graph_laplacian(grid_graph(5) + sp.identity(25))
        assert np.allclose(np.asarray(L.sum(axis=1)).ravel(), 0.0)
        assert np.all(L.diagonal() == 4)

    def test_restricted_laplacian_drops_outside_edges(self):
        ones = np.ones(3)
        W = sp.diags([ones, ones], [-1, 1], format="csr")
        L = restricted_laplacian(W, [0, 1])
        assert np.array_equal(L.toarray(), [[1.0, -1.0], [-1.0, 1.0]])


class TestEigenmapsOperator:
    def test_spectrum_in_zero_two(self, cloud):
        op, degree = eigenmaps_operator(heat_kernel_graph(cloud, 0.5, 1e-4))
        values = np.linalg.eigvalsh(op.toarray())
        assert values[0] == pytest.approx(0.0, abs=1e-10)
        assert values[-1] <= 2.0 + 1e-10

    def test_null_vector_is_root_degree(self, cloud):
        op, degree = eigenmaps_operator(heat_kernel_graph(cloud, 0.5, 1e-4))
        v = np.sqrt(degree)
        assert np.linalg.norm(op @ v) <= 1e-12 * np.linalg.norm(v)

    def test_operator_is_exactly_symmetric(self, cloud):
        op, _ = eigenmaps_operator(heat_kernel_graph(cloud, 0.5, 1e-4))
        assert check_symmetric(op) == 0.0

    def test_isolated_vertex(self):
        K = sp.diags([1.0, 1.0, 0.0], format="csr")
        with pytest.raises(IsolatedVertexError) as err:
            eigenmaps_operator(K)
        assert err.value.vertex == 2

    def test_non_square(self):
        with pytest.raises(ShapeError):
            eigenmaps_operator(sp.csr_matrix(np.ones((2, 3))))


class TestMatrixFiles:
    def test_matrix_market_round_trip(self, tmp_path):
        W = grid_graph(4) * 0.5
        path = tmp_path / "grid.mtx"
        write_matrix_market(path, W)
        assert abs(read_matrix_market(path) - W).max() == 0.0

    def test_asymmetric_file_is_rejected(self, tmp_path):
        path = tmp_path / "bad.mtx"
        path.write_text("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 2 1.0\n")
        with pytest.raises(InvalidInputError):
            read_matrix_market(path)

    def test_check_symmetric_non_square(self):
        with pytest.raises(ShapeError):
            check_symmetric(sp.csr_matrix(np.ones((3, 2))))
