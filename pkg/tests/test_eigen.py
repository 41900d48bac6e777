# -*- coding: utf-8 -*-
"""
Lanczos eigensolves, Fiedler vectors and the banded eigenvector provider.
"""
import numpy as np
import pytest
import scipy.linalg
import scipy.sparse as sp

from bfmht.errors import ContainerError, InvalidInputError, StreamError
from bfmht.graph import (
    BandedEigenProvider,
    DeflatedOperator,
    EigenBand,
    fiedler_vector,
    graph_laplacian,
    lanczos_smallest,
    read_eigenbands,
    write_eigenbands,
)
from bfmht.trees import build_count_tree


def path_laplacian(n):
    ones = np.ones(n - 1)
    return graph_laplacian(sp.diags([ones, ones], [-1, 1], format="csr"))


def spread_operator(n):
    """Symmetric with eigenvalues about one apart."""
    ones = np.ones(n - 1)
    return sp.csr_matrix(sp.diags(np.arange(1.0, n + 1.0)) + 0.1 * sp.diags([ones, ones], [-1, 1]))


def assert_same_vectors(a, b, tol=1e-8):
    overlaps = np.abs(np.sum(a * b, axis=0))
    assert np.allclose(overlaps, 1.0, atol=tol)


class TestLanczos:
    def test_sparse_solve_matches_dense(self):
        A = spread_operator(400)
        band = lanczos_smallest(A, 6, dense_threshold=0)
        values, vectors = scipy.linalg.eigh(A.toarray(), subset_by_index=[0, 5])
        assert np.allclose(band.eigenvalues, values, atol=1e-9)
        assert_same_vectors(band.vectors, vectors)

    def test_shift_invert(self):
        A = spread_operator(400)
        band = lanczos_smallest(A, 4, dense_threshold=0, sigma=0.0)
        values = scipy.linalg.eigh(A.toarray(), eigvals_only=True, subset_by_index=[0, 3])
        assert np.allclose(band.eigenvalues, values, atol=1e-9)

    def test_dense_path(self):
        L = path_laplacian(30)
        band = lanczos_smallest(L, 5)
        k = np.arange(5)
        assert np.allclose(band.eigenvalues, 2 - 2 * np.cos(np.pi * k / 30), atol=1e-12)
        assert band.orthonormality_error() < 1e-12
        assert band.residuals.max() < 1e-10

    def test_signs_are_canonical(self):
        band = lanczos_smallest(path_laplacian(20), 4)
        for j in range(4):
            col = band.vectors[:, j]
            first = col[np.flatnonzero(np.abs(col) > 1e-12 * np.abs(col).max())[0]]
            assert first > 0

    def test_zero_pairs(self):
        band = lanczos_smallest(path_laplacian(10), 0)
        assert band.size == 0
        assert band.vectors.shape == (10, 0)

    def test_too_many_pairs(self):
        with pytest.raises(InvalidInputError):
            lanczos_smallest(path_laplacian(10), 11)


class TestFiedlerVector:
    def test_path_vector_is_monotone(self):
        v = fiedler_vector(path_laplacian(12))
        assert np.all(np.diff(v) < 0) or np.all(np.diff(v) > 0)
        assert np.linalg.norm(v) == pytest.approx(1.0)
        assert abs(v.sum()) < 1e-12

    def test_sparse_solver_agrees_with_dense(self):
        L = path_laplacian(40)
        dense = fiedler_vector(L)
        sparse = fiedler_vector(L, dense_threshold=0)
        assert abs(dense @ sparse) == pytest.approx(1.0, abs=1e-8)

    def test_needs_two_vertices(self):
        with pytest.raises(InvalidInputError):
            fiedler_vector(sp.csr_matrix((1, 1)))


class TestBandedProvider:
    def test_bands_follow_global_order(self):
        L = path_laplacian(60)
        provider = BandedEigenProvider(L, 12, 4)
        bands = list(provider.iter_bands())
        assert [b.size for b in bands] == [4, 4, 4]
        expected_values, expected_vectors = scipy.linalg.eigh(L.toarray(), subset_by_index=[0, 11])
        assert np.allclose(provider.eigenvalues, expected_values, atol=1e-10)
        assert_same_vectors(provider.columns(), expected_vectors)
        assert provider.warnings == []

    def test_columns_are_orthonormal(self):
        provider = BandedEigenProvider(path_laplacian(60), 10, 3)
        list(provider.iter_bands())
        V = provider.columns()
        assert V.shape == (60, 10)
        assert np.max(np.abs(V.T @ V - np.eye(10))) <= 1e-8

    def test_scaled_columns(self):
        L = path_laplacian(20)
        scale = np.linspace(1.0, 2.0, 20)
        plain = BandedEigenProvider(L, 4, 2)
        scaled = BandedEigenProvider(L, 4, 2, scale=scale)
        list(plain.iter_bands())
        list(scaled.iter_bands())
        assert np.allclose(scaled.columns(), plain.columns() * scale[:, None])

    def test_leaves_stream_in_order(self):
        tree = build_count_tree(12, 2, 1)
        provider = BandedEigenProvider(path_laplacian(40), 12, 4)
        provider.bind(tree)
        left, right = tree.leaves
        assert provider.next_band(left).shape == (40, 6)
        assert provider.computed == 6
        assert provider.next_band(right).shape == (40, 6)
        assert provider.computed == 12

    def test_skipping_a_leaf_fails(self):
        tree = build_count_tree(12, 2, 1)
        provider = BandedEigenProvider(path_laplacian(40), 12, 4)
        with pytest.raises(StreamError):
            provider.next_band(tree.leaves[1])

    def test_serving_a_leaf_twice_fails(self):
        tree = build_count_tree(12, 2, 1)
        provider = BandedEigenProvider(path_laplacian(40), 12, 4)
        provider.next_band(tree.leaves[0])
        with pytest.raises(StreamError):
            provider.next_band(tree.leaves[0])

    def test_rejects_more_columns_than_rows(self):
        with pytest.raises(InvalidInputError):
            BandedEigenProvider(path_laplacian(5), 6, 2)

    def test_deflated_operator(self, rng):
        A = spread_operator(8).toarray()
        V, _ = np.linalg.qr(rng.standard_normal((8, 2)))
        op = DeflatedOperator(A, V, 3.0)
        x = rng.standard_normal(8)
        assert np.allclose(op @ x, A @ x + 3.0 * V @ (V.T @ x))


class TestEigenbandFiles:
    def test_round_trip(self, tmp_path):
        provider = BandedEigenProvider(path_laplacian(16), 6, 4)
        bands = list(provider.iter_bands())
        path = tmp_path / "bands.bin"
        write_eigenbands(path, bands)
        loaded = read_eigenbands(path)
        assert [b.size for b in loaded] == [4, 2]
        for a, b in zip(bands, loaded):
            assert np.array_equal(a.eigenvalues, b.eigenvalues)
            assert np.array_equal(a.vectors, b.vectors)

    def test_truncated_file(self, tmp_path):
        band = EigenBand(np.array([0.0, 1.0]), np.eye(3, 2))
        path = tmp_path / "bands.bin"
        write_eigenbands(path, [band])
        path.write_bytes(path.read_bytes()[:-5])
        with pytest.raises(ContainerError):
            read_eigenbands(path)
