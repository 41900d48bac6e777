# -*- coding: utf-8 -*-
"""
Torus eigenbasis, direct summation and the factored torus transform.
"""
import numpy as np
import pytest

from bfmht.butterfly import bf_apply
from bfmht.errors import InvalidInputError, ShapeError
from bfmht.torus import (
    TORUS_AREA,
    direct_mht,
    m_for_ratio,
    torus_basis,
    torus_dense_matrix,
    torus_factorization,
    torus_provider,
    weyl_count,
    weyl_eigenvalue,
)
from bfmht.trees import build_frequency_tree


def relative_error(approx, exact):
    return np.linalg.norm(approx - exact) / np.linalg.norm(exact)


class TestBasis:
    def test_first_modes(self):
        basis = torus_basis(5)
        assert basis.modes.tolist() == [[0, 0], [-1, 0], [0, -1], [0, 1], [1, 0]]
        assert basis.eigenvalues.tolist() == [0.0, 1.0, 1.0, 1.0, 1.0]

    def test_eigenvalues_ascend(self):
        lam = torus_basis(500).eigenvalues
        assert np.all(np.diff(lam) >= 0)
        assert np.array_equal(lam, np.sum(torus_basis(500).modes ** 2, axis=1))

    def test_counts_follow_the_lattice(self):
        # 317 lattice points lie in the closed disk of radius 10
        lam = torus_basis(400).eigenvalues
        assert np.count_nonzero(lam <= 100) == 317
        assert weyl_count(TORUS_AREA, 100.0) == pytest.approx(100 * np.pi)

    def test_weyl_inverse(self):
        assert weyl_count(TORUS_AREA, weyl_eigenvalue(TORUS_AREA, 250)) == pytest.approx(250)

    def test_needs_a_mode(self):
        with pytest.raises(InvalidInputError):
            torus_basis(0)

    @pytest.mark.parametrize("n, ratio, m", [(256, 25, 11), (4096, 25, 164), (10, 100, 1), (100, 4, 25)])
    def test_m_for_ratio(self, n, ratio, m):
        assert m_for_ratio(n, ratio) == m

    def test_ratio_must_be_positive(self):
        with pytest.raises(InvalidInputError):
            m_for_ratio(100, 0)


class TestDirect:
    def test_matches_dense_product(self, grid8, rng):
        basis = torus_basis(10)
        c = rng.standard_normal(10) + 1j * rng.standard_normal(10)
        expected = torus_dense_matrix(basis, grid8) @ c
        assert np.allclose(direct_mht(basis, grid8, c), expected, rtol=1e-13, atol=1e-12)

    def test_row_subset(self, grid8, rng):
        basis = torus_basis(6)
        c = rng.standard_normal(6)
        full = direct_mht(basis, grid8, c)
        assert np.allclose(direct_mht(basis, grid8, c, rows=[3, 0, 17]), full[[3, 0, 17]], rtol=1e-14, atol=1e-13)

    def test_constant_mode(self, cloud):
        f = direct_mht(torus_basis(1), cloud, [2.0])
        assert np.allclose(f, 2.0)

    def test_coefficient_length(self, grid8):
        with pytest.raises(ShapeError):
            direct_mht(torus_basis(4), grid8, np.ones(5))

    def test_points_must_be_planar(self):
        with pytest.raises(ShapeError):
            direct_mht(torus_basis(2), np.zeros((3, 3)), np.ones(2))


class TestFactorization:
    def test_streaming_and_standard_agree(self, small_torus, rng):
        bf, _, _, phi = small_torus
        standard, _, _ = torus_factorization(16, 24, 1e-9, space_leaf_size=16, freq_leaf_size=4, streaming=False)
        c = rng.standard_normal(24) + 1j * rng.standard_normal(24)
        assert np.allclose(bf_apply(standard, c), bf_apply(bf, c), rtol=1e-12, atol=1e-12)

    def test_medium_accuracy(self, medium_torus, rng):
        bf, _, _, phi = medium_torus
        c = rng.standard_normal(bf.m) + 1j * rng.standard_normal(bf.m)
        assert relative_error(bf_apply(bf, c), phi @ c) <= 1e-4

    def test_fiedler_space_tree(self, rng):
        bf, basis, cloud = torus_factorization(
            16, 24, 1e-9, space_leaf_size=16, freq_leaf_size=4, tree="fiedler"
        )
        assert bf.space_tree.arity == 2
        assert bf.freq_tree.arity == 4
        assert bf.space_tree.depth == bf.freq_tree.depth
        c = rng.standard_normal(24) + 1j * rng.standard_normal(24)
        assert relative_error(bf_apply(bf, c), torus_dense_matrix(basis, cloud) @ c) <= 1e-6

    def test_fiedler_needs_the_grid(self, cloud):
        with pytest.raises(InvalidInputError):
            torus_factorization(16, 8, 1e-6, points=cloud, tree="fiedler")

    def test_unknown_tree(self):
        with pytest.raises(InvalidInputError):
            torus_factorization(8, 4, 1e-6, tree="octree")

    def test_scattered_points(self, cloud, rng):
        bf, basis, _ = torus_factorization(0, 12, 1e-8, points=cloud, space_leaf_size=16, freq_leaf_size=4)
        assert bf.n == cloud.n
        c = rng.standard_normal(12)
        assert relative_error(bf_apply(bf, c), direct_mht(basis, cloud, c)) <= 1e-6

    def test_provider_checks_the_tree(self):
        basis = torus_basis(8)
        provider = torus_provider(basis, np.zeros((4, 2)), build_frequency_tree(basis.eigenvalues, 2, 1))
        assert provider.m == 8
        assert np.array_equal(provider.eigenvalues, basis.eigenvalues)
