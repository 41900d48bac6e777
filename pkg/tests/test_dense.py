# -*- coding: utf-8 -*-
"""
Low-rank primitives.
"""
import numpy as np
import pytest

from bfmht.errors import IndexRangeError, InvalidInputError, ShapeError
from bfmht.linalg import (
    LowRankFactor,
    low_rank_factor,
    read_dense_text,
    relative_error,
    restrict_rows,
    stack_columns,
    write_dense_text,
)


class TestLowRankFactor:
    def test_outer_product_is_rank_one(self, rng):
        u = rng.standard_normal(12) + 1j * rng.standard_normal(12)
        v = rng.standard_normal(7)
        f = low_rank_factor(np.outer(u, v), 1e-6)
        assert f.rank == 1

    def test_identity_is_full_rank(self):
        assert low_rank_factor(np.eye(8), 1e-6).rank == 8

    def test_smooth_exponential_has_low_rank(self):
        w = np.linspace(0, 1, 64)
        x = np.linspace(0, 1, 64)
        f = low_rank_factor(np.exp(1j * np.outer(x, w)), 1e-10)
        assert f.rank <= 10

    def test_zero_matrix_gives_rank_zero(self):
        f = low_rank_factor(np.zeros((5, 3)), 1e-6)
        assert f.rank == 0
        assert f.left.shape == (5, 0) and f.right.shape == (3, 0)
        assert np.array_equal(f.to_dense(), np.zeros((5, 3)))

    @pytest.mark.parametrize("tol", [1e-2, 1e-4, 1e-8])
    def test_error_within_tolerance(self, rng, tol):
        A = rng.standard_normal((40, 30)) @ np.diag(0.5 ** np.arange(30)) @ rng.standard_normal((30, 30))
        f = low_rank_factor(A, tol, check=True)
        assert np.linalg.norm(A - f.to_dense()) <= tol * np.linalg.norm(A) * (1 + 1e-8)

    def test_left_columns_have_unit_norm(self, rng):
        f = low_rank_factor(rng.standard_normal((20, 10)), 1e-3)
        assert np.allclose(np.linalg.norm(f.left, axis=0), 1.0)

    def test_rank_is_monotone_in_tolerance(self, rng):
        A = rng.standard_normal((30, 30)) @ np.diag(0.7 ** np.arange(30))
        ranks = [low_rank_factor(A, tol).rank for tol in (1e-8, 1e-5, 1e-3, 1e-1)]
        assert ranks == sorted(ranks, reverse=True)

    def test_deterministic(self, rng):
        A = rng.standard_normal((25, 18))
        f1, f2 = low_rank_factor(A, 1e-4), low_rank_factor(A, 1e-4)
        assert np.array_equal(f1.left, f2.left) and np.array_equal(f1.right, f2.right)

    @pytest.mark.parametrize(
        "A,tol",
        [
            (np.array([[1.0, np.nan]]), 1e-3),
            (np.zeros((0, 3)), 1e-3),
            (np.eye(3), 0.0),
            (np.eye(3), 1.0),
        ],
    )
    def test_rejects_bad_input(self, A, tol):
        with pytest.raises(InvalidInputError):
            low_rank_factor(A, tol)

    def test_rank_mismatch(self):
        with pytest.raises(ShapeError):
            LowRankFactor(np.zeros((3, 2)), np.zeros((4, 1)))


class TestStackAndRestrict:
    def test_stack_in_order(self):
        a = LowRankFactor(np.array([[1.0], [2.0]]), np.ones((3, 1)))
        b = LowRankFactor(np.array([[3.0], [4.0]]), np.ones((5, 1)))
        assert np.array_equal(stack_columns(a, b), [[1.0, 3.0], [2.0, 4.0]])

    def test_stack_skips_rank_zero(self, rng):
        a = LowRankFactor(np.zeros((4, 0)), np.zeros((2, 0)))
        b = LowRankFactor(rng.standard_normal((4, 2)), rng.standard_normal((3, 2)))
        assert np.array_equal(stack_columns(a, b), b.left)

    def test_stack_row_mismatch(self):
        with pytest.raises(ShapeError):
            stack_columns(np.zeros((3, 1)), np.zeros((4, 1)))

    def test_restriction_commutes_with_stacking(self, rng):
        a, b = rng.standard_normal((16, 3)), rng.standard_normal((16, 3))
        idx = rng.permutation(16)[:7]
        assert np.array_equal(restrict_rows(stack_columns(a, b), idx), stack_columns(a[idx], b[idx]))

    def test_restrict_identity_and_single_row(self):
        A = np.arange(6.0).reshape(3, 2)
        assert np.array_equal(restrict_rows(A, [0, 1, 2]), A)
        assert np.array_equal(restrict_rows(A, [1]), [[2.0, 3.0]])

    def test_restrict_composes(self, rng):
        A = rng.standard_normal((10, 4))
        i, j = np.array([9, 2, 5, 7, 0]), np.array([4, 1, 3])
        assert np.array_equal(restrict_rows(restrict_rows(A, i), j), restrict_rows(A, i[j]))

    @pytest.mark.parametrize("idx", [[3], [-1], [0, 0]])
    def test_restrict_bad_index(self, idx):
        with pytest.raises(IndexRangeError):
            restrict_rows(np.zeros((3, 2)), idx)


def test_dense_text_keeps_values(tmp_path, rng):
    A = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
    path = tmp_path / "a.txt"
    write_dense_text(path, A)
    assert path.read_text().splitlines()[0] == "4 3"
    assert np.array_equal(read_dense_text(path), A)
    B = rng.standard_normal((2, 5))
    write_dense_text(path, B)
    back = read_dense_text(path)
    assert back.dtype == np.float64 and np.array_equal(back, B)


def test_relative_error():
    assert relative_error(np.array([1.0, 1.0]), np.array([1.0, 0.0])) == pytest.approx(1.0)
    assert relative_error(np.ones(3), np.zeros(3)) == pytest.approx(np.sqrt(3))
