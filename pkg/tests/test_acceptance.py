# -*- coding: utf-8 -*-
"""
Desk-scale runs of the full pipelines. Each takes minutes; run them with
``pytest -m slow``.
"""
import numpy as np
import pytest

from bfmht.applications import GrfModel, SpectralDensity, grf_samples, lsqr_solve
from bfmht.butterfly import bf_apply, bf_apply_adjoint, butterfly_factor, estimate_norm, factor_dense_streaming
from bfmht.eigenmaps import eigenmaps_factorization
from bfmht.graph import default_heat_scale, grid_graph, heat_kernel_graph
from bfmht.rank import bessel_chebyshev_coeffs, bessel_j, chebyshev_reconstruct, complexity_sweep, rank_bound_report
from bfmht.torus import direct_mht, m_for_ratio, torus_dense_matrix, torus_factorization, torus_trees
from bfmht.trees import build_fiedler_tree, noisy_sphere

from .test_rank import chebyshev_projection

pytestmark = pytest.mark.slow


def relative_error(approx, exact):
    return np.linalg.norm(approx - exact) / np.linalg.norm(exact)


def complex_normal(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


@pytest.mark.parametrize("eps", [1e-2, 1e-4, 1e-6])
def test_error_follows_tolerance(eps):
    n = 256**2
    m = m_for_ratio(n, 25)
    assert m == 2622
    bf, basis, cloud = torus_factorization(256, m, eps)
    rng = np.random.default_rng(1)
    rows = np.sort(rng.choice(n, size=2000, replace=False))
    for _ in range(5):
        c = complex_normal(rng, m)
        exact = direct_mht(basis, cloud, c, rows=rows)
        assert relative_error(bf_apply(bf, c)[rows], exact) <= 10 * eps


def test_memory_scaling_and_compression():
    result = complexity_sweep([4**6, 4**7, 4**8, 4**9], m_ratio=25, eps=1e-3)
    assert 1.3 <= result.slope <= 1.7
    last = result.rows[-1]
    assert last["stored_entries"] <= last["dense_entries"] / 4


def test_streaming_build_matches_standard_build():
    eps = 1e-3
    side = 2**7
    m = m_for_ratio(side**2, 25)
    streamed, basis, cloud = torus_factorization(side, m, eps, streaming=True)
    standard, _, _ = torus_factorization(side, m, eps, streaming=False)
    rng = np.random.default_rng(2)
    c = complex_normal(rng, m)
    direct = direct_mht(basis, cloud, c)
    assert np.linalg.norm(bf_apply(streamed, c) - bf_apply(standard, c)) <= 10 * eps * np.linalg.norm(direct)
    stats = streamed.stats
    assert stats.peak_entries <= 3 * stats.final_entries + stats.max_band_entries


@pytest.mark.parametrize("eps", [1e-3, 1e-6])
@pytest.mark.parametrize("bR", [1.0, 5.0, 10.0, 20.0, 40.0])
def test_disk_rank_bound(bR, eps):
    assert rank_bound_report("disk", 0.0, bR, 1.0, eps).passed


@pytest.mark.parametrize("a, b, R", [(4.5, 5.0, 1.0), (9.5, 10.0, 1.0), (19.2, 20.0, 1.0), (0.5, 1.0, 1.5)])
def test_annulus_rank_bound(a, b, R):
    assert rank_bound_report("annulus", a, b, R, 1e-3).passed


@pytest.mark.parametrize("k", [0, 5, 10])
@pytest.mark.parametrize("a, b, R", [(1.0, 3.0, 2.0), (0.0, 4.0, 1.0), (5.0, 5.5, 4.0)])
def test_bessel_rank_bound(k, a, b, R):
    assert rank_bound_report("bessel", a, b, R, 1e-3, order=k).passed


@pytest.mark.parametrize("k", [0, 1, 5, 10])
@pytest.mark.parametrize("a, b, r", [(0.0, 2.0, 1.0), (1.0, 3.0, 2.0), (5.0, 5.5, 4.0)])
def test_bessel_chebyshev_coefficients(k, a, b, r):
    coeffs = bessel_chebyshev_coeffs(k, a, b, r, 30)
    expected = [chebyshev_projection(k, a, b, r, ell) for ell in range(31)]
    assert np.allclose(coeffs, expected, rtol=0.0, atol=1e-10)
    rho = np.linspace(a, b, 52)[1:-1]
    assert np.allclose(chebyshev_reconstruct(coeffs, a, b, rho), bessel_j(k, rho * r), rtol=0.0, atol=1e-10)


def test_inverse_transform_round_trip():
    bf, basis, cloud = torus_factorization(128, 655, 1e-6)
    rng = np.random.default_rng(3)
    c_true = complex_normal(rng, 655)
    c, report = lsqr_solve(bf, direct_mht(basis, cloud, c_true))
    assert relative_error(c, c_true) <= 1e-4
    assert report.iterations <= 200


def test_random_field_covariance():
    bf, basis, cloud = torus_factorization(32, 64, 1e-8, space_leaf_size=16, freq_leaf_size=8)
    model = GrfModel(bf, SpectralDensity.matern(1.0, 0.5))
    phi = torus_dense_matrix(basis, cloud)
    pairs = [(0, 0), (0, 1), (5, 500), (100, 900), (1023, 512)]
    exact = np.array([phi[i] @ (model.spectrum * phi[j].conj()) for i, j in pairs])

    count, chunk = 20_000, 2_000
    products = np.empty((count, len(pairs)), dtype=np.complex128)
    for start in range(0, count, chunk):
        Y = grf_samples(model, seed=11, count=chunk, start=start)
        for k, (i, j) in enumerate(pairs):
            products[start : start + chunk, k] = Y[:, i] * np.conj(Y[:, j])
    estimates = products.mean(axis=0)
    errors = np.sqrt(np.mean(np.abs(products - estimates) ** 2, axis=0) / count)
    assert np.all(np.abs(estimates - exact) <= 3 * errors)

    again = grf_samples(model, seed=11, count=3, start=0)
    assert np.array_equal(again, grf_samples(model, seed=11, count=3, start=0))


def test_fiedler_balance_on_grid():
    _, report = build_fiedler_tree(grid_graph(64), 256)
    assert report.splits
    assert report.all_balanced
    assert report.min_fraction() >= 0.35


def test_fiedler_balance_on_sphere():
    cloud = noisy_sphere(10_000, sigma=0.01, seed=5)
    K = heat_kernel_graph(cloud, default_heat_scale(cloud), 1e-4)
    _, report = build_fiedler_tree(K, 256)
    assert report.all_balanced


def test_eigenmaps_on_noisy_sphere():
    eps = 1e-3
    n, m = 10_000, 200
    result = eigenmaps_factorization(noisy_sphere(n, sigma=0.01, seed=5), m, eps)
    assert result.orthonormality_error() <= 1e-8
    bf = result.factorization
    assert bf.stored_entries < n * m
    phi = result.eigenvectors()
    rng = np.random.default_rng(4)
    c = rng.standard_normal(m)
    assert relative_error(bf_apply(bf, c), phi @ c) <= 10 * eps


@pytest.mark.parametrize("side, m, eps", [(16, 24, 1e-9), (64, 164, 1e-3), (64, 164, 1e-6)])
def test_adjoint_identity(side, m, eps):
    bf, basis, cloud = torus_factorization(side, m, eps)
    space, freq = torus_trees(cloud, basis, space_leaf_size=64, freq_leaf_size=16)
    dense = torus_dense_matrix(basis, cloud)
    factors = [bf, butterfly_factor(dense, space, freq, eps), factor_dense_streaming(dense, space, freq, eps)]
    rng = np.random.default_rng(6)
    for f in factors:
        c, y = complex_normal(rng, f.m), complex_normal(rng, f.n)
        gap = abs(np.vdot(y, bf_apply(f, c)) - np.vdot(bf_apply_adjoint(f, y), c))
        assert gap <= 1e-10 * np.linalg.norm(c) * np.linalg.norm(y) * estimate_norm(f)
