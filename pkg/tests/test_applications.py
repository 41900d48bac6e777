# -*- coding: utf-8 -*-
"""
Least-squares inversion, spectral densities, geometry filtering and random fields.
"""
import numpy as np
import pytest

from bfmht.applications import (
    DensityFamily,
    GrfModel,
    SpectralDensity,
    as_linear_operator,
    covariance_matvec,
    filter_coefficients,
    filter_geometry,
    grf_sample,
    grf_samples,
    lsqr_solve,
    sample_covariance,
    standard_normals,
    synthesize_geometry,
)
from bfmht.butterfly import butterfly_factor
from bfmht.errors import ConfigurationError, InvalidInputError, ShapeError
from bfmht.trees import build_count_tree, torus_embedding
from bfmht.utils.tables import write_vector


def relative_error(approx, exact):
    return np.linalg.norm(approx - exact) / np.linalg.norm(exact)


class TestLsqr:
    def test_round_trip(self, small_torus, rng):
        bf = small_torus[0]
        c_true = rng.standard_normal(bf.m) + 1j * rng.standard_normal(bf.m)
        f = small_torus[3] @ c_true
        c, report = lsqr_solve(bf, f)
        assert relative_error(c, c_true) <= 1e-6
        assert report.converged
        assert report.iterations <= 200

    def test_zero_right_hand_side(self, small_torus):
        bf = small_torus[0]
        c, report = lsqr_solve(bf, np.zeros(bf.n))
        assert not np.any(c)
        assert report.converged
        assert report.iterations == 0

    def test_wrong_length(self, small_torus):
        with pytest.raises(ShapeError):
            lsqr_solve(small_torus[0], np.ones(10))

    def test_iteration_cap_is_reported(self, medium_torus, rng):
        bf = medium_torus[0]
        f = rng.standard_normal(bf.n)
        _, report = lsqr_solve(bf, f, tol=1e-15, max_iter=1)
        assert report.iterations <= 1

    def test_report_dict(self, small_torus, rng):
        bf = small_torus[0]
        _, report = lsqr_solve(bf, rng.standard_normal(bf.n))
        data = report.to_dict()
        assert list(data) == [
            "converged",
            "iterations",
            "stop_reason",
            "residual_norm",
            "normal_residual",
            "norm_estimate",
        ]

    def test_linear_operator(self, small_torus, rng):
        bf, _, _, phi = small_torus
        op = as_linear_operator(bf)
        y = rng.standard_normal(bf.n)
        assert op.shape == phi.shape
        assert relative_error(op.rmatvec(y), phi.conj().T @ y) <= 1e-6


class TestDensities:
    def test_parse_matern(self):
        S = SpectralDensity.parse("matern:nu=3,ell=0.1,var=2")
        assert S.family is DensityFamily.MATERN
        values = S(np.array([0.0, 1.0, 4.0, 9.0]))
        assert values.sum() == pytest.approx(2.0)
        assert np.all(np.diff(values) < 0)

    def test_bump(self):
        S = SpectralDensity.parse("bump:l0=5500,eta=5000,amp=6400,offset=1")
        assert S([5500.0])[0] == pytest.approx(6401.0)
        assert S([500.0])[0] == pytest.approx(1.0 + 6400.0 * np.exp(-1.0))

    def test_lowpass(self):
        S = SpectralDensity.lowpass(10.0)
        assert S([0.0, 9.99, 10.0, 11.0]).tolist() == [1.0, 1.0, 0.0, 0.0]

    def test_presets(self):
        assert str(SpectralDensity.parse("preset:smooth")) == "lowpass:cut=1000"
        assert SpectralDensity.parse("preset:surface_wave").params["l0"] == 400

    def test_table(self, tmp_path):
        path = tmp_path / "S.txt"
        write_vector(path, [1.0, 0.5, 0.25])
        S = SpectralDensity.parse(f"table:{path}")
        assert S([0.0, 1.0, 2.0]).tolist() == [1.0, 0.5, 0.25]
        with pytest.raises(ShapeError):
            S([0.0, 1.0])

    @pytest.mark.parametrize(
        "text",
        ["gauss:sigma=1", "matern:nu=3", "matern:nu=3,ell", "lowpass:cut=abc", "preset:nonexistent", "matern:nu=-1,ell=1"],
    )
    def test_bad_strings(self, text):
        with pytest.raises(InvalidInputError):
            SpectralDensity.parse(text)

    def test_negative_values_rejected(self):
        with pytest.raises(InvalidInputError):
            SpectralDensity.constant(-1.0)([0.0])

    def test_filter_coefficients(self):
        c = np.arange(4.0)
        out = filter_coefficients(c, [0.0, 1.0, 2.0, 3.0], SpectralDensity.lowpass(1.5))
        assert out.tolist() == [0.0, 1.0, 0.0, 0.0]
        block = filter_coefficients(np.ones((4, 2)), [0.0, 1.0, 2.0, 3.0], SpectralDensity.lowpass(1.5))
        assert block[:, 1].tolist() == [1.0, 1.0, 0.0, 0.0]

    def test_filter_length_mismatch(self):
        with pytest.raises(ShapeError):
            filter_coefficients(np.ones(3), [0.0, 1.0], SpectralDensity.constant())


class TestGeometry:
    def test_identity_filter_reproduces_embedding(self, small_torus):
        bf, _, cloud, _ = small_torus
        coords = torus_embedding(cloud)
        new_coords, coefficients, reports = filter_geometry(bf, coords, SpectralDensity.constant())
        assert coefficients.shape == (bf.m, 3)
        assert all(r.converged for r in reports)
        assert np.allclose(new_coords, coords, atol=1e-6)

    def test_lowpass_keeps_the_first_modes(self, small_torus):
        bf, _, cloud, _ = small_torus
        coords = torus_embedding(cloud)
        new_coords, _, _ = filter_geometry(bf, coords, SpectralDensity.lowpass(1.5))
        x1, x2 = cloud.points[:, 0], cloud.points[:, 1]
        expected = np.column_stack([2 * np.cos(x1), 2 * np.sin(x1), np.sin(x2)])
        assert np.allclose(new_coords, expected, atol=1e-6)

    def test_new_filter_from_stored_coefficients(self, small_torus):
        bf, _, cloud, _ = small_torus
        coords = torus_embedding(cloud)
        _, coefficients, _ = filter_geometry(bf, coords, SpectralDensity.constant())
        again = synthesize_geometry(bf, coefficients, SpectralDensity.constant(2.0))
        assert np.allclose(again, 2 * coords, atol=1e-6)

    def test_coordinate_rows_must_match(self, small_torus):
        with pytest.raises(ShapeError):
            filter_geometry(small_torus[0], np.zeros((10, 3)), SpectralDensity.constant())


class TestRandomFields:
    def test_normals_are_reproducible(self):
        assert np.array_equal(standard_normals(7, 3, 11), standard_normals(7, 3, 11))
        assert not np.array_equal(standard_normals(7, 3, 11), standard_normals(7, 4, 11))
        assert standard_normals(7, 0, 5).shape == (5,)

    def test_normals_are_standard(self):
        z = standard_normals(1, 0, 200_000)
        assert abs(z.mean()) < 0.01
        assert z.var() == pytest.approx(1.0, abs=0.01)

    def test_sample_is_bitwise_reproducible(self, small_torus):
        model = GrfModel(small_torus[0], SpectralDensity.parse("preset:matern"))
        assert np.array_equal(grf_sample(model, seed=5, index=2), grf_sample(model, seed=5, index=2))
        assert not np.array_equal(grf_sample(model, seed=5), grf_sample(model, seed=6))

    def test_batch_matches_single_samples(self, small_torus):
        model = GrfModel(small_torus[0], SpectralDensity.parse("preset:matern"))
        batch = grf_samples(model, seed=9, count=4, start=10)
        assert batch.shape == (4, 256)
        for i in range(4):
            assert np.allclose(batch[i], grf_sample(model, 9, 10 + i), rtol=1e-12, atol=1e-12)

    def test_zero_spectrum_gives_zero_field(self, small_torus):
        model = GrfModel(small_torus[0], SpectralDensity.constant(0.0))
        assert not np.any(grf_sample(model, seed=1))

    def test_covariance_matches_dense(self, small_torus, rng):
        bf, basis, _, phi = small_torus
        model = GrfModel(bf, SpectralDensity.matern(1.0, 0.5))
        v = rng.standard_normal(bf.n)
        dense = phi @ (model.density(basis.eigenvalues) * (phi.conj().T @ v))
        assert relative_error(covariance_matvec(model, v), dense) <= 1e-6

    def test_covariance_is_hermitian(self, small_torus, rng):
        model = GrfModel(small_torus[0], SpectralDensity.matern(1.0, 0.5))
        u, v = rng.standard_normal(256), rng.standard_normal(256)
        lhs = np.vdot(u, covariance_matvec(model, v))
        rhs = np.vdot(covariance_matvec(model, u), v)
        assert abs(lhs - rhs) <= 1e-10 * abs(lhs)

    def test_sample_covariance(self, rng):
        samples = rng.standard_normal((4000, 3))
        estimates, errors = sample_covariance(samples, [(0, 0), (0, 1)])
        assert abs(estimates[0] - 1.0) < 4 * errors[0]
        assert abs(estimates[1]) < 4 * errors[1]

    def test_model_needs_eigenvalues(self, rng):
        bf = butterfly_factor(rng.standard_normal((8, 4)), build_count_tree(8, 2, 1), build_count_tree(4, 2, 1), 1e-6)
        with pytest.raises(ConfigurationError):
            GrfModel(bf, SpectralDensity.constant())
        with pytest.raises(ShapeError):
            GrfModel(bf, SpectralDensity.constant(), eigenvalues=[0.0, 1.0])
        assert GrfModel(bf, SpectralDensity.constant(), eigenvalues=[0.0, 1.0, 2.0, 3.0]).spectrum.tolist() == [1.0] * 4
