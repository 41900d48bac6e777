# -*- coding: utf-8 -*-
"""
Bessel evaluation, Chebyshev coefficients, rank bounds and the ε-rank oracle.
"""
import math

import numpy as np
import pytest
from scipy import integrate, special

from bfmht.errors import DomainError, InvalidInputError
from bfmht.rank import (
    KernelDomain,
    bessel_chebyshev_coeffs,
    bessel_envelope,
    bessel_j,
    bessel_j_orders,
    bound_annulus_rank,
    bound_bessel_rank,
    bound_disk_rank,
    chebyshev_reconstruct,
    complexity_sweep,
    empirical_eps_rank,
    eps_rank_of_matrix,
    fit_power_law,
    minimize_bessel_bound,
    rank_bound_report,
    rank_study,
)
from bfmht.utils.tables import read_csv


def chebyshev_projection(k, a, b, r, ell):
    """(2/π) ∫₀^π J_k(ρ(cos τ) r) cos(ℓτ) dτ by adaptive quadrature."""

    def integrand(tau):
        rho = a + (b - a) * (math.cos(tau) + 1.0) / 2.0
        return special.jv(k, rho * r) * math.cos(ell * tau)

    value, _ = integrate.quad(integrand, 0.0, math.pi, epsabs=1e-14, epsrel=1e-13, limit=200)
    return 2.0 / math.pi * value


class TestBessel:
    def test_values_at_zero(self):
        assert bessel_j(0, 0.0) == 1.0
        assert all(bessel_j(k, 0.0) == 0.0 for k in range(1, 10))

    def test_first_zero(self):
        assert abs(bessel_j(0, 2.404825557695773)) < 1e-10

    @pytest.mark.parametrize("x", [0.05, 0.5, 0.99, 1.5, 7.3, 42.0, 250.0, 3000.0, 1e4])
    def test_matches_reference(self, x):
        orders = np.arange(0, 60)
        ours = bessel_j_orders(59, x)
        reference = special.jv(orders, x)
        assert np.allclose(ours, reference, rtol=1e-11, atol=1e-12)

    def test_small_arguments_are_relatively_accurate(self):
        x = np.array([1e-3, 0.1, 0.7])
        for k in (0, 3, 10):
            assert np.allclose(bessel_j(k, x), special.jv(k, x), rtol=1e-12, atol=0.0)

    def test_array_shape_is_kept(self):
        x = np.linspace(0.0, 20.0, 12).reshape(3, 4)
        assert bessel_j(2, x).shape == (3, 4)

    def test_envelope(self):
        for k in range(0, 30, 3):
            for x in (0.3, 2.0, 7.5, 19.0):
                value = abs(bessel_j(k, x))
                assert value <= bessel_envelope(k, x) * (1 + 1e-12)
                assert value <= bessel_envelope(k, x, xi=math.e * x / 2) * (1 + 1e-12)
                assert bessel_envelope(k, x, xi=math.e * x / 2) == pytest.approx(math.exp(math.e * x / 2 - k))

    @pytest.mark.parametrize("k, x", [(201, 1.0), (-1, 1.0), (0, -0.5), (0, 2e4), (3, float("nan"))])
    def test_out_of_envelope(self, k, x):
        with pytest.raises(DomainError):
            bessel_j(k, x)


class TestChebyshevCoefficients:
    def test_degenerate_interval(self):
        coeffs = bessel_chebyshev_coeffs(0, 1.5, 1.5, 0.7, 6)
        assert coeffs[0] == pytest.approx(2 * special.j0(1.05), rel=1e-13)
        assert np.all(coeffs[1:] == 0.0)

    def test_matches_quadrature(self):
        coeffs = bessel_chebyshev_coeffs(0, 0.0, 2.0, 1.0, 20)
        expected = [chebyshev_projection(0, 0.0, 2.0, 1.0, ell) for ell in range(21)]
        assert np.allclose(coeffs, expected, rtol=0.0, atol=1e-10)

    def test_higher_order_matches_quadrature(self):
        coeffs = bessel_chebyshev_coeffs(5, 1.0, 3.0, 2.0, 12)
        expected = [chebyshev_projection(5, 1.0, 3.0, 2.0, ell) for ell in range(13)]
        assert np.allclose(coeffs, expected, rtol=0.0, atol=1e-10)

    def test_reconstruction(self):
        a, b, r, k = 1.0, 3.0, 2.0, 5
        coeffs = bessel_chebyshev_coeffs(k, a, b, r, 40)
        rho = np.linspace(a, b, 52)[1:-1]
        assert np.allclose(chebyshev_reconstruct(coeffs, a, b, rho), bessel_j(k, rho * r), rtol=0.0, atol=1e-10)

    def test_bad_interval(self):
        with pytest.raises(DomainError):
            bessel_chebyshev_coeffs(0, 2.0, 1.0, 1.0, 4)


class TestBounds:
    def test_disk_example(self):
        assert bound_disk_rank(1.0, 1.0, 1e-3) == 60.5

    def test_disk_limit_near_one(self):
        assert bound_disk_rank(1.0, 1.0, 1 - 1e-12) == 0.5 * math.ceil(math.e + math.log(2)) ** 2

    def test_annulus_example(self):
        assert bound_annulus_rank(10.0, 1.0, 1e-3) == 651

    def test_annulus_grows_linearly_in_bR(self):
        eps = 1e-3
        first = math.ceil(2.5 + math.log(eps**-4))
        step = bound_annulus_rank(20.0, 1.0, eps) - bound_annulus_rank(10.0, 1.0, eps)
        assert step % first == 0
        assert step // first == pytest.approx(math.e / 2 * 10, abs=1)

    def test_bessel_example(self):
        # (2 + 2 log 4 + log 1e6) / log 16 = 6.70...
        assert bound_bessel_rank(0.0, 0.5, 1.0, 1e-3, 1.0) == 7

    def test_bessel_zero_width(self):
        assert bound_bessel_rank(2.0, 2.0, 3.0, 1e-3, 0.1) == 1

    def test_bessel_xi_precondition(self):
        with pytest.raises(DomainError):
            bound_bessel_rank(0.0, 0.5, 1.0, 1e-3, 0.05)

    def test_minimized_bound_is_no_worse(self):
        best, xi = minimize_bessel_bound(0.0, 0.5, 1.0, 1e-3)
        assert best <= bound_bessel_rank(0.0, 0.5, 1.0, 1e-3, 1.0)
        assert xi > 0.5 / 8

    @pytest.mark.parametrize("a, b, R", [(0.0, 0.5, 1.0), (1.0, 3.0, 2.0), (0.0, 4.0, 1.0)])
    def test_minimized_bound_matches_fine_scan(self, a, b, R):
        best, xi = minimize_bessel_bound(a, b, R, 1e-3)
        width = (b - a) * R
        scan = min(bound_bessel_rank(a, b, R, 1e-3, x) for x in np.geomspace(width / 8 * 1.001, 1e3, 4000))
        assert best <= scan
        assert best == bound_bessel_rank(a, b, R, 1e-3, xi)

    def test_minimized_bound_zero_width(self):
        assert minimize_bessel_bound(2.0, 2.0, 3.0, 1e-3) == (1, 1.0)

    @pytest.mark.parametrize("eps", [0.0, 1.0])
    def test_eps_range(self, eps):
        with pytest.raises(DomainError):
            bound_disk_rank(1.0, 1.0, eps)


class TestEmpiricalRank:
    def test_constant_matrix(self):
        assert eps_rank_of_matrix(np.ones((6, 5)), 1e-3) == (1, 1)

    def test_zero_matrix(self):
        assert eps_rank_of_matrix(np.zeros((4, 4)), 1e-3) == (0, 0)

    def test_near_constant_phase(self):
        result = empirical_eps_rank(
            "disk", KernelDomain.disk(0.01), KernelDomain.disk(0.01), 1e-3, check_convergence=False
        )
        assert result.rank == 1

    def test_circle_window(self):
        # Jacobi-Anger: |J_k(20)| stays above 1e-3 until |k| is a little past 20, for both signs of k
        result = empirical_eps_rank("circle", KernelDomain.circle(20.0), KernelDomain.circle(1.0), 1e-3)
        assert 2 * 20 - 5 <= result.rank <= 2 * 20 + 25

    def test_circle_is_below_annulus_to_disk(self):
        circle = empirical_eps_rank(
            "circle", KernelDomain.circle(5.0), KernelDomain.circle(1.0), 1e-3, check_convergence=False
        )
        annulus = empirical_eps_rank(
            "annulus", KernelDomain.annulus(4.5, 5.0), KernelDomain.disk(1.0), 1e-3, check_convergence=False
        )
        assert circle.rank <= annulus.rank

    def test_monotone_in_eps(self):
        coarse = empirical_eps_rank("disk", KernelDomain.disk(2.0), KernelDomain.disk(1.0), 1e-3, check_convergence=False)
        fine = empirical_eps_rank("disk", KernelDomain.disk(2.0), KernelDomain.disk(1.0), 1e-6, check_convergence=False)
        assert coarse.rank <= fine.rank

    def test_resolution_floor(self):
        with pytest.raises(InvalidInputError):
            empirical_eps_rank("disk", KernelDomain.disk(1.0), KernelDomain.disk(1.0), 1e-3, resolution=32)

    def test_domains_validate(self):
        with pytest.raises(InvalidInputError):
            KernelDomain.annulus(2.0, 1.0)
        with pytest.raises(InvalidInputError):
            KernelDomain.disk(0.0)

    @pytest.mark.parametrize(
        "kernel, a, b, R, order",
        [("disk", 0.0, 1.0, 1.0, 0), ("annulus", 9.5, 10.0, 1.0, 0), ("bessel", 1.0, 3.0, 2.0, 5)],
    )
    def test_bounds_dominate(self, kernel, a, b, R, order):
        report = rank_bound_report(kernel, a, b, R, 1e-3, order=order, check_convergence=False)
        assert report.passed
        assert report.as_row()["passed"] is True

    def test_unknown_kernel(self):
        with pytest.raises(DomainError):
            rank_bound_report("square", 0.0, 1.0, 1.0, 1e-3)


class TestSweeps:
    def test_power_law_fit(self):
        slope, prefactor = fit_power_law([1.0, 2.0, 4.0], [3.0, 12.0, 48.0])
        assert slope == pytest.approx(2.0)
        assert prefactor == pytest.approx(3.0)

    def test_flat_fit(self):
        assert fit_power_law([16, 64], [100, 100])[0] == pytest.approx(0.0, abs=1e-12)

    def test_fit_needs_positive_values(self):
        with pytest.raises(InvalidInputError):
            fit_power_law([1, 2], [0, 1])

    def test_complexity_sweep(self, tmp_path):
        out = tmp_path / "bench.csv"
        result = complexity_sweep([64, 256], m_ratio=25, eps=1e-3, out=out)
        assert [row["n"] for row in result.rows] == [64, 256]
        assert [row["m"] for row in result.rows] == [3, 11]
        assert np.isfinite(result.slope)
        rows = read_csv(out)
        assert list(rows[0]) == ["n", "m", "stored_entries", "dense_entries", "compression", "seconds"]
        assert rows[1]["n"] == "256"

    @pytest.mark.parametrize("sizes", [[256, 64], [64, 100], []])
    def test_sweep_rejects_sizes(self, sizes):
        with pytest.raises(InvalidInputError):
            complexity_sweep(sizes)

    def test_rank_study(self, tmp_path):
        out = tmp_path / "rank.csv"
        reports = rank_study("circle", [0.0], [2.0, 4.0], [1.0], [1e-3], out=out)
        assert len(reports) == 2
        assert all(r.passed for r in reports)
        rows = read_csv(out)
        assert [row["b"] for row in rows] == ["2.0", "4.0"]
        assert rows[0]["kernel"] == "circle"

    def test_rank_study_skips_wide_annuli(self):
        assert rank_study("annulus", [0.0], [2.0], [1.0], [1e-3]) == []
