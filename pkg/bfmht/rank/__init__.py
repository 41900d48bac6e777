# -*- coding: utf-8 -*-
"""
Rank analysis of the Fourier kernel: Bessel functions, Chebyshev
coefficients, closed-form ε-rank bounds and the empirical ε-ranks that
check them.

Example:
    from bfmht.rank import bound_disk_rank, rank_bound_report

    report = rank_bound_report("disk", 0.0, 1.0, 5.0, 1e-3)
    assert report.empirical <= bound_disk_rank(1.0, 5.0, 1e-3)
"""

from bfmht.rank.bessel import (
    bessel_chebyshev_coeffs,
    bessel_envelope,
    bessel_j,
    bessel_j_orders,
    bessel_j_table,
    chebyshev_reconstruct,
)
from bfmht.rank.bounds import bound_annulus_rank, bound_bessel_rank, bound_disk_rank, minimize_bessel_bound
from bfmht.rank.empirical import (
    EpsRankResult,
    KernelDomain,
    RankBoundReport,
    empirical_eps_rank,
    eps_rank_of_matrix,
    fit_power_law,
    kernel_matrix,
    rank_bound_report,
)
from bfmht.rank.sweep import SweepResult, complexity_sweep, rank_study

__all__ = [
    "EpsRankResult",
    "KernelDomain",
    "RankBoundReport",
    "SweepResult",
    "bessel_chebyshev_coeffs",
    "bessel_envelope",
    "bessel_j",
    "bessel_j_orders",
    "bessel_j_table",
    "bound_annulus_rank",
    "bound_bessel_rank",
    "bound_disk_rank",
    "chebyshev_reconstruct",
    "complexity_sweep",
    "empirical_eps_rank",
    "eps_rank_of_matrix",
    "fit_power_law",
    "kernel_matrix",
    "minimize_bessel_bound",
    "rank_bound_report",
    "rank_study",
]
