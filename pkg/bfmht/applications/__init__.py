# -*- coding: utf-8 -*-
"""
Pipelines built on the fast transform: inverse transform by least squares,
spectral filtering of geometry and Gaussian random fields.

Example:
    from bfmht.applications import GrfModel, SpectralDensity, grf_sample

    model = GrfModel(bf, SpectralDensity.parse("matern:nu=3,ell=0.1,var=1"))
    field = grf_sample(model, seed=7)
"""

from bfmht.applications.densities import DensityFamily, SpectralDensity
from bfmht.applications.geometry import filter_coefficients, filter_geometry, solve_geometry, synthesize_geometry
from bfmht.applications.grf import (
    GrfModel,
    covariance_matvec,
    grf_sample,
    grf_samples,
    sample_covariance,
    standard_normals,
)
from bfmht.applications.lsqr import LsqrReport, as_linear_operator, lsqr_solve

__all__ = [
    "DensityFamily",
    "GrfModel",
    "LsqrReport",
    "SpectralDensity",
    "as_linear_operator",
    "covariance_matvec",
    "filter_coefficients",
    "filter_geometry",
    "grf_sample",
    "grf_samples",
    "lsqr_solve",
    "sample_covariance",
    "solve_geometry",
    "standard_normals",
    "synthesize_geometry",
]
