# -*- coding: utf-8 -*-
"""
Spectral filtering of surface geometry.

The vertex coordinates are three functions on the surface. Each is expanded
in the eigenbasis by least squares, its coefficients are scaled by a filter
``F(λ)``, and the filtered coefficients are mapped back to coordinates.
"""

from __future__ import annotations

import logging
from typing import List, Optional, Tuple

import numpy as np

from bfmht.applications.densities import SpectralDensity
from bfmht.applications.lsqr import LsqrReport, lsqr_solve
from bfmht.butterfly.apply import bf_apply, estimate_norm
from bfmht.butterfly.factor import ButterflyFactor
from bfmht.errors import ConfigurationError, ShapeError

logger = logging.getLogger(__name__)

MODULE = "applications"


def filter_coefficients(c, eigenvalues, F: SpectralDensity) -> np.ndarray:
    """
    ``c_k ↦ F(λ_k) c_k``; ``c`` may hold several coefficient columns.

    Raises:
        ShapeError: lengths differ
    """
    c = np.asarray(c)
    lam = np.asarray(eigenvalues, dtype=np.float64).ravel()
    if c.shape[0] != lam.size:
        raise ShapeError(f"{c.shape[0]} coefficients for {lam.size} eigenvalues", module=MODULE)
    gain = F(lam)
    return gain * c if c.ndim == 1 else gain[:, None] * c


def _eigenvalues(bf: ButterflyFactor, eigenvalues) -> np.ndarray:
    lam = bf.eigenvalues if eigenvalues is None else np.asarray(eigenvalues, dtype=np.float64)
    if lam is None:
        raise ConfigurationError("filtering needs the eigenvalue of every column", module=MODULE)
    return lam


def _check_coords(bf: ButterflyFactor, coords) -> np.ndarray:
    coords = np.asarray(coords, dtype=np.float64)
    if coords.ndim != 2 or coords.shape[0] != bf.n:
        raise ShapeError(f"expected {bf.n} coordinate rows, got shape {coords.shape}", module=MODULE)
    return coords


def solve_geometry(
    bf: ButterflyFactor,
    coords,
    tol: float = 1e-8,
    max_iter: int = 200,
) -> Tuple[np.ndarray, List[LsqrReport]]:
    """
    Expansion coefficients of every coordinate column.

    Returns:
        ``(m × d coefficients, one LSQR report per column)``
    """
    coords = _check_coords(bf, coords)
    norm = estimate_norm(bf)
    columns, reports = [], []
    for axis in range(coords.shape[1]):
        c, report = lsqr_solve(bf, coords[:, axis], tol=tol, max_iter=max_iter, norm_estimate=norm)
        columns.append(c)
        reports.append(report)
    return np.column_stack(columns), reports


def synthesize_geometry(
    bf: ButterflyFactor,
    coefficients,
    F: Optional[SpectralDensity] = None,
    eigenvalues=None,
) -> np.ndarray:
    """
    Coordinates from (optionally filtered) coefficients; imaginary parts
    from complex bases are dropped.
    """
    coefficients = np.asarray(coefficients)
    if F is not None:
        coefficients = filter_coefficients(coefficients, _eigenvalues(bf, eigenvalues), F)
    return np.real(bf_apply(bf, coefficients))


def filter_geometry(
    bf: ButterflyFactor,
    coords,
    F: SpectralDensity,
    tol: float = 1e-8,
    max_iter: int = 200,
    eigenvalues=None,
) -> Tuple[np.ndarray, np.ndarray, List[LsqrReport]]:
    """
    Solve, filter and resynthesize the coordinate functions.

    Returns:
        ``(new coordinates, unfiltered coefficients, LSQR reports)``; keep the
        coefficients to try further filters with :func:`synthesize_geometry`
    """
    lam = _eigenvalues(bf, eigenvalues)
    coefficients, reports = solve_geometry(bf, coords, tol=tol, max_iter=max_iter)
    if not all(r.converged for r in reports):
        logger.warning("some coordinate solves did not converge; the filtered geometry may be inaccurate")
    new_coords = synthesize_geometry(bf, coefficients, F, lam)
    logger.info(f"filtered {coefficients.shape[1]} coordinate functions with {F}")
    return new_coords, coefficients, reports
