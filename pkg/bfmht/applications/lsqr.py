# -*- coding: utf-8 -*-
"""
Inverse transform: least-squares coefficients from function values.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np
from scipy.sparse.linalg import LinearOperator, lsqr

from bfmht.butterfly.apply import bf_apply, bf_apply_adjoint, estimate_norm
from bfmht.butterfly.factor import ButterflyFactor
from bfmht.errors import ShapeError

logger = logging.getLogger(__name__)

MODULE = "applications"

_STOP_REASONS = {
    0: "x = 0 is the exact solution",
    1: "residual small enough",
    2: "least-squares solution found",
    3: "condition number too large",
    4: "residual small enough (machine precision)",
    5: "least-squares solution found (machine precision)",
    6: "condition number too large (machine precision)",
    7: "iteration limit reached",
}

MAX_RESTARTS = 4


@dataclass
class LsqrReport:
    """
    Attributes:
        converged: ``normal_residual <= tol``
        iterations: LSQR iterations over all restarts
        stop_reason: reason reported by the last LSQR run
        residual_norm: ``‖Φc − f‖``
        normal_residual: ``‖Φ^*(Φc − f)‖ / (‖Φ‖_est ‖Φc − f‖)``
        norm_estimate: ``‖Φ‖_est`` from power iteration
    """

    converged: bool
    iterations: int
    stop_reason: str
    residual_norm: float
    normal_residual: float
    norm_estimate: float

    def to_dict(self) -> Dict:
        from bfmht.schemas import LsqrReportSchema, sanitize

        return sanitize(LsqrReportSchema().dump(self))


def as_linear_operator(bf: ButterflyFactor, dtype=None) -> LinearOperator:
    """The factorization as a scipy ``LinearOperator`` with its adjoint."""
    dtype = dtype or bf.dtype
    return LinearOperator(
        bf.shape,
        matvec=lambda c: bf_apply(bf, np.ravel(c)),
        rmatvec=lambda y: bf_apply_adjoint(bf, np.ravel(y)),
        matmat=lambda C: bf_apply(bf, C),
        rmatmat=lambda Y: bf_apply_adjoint(bf, Y),
        dtype=dtype,
    )


def _normal_residual(bf: ButterflyFactor, c: np.ndarray, f: np.ndarray, norm: float) -> Tuple[float, float]:
    r = bf_apply(bf, c) - f
    rnorm = float(np.linalg.norm(r))
    if rnorm == 0.0 or norm == 0.0:
        return rnorm, 0.0
    return rnorm, float(np.linalg.norm(bf_apply_adjoint(bf, r)) / (norm * rnorm))


def lsqr_solve(
    bf: ButterflyFactor,
    f,
    tol: float = 1e-8,
    max_iter: int = 200,
    norm_estimate: Optional[float] = None,
) -> Tuple[np.ndarray, LsqrReport]:
    """
    ``argmin_c ‖Φc − f‖`` by LSQR on the factorization.

    The run stops once ``‖Φ^*(Φc − f)‖ / (‖Φ‖_est ‖Φc − f‖) ≤ tol`` or after
    ``max_iter`` iterations. LSQR's own test uses a growing Frobenius-norm
    estimate, so the run is restarted from its last iterate with tighter
    tolerances while the test above fails and iterations remain.

    Returns:
        ``(c, report)``; a run that hits ``max_iter`` is flagged
        ``converged=False`` rather than raising

    Raises:
        ShapeError: ``f`` does not have n entries
    """
    f = np.asarray(f)
    if f.ndim != 1 or f.shape[0] != bf.n:
        raise ShapeError(f"expected {bf.n} values, got shape {f.shape}", module=MODULE)
    dtype = np.result_type(bf.dtype, f.dtype, np.float64)
    f = f.astype(dtype, copy=False)
    norm = estimate_norm(bf) if norm_estimate is None else norm_estimate
    c = np.zeros(bf.m, dtype=dtype)
    if not np.any(f):
        report = LsqrReport(True, 0, _STOP_REASONS[0], 0.0, 0.0, norm)
        return c, report

    op = as_linear_operator(bf, dtype)
    iterations, atol, istop = 0, tol, 7
    rnorm, metric = _normal_residual(bf, c, f, norm)
    for _ in range(MAX_RESTARTS + 1):
        remaining = max_iter - iterations
        if remaining <= 0:
            break
        result = lsqr(op, f, atol=atol, btol=atol, iter_lim=remaining, x0=c if iterations else None)
        c, istop, itn = result[0], result[1], result[2]
        iterations += itn
        rnorm, metric = _normal_residual(bf, c, f, norm)
        logger.debug(f"lsqr: {iterations} iterations, normal residual {metric:.3e}, stop {istop}")
        if metric <= tol or istop in (0, 1, 4) or itn == 0:
            break
        atol /= 10.0

    converged = metric <= tol or istop in (0, 1, 4)
    report = LsqrReport(converged, iterations, _STOP_REASONS.get(istop, str(istop)), rnorm, metric, norm)
    if not converged:
        logger.warning(
            f"LSQR did not converge in {iterations} iterations: normal residual {metric:.3e} > {tol:.1e}"
        )
    else:
        logger.info(f"LSQR converged in {iterations} iterations, residual {rnorm:.3e}")
    return c, report
