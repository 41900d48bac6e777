# -*- coding: utf-8 -*-
"""
Sparse symmetric graph matrices: heat-kernel graphs, graph Laplacians and
the normalized operator of the Laplacian-eigenmaps eigenproblem.

All matrices are ``scipy.sparse.csr_matrix`` with both triangles stored.
"""

from __future__ import annotations

import logging
from os import PathLike
from typing import Tuple, Union

import numpy as np
import scipy.io
import scipy.sparse as sp
from sklearn.neighbors import NearestNeighbors

from bfmht.errors import InvalidInputError, IsolatedVertexError, ShapeError
from bfmht.trees.points import PointCloud

logger = logging.getLogger(__name__)

MODULE = "spectral-graph"

# heat scale t = HEAT_SCALE_FACTOR · d_med² · √n, i.e. t ∝ n^(-1/4) for a
# surface sampled at n points with median neighbour distance d_med ∝ n^(-1/2)
HEAT_SCALE_FACTOR = 0.25


def _as_points(points) -> np.ndarray:
    return points.points if isinstance(points, PointCloud) else PointCloud(points).points


def check_symmetric(A: sp.spmatrix, rtol: float = 1e-14) -> float:
    """Largest asymmetry relative to the largest entry; raises above ``rtol``."""
    A = sp.csr_matrix(A)
    if A.shape[0] != A.shape[1]:
        raise ShapeError(f"matrix must be square, got {A.shape}", module=MODULE)
    scale = abs(A).max() if A.nnz else 0.0
    asym = abs(A - A.T).max() if A.nnz else 0.0
    rel = float(asym / scale) if scale > 0 else 0.0
    if rel > rtol:
        raise InvalidInputError(f"matrix is not symmetric (relative asymmetry {rel:.2e})", module=MODULE)
    if A.nnz and not np.all(np.isfinite(A.data)):
        raise InvalidInputError("matrix has non-finite entries", module=MODULE)
    return rel


def default_heat_scale(points, factor: float = HEAT_SCALE_FACTOR) -> float:
    """
    Heat-kernel scale ``t = c · n^(-1/4)`` with ``c = factor · d_med² · n^(3/4)``.

    ``d_med`` is the median nearest-neighbour distance of the cloud.
    """
    X = _as_points(points)
    n = X.shape[0]
    if n < 2:
        raise InvalidInputError("need at least two points to calibrate the heat scale", module=MODULE)
    dist, _ = NearestNeighbors(n_neighbors=2).fit(X).kneighbors(X)
    d_med = float(np.median(dist[:, 1]))
    if d_med == 0.0:
        raise InvalidInputError("median nearest-neighbour distance is zero", module=MODULE)
    c = factor * d_med**2 * n**0.75
    return c * n**-0.25


def heat_kernel_graph(points, t: float, threshold: float) -> sp.csr_matrix:
    """
    Thresholded heat kernel ``K_jk = exp(-‖x_j - x_k‖² / t)``.

    Entries are kept where the kernel value exceeds ``threshold``; the
    diagonal is 1. Candidate pairs come from a radius search, and every kept
    value is recomputed from the coordinates so it matches an all-pairs
    evaluation exactly.

    Args:
        points: PointCloud or n × d array
        t: positive scale
        threshold: drop tolerance in (0, 1)

    Returns:
        n × n symmetric CSR matrix
    """
    if not t > 0:
        raise InvalidInputError(f"heat scale must be positive, got {t}", module=MODULE)
    if not 0.0 < threshold < 1.0:
        raise InvalidInputError(f"threshold must lie in (0, 1), got {threshold}", module=MODULE)
    X = _as_points(points)
    n = X.shape[0]
    radius = np.sqrt(t * np.log(1.0 / threshold)) * (1.0 + 1e-9) + 1e-300
    candidates = NearestNeighbors(radius=radius).fit(X).radius_neighbors_graph(X, mode="connectivity").tocoo()
    rows, cols = candidates.row, candidates.col
    diff = X[rows] - X[cols]
    d2 = np.sum(diff * diff, axis=1)
    values = np.exp(-d2 / t)
    keep = values > threshold
    K = sp.csr_matrix((values[keep], (rows[keep], cols[keep])), shape=(n, n))
    K.setdiag(1.0)
    K.sort_indices()
    logger.debug(f"heat kernel graph: n={n}, t={t:.4g}, nnz={K.nnz} ({K.nnz / max(n, 1):.1f} per row)")
    return K


def graph_laplacian(W) -> sp.csr_matrix:
    """``D − W`` with the diagonal of ``W`` ignored."""
    W = sp.csr_matrix(W, dtype=np.float64)
    W = W - sp.diags(W.diagonal())
    W.eliminate_zeros()
    degree = np.asarray(W.sum(axis=1)).ravel()
    return sp.csr_matrix(sp.diags(degree) - W)


def restricted_laplacian(W, vertices) -> sp.csr_matrix:
    """
    Graph Laplacian of the subgraph induced by ``vertices``.

    Edges leaving the subset are dropped, which is the discrete analogue of
    a homogeneous Neumann condition on the piece.
    """
    W = sp.csr_matrix(W)
    idx = np.asarray(vertices, dtype=np.int64)
    return graph_laplacian(W[idx][:, idx])


def eigenmaps_operator(K) -> Tuple[sp.csr_matrix, np.ndarray]:
    """
    Symmetric form ``I − D^{-1/2} K D^{-1/2}`` of ``(D − K)φ = λ D φ``.

    Returns:
        The operator and the degree vector ``D``; eigenvectors ``v`` of the
        operator map back to ``φ = D^{-1/2} v``.

    Raises:
        IsolatedVertexError: a row of ``K`` sums to zero
    """
    K = sp.csr_matrix(K, dtype=np.float64)
    if K.shape[0] != K.shape[1]:
        raise ShapeError(f"kernel matrix must be square, got {K.shape}", module=MODULE)
    degree = np.asarray(K.sum(axis=1)).ravel()
    isolated = np.flatnonzero(degree <= 0)
    if isolated.size:
        raise IsolatedVertexError(int(isolated[0]))
    scale = 1.0 / np.sqrt(degree)
    coo = K.tocoo()
    # the product of the two scales is formed first so (j, k) and (k, j) round identically
    values = coo.data * (scale[coo.row] * scale[coo.col])
    normalized = sp.csr_matrix((values, (coo.row, coo.col)), shape=K.shape)
    op = sp.identity(K.shape[0], format="csr") - normalized
    op = sp.csr_matrix(op)
    op.eliminate_zeros()
    return op, degree


def grid_graph(side: int, periodic: bool = True) -> sp.csr_matrix:
    """
    Unit-weight 4-neighbour graph on a ``side × side`` grid, ordered like
    :func:`bfmht.trees.points.torus_grid`.
    """
    if side < 2:
        raise InvalidInputError("grid side must be at least 2", module=MODULE)
    ones = np.ones(side - 1)
    path = sp.diags([ones, ones], [-1, 1], shape=(side, side), format="lil")
    if periodic and side > 2:
        path[0, side - 1] = 1.0
        path[side - 1, 0] = 1.0
    path = sp.csr_matrix(path)
    eye = sp.identity(side, format="csr")
    W = sp.kron(path, eye) + sp.kron(eye, path)
    return sp.csr_matrix(W)


def read_matrix_market(path: Union[str, PathLike]) -> sp.csr_matrix:
    """Read a symmetric coordinate Matrix Market file."""
    A = sp.csr_matrix(scipy.io.mmread(str(path)))
    check_symmetric(A, rtol=1e-12)
    return A


def write_matrix_market(path: Union[str, PathLike], A) -> None:
    scipy.io.mmwrite(str(path), sp.coo_matrix(A), symmetry="symmetric", precision=17)
