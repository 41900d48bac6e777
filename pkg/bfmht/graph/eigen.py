# -*- coding: utf-8 -*-
"""
Symmetric eigensolvers: smallest eigenpairs, Fiedler vectors and a banded
eigenvector provider for streaming butterfly builds.
"""

from __future__ import annotations

import logging
import struct
from dataclasses import dataclass, field
from os import PathLike
from typing import Iterator, List, Optional, Union

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import ArpackNoConvergence, LinearOperator, aslinearoperator, eigsh

from bfmht.butterfly.providers import ColumnBandProvider
from bfmht.errors import ContainerError, ConvergenceError, InvalidInputError, ShapeError, StreamError

logger = logging.getLogger(__name__)

MODULE = "spectral-graph"

Operator = Union[sp.spmatrix, np.ndarray, LinearOperator]


@dataclass
class EigenBand:
    """Consecutive eigenpairs; ``vectors[:, j]`` belongs to ``eigenvalues[j]``."""

    eigenvalues: np.ndarray
    vectors: np.ndarray
    residuals: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def size(self) -> int:
        return int(self.eigenvalues.size)

    @property
    def n(self) -> int:
        return self.vectors.shape[0]

    def orthonormality_error(self) -> float:
        """``max |VᵀV − I|``."""
        k = self.size
        if k == 0:
            return 0.0
        gram = self.vectors.T @ self.vectors
        return float(np.max(np.abs(gram - np.eye(k))))


def norm_bound(op: Operator) -> float:
    """Cheap upper bound on ‖op‖₂ (max absolute row sum when available)."""
    if sp.issparse(op):
        return float(abs(op).sum(axis=1).max()) if op.nnz else 0.0
    if isinstance(op, np.ndarray):
        return float(np.abs(op).sum(axis=1).max()) if op.size else 0.0
    bound = getattr(op, "norm_bound", None)
    if bound is not None:
        return float(bound)
    vals = eigsh(op, k=1, which="LM", return_eigenvectors=False, tol=1e-3)
    return float(abs(vals[0])) * 1.01


def _to_dense(op: Operator) -> np.ndarray:
    if sp.issparse(op):
        A = op.toarray()
    elif isinstance(op, np.ndarray):
        A = op
    else:
        A = op @ np.eye(op.shape[0])
    return 0.5 * (A + A.T)


def _canonical_signs(V: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Flip columns so that each column's first non-negligible entry is positive."""
    V = V.copy()
    for j in range(V.shape[1]):
        col = V[:, j]
        nz = np.flatnonzero(np.abs(col) > tol * np.max(np.abs(col), initial=0.0))
        if nz.size and col[nz[0]] < 0:
            V[:, j] = -col
    return V


def _residuals(op: Operator, values: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    if values.size == 0:
        return np.zeros(0)
    AV = op @ vectors
    return np.linalg.norm(AV - vectors * values, axis=0)


def lanczos_smallest(
    op: Operator,
    k: int,
    tol: Optional[float] = None,
    seed: int = 0,
    max_iter: Optional[int] = None,
    sigma: Optional[float] = None,
    dense_threshold: Optional[int] = None,
) -> EigenBand:
    """
    The ``k`` algebraically smallest eigenpairs of a symmetric operator.

    Small problems go to a dense symmetric eigensolver. Larger ones use
    implicitly restarted Lanczos (ARPACK, which reorthogonalizes fully)
    from a seeded start vector, followed by a Rayleigh–Ritz pass on the
    orthonormalized Ritz vectors. With ``sigma`` set, shift-and-invert
    around ``sigma`` is used instead; ``op`` must then be a sparse matrix.

    Args:
        op: symmetric sparse matrix, dense array or LinearOperator
        k: number of eigenpairs, ``0 <= k <= n``
        tol: ARPACK relative tolerance
        seed: seed of the start vector
        max_iter: ARPACK restart limit
        sigma: optional shift for shift-and-invert
        dense_threshold: largest n solved densely

    Returns:
        EigenBand with eigenvalues ascending and sign-canonical vectors

    Raises:
        ConvergenceError: ARPACK did not converge; carries the residuals
            of the pairs it did find
    """
    from bfmht.settings import get_settings

    settings = get_settings()
    tol = settings.LANCZOS_TOL if tol is None else tol
    max_iter = settings.LANCZOS_MAX_ITER if max_iter is None else max_iter
    dense_threshold = settings.DENSE_EIGEN_THRESHOLD if dense_threshold is None else dense_threshold

    n = op.shape[0]
    if op.shape[0] != op.shape[1]:
        raise ShapeError(f"operator must be square, got {op.shape}", module=MODULE)
    if not 0 <= k <= n:
        raise InvalidInputError(f"cannot compute {k} eigenpairs of an {n} x {n} operator", module=MODULE)
    if k == 0:
        return EigenBand(np.zeros(0), np.zeros((n, 0)))

    if n <= dense_threshold or k >= n - 1:
        values, vectors = scipy.linalg.eigh(_to_dense(op), subset_by_index=[0, k - 1])
    elif sp.issparse(op) and op.nnz == 0:
        values, vectors = np.zeros(k), np.eye(n, k)
    else:
        v0 = np.random.default_rng(seed).standard_normal(n)
        ncv = min(n, max(2 * k + 1, 20))
        try:
            if sigma is None:
                values, vectors = eigsh(aslinearoperator(op), k=k, which="SA", tol=tol, v0=v0, ncv=ncv, maxiter=max_iter)
            else:
                values, vectors = eigsh(op, k=k, sigma=sigma, which="LM", tol=tol, v0=v0, ncv=ncv, maxiter=max_iter)
        except ArpackNoConvergence as e:
            residuals = _residuals(op, e.eigenvalues, e.eigenvectors)
            raise ConvergenceError(
                f"Lanczos found {e.eigenvalues.size} of {k} eigenpairs before the iteration limit",
                residuals=residuals,
            ) from e
        # Rayleigh-Ritz on the orthonormalized Ritz basis
        Q, _ = np.linalg.qr(vectors)
        H = Q.T @ (op @ Q)
        values, Y = scipy.linalg.eigh(0.5 * (H + H.T))
        vectors = Q @ Y

    order = np.argsort(values, kind="stable")
    values, vectors = values[order], _canonical_signs(vectors[:, order])
    residuals = _residuals(op, values, vectors)
    bound = norm_bound(op)
    if residuals.size and residuals.max() > 1e-8 * max(bound, 1e-300):
        logger.warning(f"Lanczos residual {residuals.max():.2e} exceeds 1e-8 x norm bound {bound:.3g}")
    return EigenBand(values, vectors, residuals)


def fiedler_vector(laplacian, seed: int = 0, dense_threshold: int = 512) -> np.ndarray:
    """
    Unit eigenvector for the second-smallest eigenvalue of a graph Laplacian.

    The vector is centred (the constant vector spans the null space of a
    connected graph's Laplacian), normalized and sign-fixed so that its first
    non-negligible component is positive.

    Raises:
        InvalidInputError: fewer than two vertices
        ConvergenceError: the sparse solver did not converge
    """
    L = sp.csr_matrix(laplacian, dtype=np.float64)
    n = L.shape[0]
    if n < 2:
        raise InvalidInputError("a Fiedler vector needs at least two vertices", module=MODULE)
    if n <= dense_threshold:
        _, vec = scipy.linalg.eigh(_to_dense(L), subset_by_index=[1, 1])
        v = vec[:, 0]
    else:
        shift = 1e-6 * max(float(L.diagonal().max()), 1e-300)
        v0 = np.random.default_rng(seed).standard_normal(n)
        try:
            values, vecs = eigsh(L, k=2, sigma=-shift, which="LM", v0=v0, tol=1e-10)
        except ArpackNoConvergence as e:
            residuals = _residuals(L, e.eigenvalues, e.eigenvectors)
            raise ConvergenceError("Fiedler vector did not converge", residuals=residuals) from e
        v = vecs[:, int(np.argsort(values)[1])]
    v = v - v.mean()
    v = v / np.linalg.norm(v)
    return _canonical_signs(v[:, None])[:, 0]


class DeflatedOperator(LinearOperator):
    """``A + γ V Vᵀ``: moves the converged eigenpairs in ``V`` above the spectrum."""

    def __init__(self, A: Operator, V: np.ndarray, shift: float):
        self.A = A
        self.V = V
        self.shift = shift
        self.norm_bound = norm_bound(A) + shift
        super().__init__(dtype=np.float64, shape=A.shape)

    def _matvec(self, x):
        x = np.asarray(x).ravel()
        return self.A @ x + self.shift * (self.V @ (self.V.T @ x))

    def _matmat(self, X):
        return self.A @ X + self.shift * (self.V @ (self.V.T @ X))

    def _adjoint(self):
        return self


class BandedEigenProvider(ColumnBandProvider):
    """
    Serves eigenvectors of a symmetric operator in ascending bands.

    Each new band is the set of smallest eigenpairs of the operator deflated
    against every band computed before it, so bands come out in global
    eigenvalue order without gaps or repeats. A leaf larger than
    ``band_size`` is solved as several consecutive bands.

    With ``scale`` set (the vector ``D^{-1/2}``), served columns are the
    generalized eigenvectors ``φ = D^{-1/2} v``.
    """

    name = "eigen-band"

    def __init__(
        self,
        op: Operator,
        m: int,
        band_size: int,
        scale: Optional[np.ndarray] = None,
        seed: int = 0,
        tol: Optional[float] = None,
        dense_threshold: Optional[int] = None,
    ):
        n = op.shape[0]
        if m > n:
            raise InvalidInputError(f"cannot serve {m} eigenvectors of an {n} x {n} operator", module=MODULE)
        if band_size < 1:
            raise InvalidInputError("band size must be positive", module=MODULE)
        super().__init__(n, m)
        self.op = op
        self.band_size = int(band_size)
        self.scale = scale
        self.seed = seed
        self.tol = tol
        self.dense_threshold = dense_threshold
        self.shift = norm_bound(op) + 1.0
        self.bands: List[EigenBand] = []
        self.warnings: List[str] = []
        self._count = 0

    @property
    def computed(self) -> int:
        return self._count

    @property
    def eigenvalues(self) -> Optional[np.ndarray]:
        if not self.bands:
            return np.zeros(0)
        return np.concatenate([b.eigenvalues for b in self.bands])

    def _solve_next(self, k: int) -> EigenBand:
        if self.bands:
            V = np.hstack([b.vectors for b in self.bands])
            target = DeflatedOperator(self.op, V, self.shift)
        else:
            target = self.op
        band = lanczos_smallest(
            target, k, tol=self.tol, seed=self.seed, dense_threshold=self.dense_threshold
        )
        # residuals against the undeflated operator
        band.residuals = _residuals(self.op, band.eigenvalues, band.vectors)
        if self.bands:
            last = float(self.bands[-1].eigenvalues[-1])
            first = float(band.eigenvalues[0])
            if first < last - 1e-8 * self.shift:
                msg = (
                    f"band starting at index {self._count}: eigenvalue {first:.10g} below "
                    f"previous band's last {last:.10g}; kept in global index order"
                )
                logger.warning(msg)
                self.warnings.append(msg)
        self.bands.append(band)
        self._count += k
        logger.debug(f"eigen band {len(self.bands)}: indices {self._count - k}..{self._count - 1}")
        return band

    def columns(self) -> np.ndarray:
        """All columns served so far, scaled like the served bands."""
        if not self.bands:
            return np.zeros((self.n, 0))
        V = np.hstack([b.vectors for b in self.bands])
        return V if self.scale is None else V * self.scale[:, None]

    def iter_bands(self) -> Iterator[EigenBand]:
        """Compute and yield the remaining bands of ``band_size``."""
        while self._count < self.m:
            yield self._solve_next(min(self.band_size, self.m - self._count))

    def _materialize(self, indices: np.ndarray) -> np.ndarray:
        if indices.size == 0:
            return np.zeros((self.n, 0))
        if int(indices[0]) != self._count or int(indices[-1]) != self._count + indices.size - 1:
            raise StreamError(
                f"eigen bands are computed in order: expected columns starting at {self._count}, "
                f"got {int(indices[0])}..{int(indices[-1])}"
            )
        blocks = []
        remaining = indices.size
        while remaining:
            k = min(self.band_size, remaining)
            blocks.append(self._solve_next(k).vectors)
            remaining -= k
        V = np.hstack(blocks)
        return V if self.scale is None else V * self.scale[:, None]


def banded_eigen_provider(op: Operator, m: int, band_size: int, **kwargs) -> BandedEigenProvider:
    """Provider of the ``m`` smallest eigenvectors of ``op`` in bands of ``band_size``."""
    return BandedEigenProvider(op, m, band_size, **kwargs)


_BAND_HEADER = struct.Struct("<qq")


def write_eigenbands(path: Union[str, PathLike], bands: List[EigenBand]) -> None:
    """
    Binary dump, one record per band: ``n`` and band size as little-endian
    int64, the eigenvalues as f64, then the vectors column-major as f64.
    """
    with open(path, "wb") as fh:
        for band in bands:
            fh.write(_BAND_HEADER.pack(band.n, band.size))
            fh.write(np.asarray(band.eigenvalues, dtype="<f8").tobytes())
            fh.write(np.asarray(band.vectors, dtype="<f8").tobytes(order="F"))


def read_eigenbands(path: Union[str, PathLike]) -> List[EigenBand]:
    """Inverse of :func:`write_eigenbands`."""
    bands = []
    with open(path, "rb") as fh:
        while True:
            header = fh.read(_BAND_HEADER.size)
            if not header:
                break
            if len(header) != _BAND_HEADER.size:
                raise ContainerError(f"{path}: truncated band header", module=MODULE)
            n, k = _BAND_HEADER.unpack(header)
            values = np.frombuffer(fh.read(8 * k), dtype="<f8")
            raw = fh.read(8 * n * k)
            if values.size != k or len(raw) != 8 * n * k:
                raise ContainerError(f"{path}: truncated band data", module=MODULE)
            vectors = np.frombuffer(raw, dtype="<f8").reshape((n, k), order="F")
            bands.append(EigenBand(values.astype(np.float64), vectors.astype(np.float64)))
    return bands
