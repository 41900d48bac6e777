# -*- coding: utf-8 -*-
"""
Dense matrices and tolerance-driven low-rank factorization.

A dense matrix is a 2-D ``numpy.ndarray`` of float64 or complex128. The
factorization path uses truncated SVD with a relative Frobenius tolerance.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from os import PathLike
from typing import Sequence, Union

import numpy as np
import scipy.linalg

from bfmht.errors import IndexRangeError, InvalidInputError, ShapeError

logger = logging.getLogger(__name__)

MODULE = "matrix-core"

ArrayOrFactor = Union[np.ndarray, "LowRankFactor"]


def as_dense(A, name: str = "matrix") -> np.ndarray:
    """Coerce to a 2-D float64/complex128 array and check finiteness."""
    A = np.asarray(A)
    if A.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {A.shape}", module=MODULE)
    if not np.issubdtype(A.dtype, np.complexfloating):
        A = A.astype(np.float64, copy=False)
    else:
        A = A.astype(np.complex128, copy=False)
    if not np.all(np.isfinite(A)):
        raise InvalidInputError(f"{name} has non-finite entries", module=MODULE)
    return A


@dataclass(frozen=True, eq=False)
class LowRankFactor:
    """
    ``A ≈ left @ right.conj().T`` with ``left`` of unit-norm columns.

    Attributes:
        left: p × r array
        right: q × r array carrying the scale
    """

    left: np.ndarray
    right: np.ndarray

    def __post_init__(self):
        if self.left.ndim != 2 or self.right.ndim != 2:
            raise ShapeError("factors must be 2-D", module=MODULE)
        if self.left.shape[1] != self.right.shape[1]:
            raise ShapeError(
                f"rank mismatch: left has {self.left.shape[1]} columns, "
                f"right has {self.right.shape[1]}",
                module=MODULE,
            )

    @property
    def rank(self) -> int:
        return self.left.shape[1]

    @property
    def shape(self):
        return self.left.shape[0], self.right.shape[0]

    @property
    def entries(self) -> int:
        return self.left.size + self.right.size

    def to_dense(self) -> np.ndarray:
        return self.left @ self.right.conj().T


def _svd(A: np.ndarray):
    try:
        return scipy.linalg.svd(A, full_matrices=False, lapack_driver="gesdd", check_finite=False)
    except np.linalg.LinAlgError:
        logger.debug(f"gesdd failed on a {A.shape} block, retrying with gesvd")
        return scipy.linalg.svd(A, full_matrices=False, lapack_driver="gesvd", check_finite=False)


def truncation_rank(s: np.ndarray, tol: float) -> int:
    """
    Smallest r with ``sqrt(sum(s[r:]**2)) <= tol * sqrt(sum(s**2))``.
    """
    if s.size == 0:
        return 0
    tail = np.append(np.cumsum((s * s)[::-1])[::-1], 0.0)
    if tail[0] == 0.0:
        return 0
    return int(np.argmax(tail <= (tol * tol) * tail[0]))


def compress_block(A: np.ndarray, tol: float) -> LowRankFactor:
    """
    Truncated SVD of ``A`` without input validation.

    Empty and zero blocks give rank-0 factors of the right shapes.
    """
    p, q = A.shape
    if p == 0 or q == 0:
        return LowRankFactor(np.zeros((p, 0), dtype=A.dtype), np.zeros((q, 0), dtype=A.dtype))
    U, s, Vh = _svd(A)
    r = truncation_rank(s, tol)
    left = np.ascontiguousarray(U[:, :r])
    right = np.ascontiguousarray(Vh[:r].conj().T * s[:r])
    return LowRankFactor(left, right)


def low_rank_factor(A, tol: float, check: bool = False) -> LowRankFactor:
    """
    Factor ``A ≈ left · right^*`` to relative Frobenius tolerance ``tol``.

    Args:
        A: nonempty dense matrix
        tol: relative tolerance in (0, 1)
        check: verify the reconstruction error bound

    Returns:
        The smallest-rank SVD truncation meeting the tolerance.

    Raises:
        InvalidInputError: non-finite entries, empty input or tol out of range
    """
    A = as_dense(A)
    if A.size == 0:
        raise InvalidInputError("cannot factor an empty matrix", module=MODULE)
    if not 0.0 < tol < 1.0:
        raise InvalidInputError(f"tolerance must lie in (0, 1), got {tol}", module=MODULE)
    factor = compress_block(A, tol)
    if check:
        check_block_error(A, factor, tol)
    return factor


def check_block_error(A: np.ndarray, factor: LowRankFactor, tol: float) -> float:
    """Assert the local relative Frobenius error and return it."""
    norm = np.linalg.norm(A)
    if norm == 0.0:
        return 0.0
    err = np.linalg.norm(A - factor.to_dense()) / norm
    # allow roundoff in the reconstruction itself
    if err > tol * (1.0 + 1e-6) + 1e-13:
        raise AssertionError(f"block error {err:.3e} exceeds tolerance {tol:.3e} on a {A.shape} block")
    return float(err)


def _left(x: ArrayOrFactor) -> np.ndarray:
    return x.left if isinstance(x, LowRankFactor) else np.asarray(x)


def stack_columns(*factors: ArrayOrFactor) -> np.ndarray:
    """
    Horizontal concatenation of left factors, in argument order.

    Rank-0 factors contribute no columns.

    Raises:
        ShapeError: the factors have different row counts
    """
    if not factors:
        raise ShapeError("nothing to stack", module=MODULE)
    lefts = [_left(f) for f in factors]
    rows = {left.shape[0] for left in lefts}
    if len(rows) != 1:
        raise ShapeError(f"row mismatch in stack: {sorted(rows)}", module=MODULE)
    return np.hstack(lefts)


def restrict_rows(A, idx: Sequence[int]) -> np.ndarray:
    """
    Row subset of ``A`` in the order given by ``idx``.

    Raises:
        IndexRangeError: an index is out of range or repeated
    """
    A = np.asarray(A)
    idx = np.asarray(idx, dtype=np.int64).ravel()
    if idx.size:
        if idx.min() < 0 or idx.max() >= A.shape[0]:
            raise IndexRangeError(f"row index out of range for {A.shape[0]} rows", module=MODULE)
        if np.unique(idx).size != idx.size:
            raise IndexRangeError("row indices must be distinct", module=MODULE)
    return A[idx]


def relative_error(approx: np.ndarray, exact: np.ndarray) -> float:
    """``‖approx − exact‖ / ‖exact‖`` (absolute error when exact is zero)."""
    denom = np.linalg.norm(exact)
    err = np.linalg.norm(np.asarray(approx) - np.asarray(exact))
    return float(err / denom) if denom > 0 else float(err)


def write_dense_text(path: Union[str, PathLike], A) -> None:
    """
    Write the text format: ``rows cols`` then one ``re im`` pair per entry,
    column-major.
    """
    A = np.asarray(A)
    flat = A.ravel(order="F")
    pairs = np.column_stack([flat.real, flat.imag if np.iscomplexobj(flat) else np.zeros(flat.size)])
    with open(path, "w") as fh:
        fh.write(f"{A.shape[0]} {A.shape[1]}\n")
        np.savetxt(fh, pairs, fmt="%.17g")


def read_dense_text(path: Union[str, PathLike]) -> np.ndarray:
    """Inverse of :func:`write_dense_text`; real data comes back as float64."""
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise InvalidInputError(f"{path}: expected 'rows cols' header", module=MODULE)
        rows, cols = int(header[0]), int(header[1])
        data = np.loadtxt(fh, ndmin=2) if rows * cols else np.zeros((0, 2))
    if data.shape != (rows * cols, 2):
        raise ShapeError(f"{path}: expected {rows * cols} entries, found {data.shape[0]}", module=MODULE)
    values = data[:, 0] + 1j * data[:, 1] if np.any(data[:, 1]) else data[:, 0].copy()
    return as_dense(values.reshape((rows, cols), order="F"))
