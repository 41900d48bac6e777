# -*- coding: utf-8 -*-
"""
Manifold harmonic transform on the flat torus ``[−π, π]²``.

The eigenfunctions are ``e^{i(k₁x₁ + k₂x₂)}`` with eigenvalue ``k₁² + k₂²``,
so every matrix entry is known in closed form. This makes the torus the
test bed for the butterfly machinery: direct summation is the oracle.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from bfmht.butterfly.factor import ButterflyFactor, butterfly_factor, butterfly_factor_streaming
from bfmht.butterfly.providers import ColumnBandProvider
from bfmht.errors import InvalidInputError, ShapeError
from bfmht.graph.sparse import grid_graph
from bfmht.trees.fiedler import BuildReport, build_fiedler_tree, pad_tree
from bfmht.trees.points import PointCloud, torus_grid
from bfmht.trees.tree import IndexTree, build_frequency_tree, build_quadtree, choose_depth, depth_for

logger = logging.getLogger(__name__)

MODULE = "torus-mht"

TORUS_AREA = 4 * np.pi**2

DIRECT_CHUNK_ROWS = 4096


@dataclass(eq=False)
class TorusBasis:
    """
    The ``m`` torus eigenfunctions of smallest eigenvalue.

    Attributes:
        modes: m × 2 integer wave vectors, ascending in ``k₁² + k₂²`` with
            ties broken lexicographically in ``(k₁, k₂)``
        eigenvalues: ``k₁² + k₂²`` as floats
    """

    modes: np.ndarray
    eigenvalues: np.ndarray

    @property
    def m(self) -> int:
        return self.modes.shape[0]


def torus_basis(m: int) -> TorusBasis:
    """
    First ``m`` eigenfunctions of the torus Laplacian.

    Raises:
        InvalidInputError: m < 1
    """
    if m < 1:
        raise InvalidInputError(f"need at least one mode, got m={m}", module=MODULE)
    # smallest radius whose disk holds m lattice points; the m-th eigenvalue
    # is then at most radius², so every candidate lies in the square
    radius = max(1, math.ceil(math.sqrt(m / math.pi)))
    while True:
        k = np.arange(-radius, radius + 1, dtype=np.int64)
        k1, k2 = (a.ravel() for a in np.meshgrid(k, k, indexing="ij"))
        lam = k1 * k1 + k2 * k2
        if np.count_nonzero(lam <= radius * radius) >= m:
            break
        radius += 1
    order = np.lexsort((k2, k1, lam))[:m]
    modes = np.column_stack([k1[order], k2[order]])
    return TorusBasis(modes=modes, eigenvalues=lam[order].astype(np.float64))


def weyl_count(area: float, lam: float) -> float:
    """Weyl estimate ``area·λ / 4π`` of the number of eigenvalues up to ``λ``."""
    return area * lam / (4 * np.pi)


def weyl_eigenvalue(area: float, k: int) -> float:
    """Weyl estimate of the ``k``-th eigenvalue, the inverse of :func:`weyl_count`."""
    return 4 * np.pi * k / area


def m_for_ratio(n: int, ratio: float) -> int:
    """``⌈n / ratio⌉`` columns, at least one."""
    if ratio <= 0:
        raise InvalidInputError(f"ratio must be positive, got {ratio}", module=MODULE)
    return max(1, math.ceil(n / ratio))


def _coordinates(points) -> np.ndarray:
    cloud = points if isinstance(points, PointCloud) else PointCloud(points)
    if cloud.dim != 2:
        raise ShapeError(f"torus points must be 2-D, got dimension {cloud.dim}", module=MODULE)
    return cloud.points


def _kernel(xy: np.ndarray, modes: np.ndarray) -> np.ndarray:
    return np.exp(1j * (xy @ modes.T.astype(np.float64)))


def torus_dense_matrix(basis: TorusBasis, points) -> np.ndarray:
    """Full n × m transform matrix; for small oracles only."""
    return _kernel(_coordinates(points), basis.modes)


class TorusProvider(ColumnBandProvider):
    """Evaluates torus eigenfunction bands on demand."""

    name = "torus"

    def __init__(self, basis: TorusBasis, points):
        self.basis = basis
        self.xy = _coordinates(points)
        super().__init__(self.xy.shape[0], basis.m)

    @property
    def eigenvalues(self) -> Optional[np.ndarray]:
        return self.basis.eigenvalues

    def _materialize(self, indices: np.ndarray) -> np.ndarray:
        return _kernel(self.xy, self.basis.modes[indices])


def torus_provider(basis: TorusBasis, points, freq_tree: Optional[IndexTree] = None) -> TorusProvider:
    """
    Column band provider for the torus transform matrix.

    Raises:
        StreamError: ``freq_tree`` does not cover the basis
    """
    provider = TorusProvider(basis, points)
    if freq_tree is not None:
        provider.bind(freq_tree)
    return provider


def direct_mht(basis: TorusBasis, points, c, rows: Optional[Sequence[int]] = None) -> np.ndarray:
    """
    ``f(x_j) = Σ_k c_k e^{i k·x_j}`` by direct summation.

    Args:
        basis: torus basis of size m
        points: the full point set
        c: m coefficients
        rows: subset of point indices to evaluate (all when None)

    Raises:
        ShapeError: coefficient length differs from m
    """
    xy = _coordinates(points)
    c = np.asarray(c)
    if c.shape[0] != basis.m:
        raise ShapeError(f"expected {basis.m} coefficients, got {c.shape[0]}", module=MODULE)
    if rows is not None:
        xy = xy[np.asarray(rows, dtype=np.int64)]
    out = np.empty((xy.shape[0],) + c.shape[1:], dtype=np.complex128)
    for start in range(0, xy.shape[0], DIRECT_CHUNK_ROWS):
        stop = start + DIRECT_CHUNK_ROWS
        out[start:stop] = _kernel(xy[start:stop], basis.modes) @ c
    return out


def torus_trees(
    points,
    basis: TorusBasis,
    freq_arity: int = 4,
    depth: Optional[int] = None,
    space_leaf_size: int = 256,
    freq_leaf_size: int = 64,
) -> Tuple[IndexTree, IndexTree]:
    """Quadtree over the points and eigenvalue-interval tree over the basis, of a common depth."""
    xy = _coordinates(points)
    if depth is None:
        depth = choose_depth(
            xy.shape[0],
            basis.m,
            space_arity=4,
            freq_arity=freq_arity,
            space_leaf_size=space_leaf_size,
            freq_leaf_size=freq_leaf_size,
        )
    return build_quadtree(xy, depth), build_frequency_tree(basis.eigenvalues, freq_arity, depth)


def torus_fiedler_trees(
    side: int,
    basis: TorusBasis,
    freq_arity: int = 4,
    space_leaf_size: int = 256,
    freq_leaf_size: int = 64,
    seed: int = 0,
    threads: Optional[int] = 1,
) -> Tuple[IndexTree, IndexTree, BuildReport]:
    """
    Fiedler tree of the periodic ``side × side`` grid graph and an
    eigenvalue-interval tree over the basis, padded to a common depth.
    """
    space_tree, report = build_fiedler_tree(
        grid_graph(side, periodic=True), space_leaf_size, seed=seed, threads=threads
    )
    depth = max(space_tree.depth, depth_for(basis.m, freq_arity, freq_leaf_size))
    space_tree = pad_tree(space_tree, depth)
    return space_tree, build_frequency_tree(basis.eigenvalues, freq_arity, depth), report


def torus_factorization(
    side: int,
    m: int,
    eps: float,
    freq_arity: int = 4,
    streaming: bool = True,
    threads: Optional[int] = 1,
    depth: Optional[int] = None,
    space_leaf_size: int = 256,
    freq_leaf_size: int = 64,
    points: Optional[PointCloud] = None,
    tree: str = "quadtree",
    seed: int = 0,
) -> Tuple[ButterflyFactor, TorusBasis, PointCloud]:
    """
    Butterfly-compress the torus transform on a ``side × side`` grid (or on
    ``points`` when given).

    ``tree="fiedler"`` replaces the quadtree by Fiedler bisection of the grid
    graph; it needs the grid, not arbitrary points.

    Returns:
        ``(factorization, basis, points)``
    """
    cloud = points if points is not None else torus_grid(side)
    basis = torus_basis(m)
    if tree == "fiedler":
        if points is not None:
            raise InvalidInputError("the fiedler tree is built from the grid graph; omit points", module=MODULE)
        space_tree, freq_tree, _ = torus_fiedler_trees(
            side, basis, freq_arity, space_leaf_size, freq_leaf_size, seed=seed, threads=threads
        )
    elif tree == "quadtree":
        space_tree, freq_tree = torus_trees(
            cloud, basis, freq_arity, depth, space_leaf_size=space_leaf_size, freq_leaf_size=freq_leaf_size
        )
    else:
        raise InvalidInputError(f"unknown tree kind {tree!r}", module=MODULE)
    logger.info(f"torus transform n={cloud.n}, m={m}, {tree}, L={space_tree.depth}, eps={eps:g}")
    if streaming:
        bf = butterfly_factor_streaming(TorusProvider(basis, cloud), space_tree, freq_tree, eps, threads=threads)
    else:
        bf = butterfly_factor(torus_dense_matrix(basis, cloud), space_tree, freq_tree, eps, threads=threads)
    return bf, basis, cloud
