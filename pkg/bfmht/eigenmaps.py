# -*- coding: utf-8 -*-
"""
Laplacian eigenmaps pipeline on a point cloud.

The cloud becomes a thresholded heat-kernel graph, whose normalized
Laplacian supplies the eigenvectors band by band. A Fiedler tree over the
graph serves as the space tree and an equal-count tree as the frequency
tree (eigenvalue counts grow linearly, so equal counts stand in for equal
intervals before the eigenvalues are known). The eigenvector matrix is
butterfly-compressed as the bands stream in.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.sparse as sp

from bfmht.butterfly.factor import ButterflyFactor, butterfly_factor_streaming
from bfmht.graph.eigen import BandedEigenProvider, EigenBand
from bfmht.graph.sparse import default_heat_scale, eigenmaps_operator, heat_kernel_graph
from bfmht.trees.fiedler import BuildReport, build_fiedler_tree, pad_tree
from bfmht.trees.points import PointCloud
from bfmht.trees.tree import build_count_tree, depth_for

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class EigenmapsResult:
    factorization: ButterflyFactor
    provider: BandedEigenProvider
    graph: sp.csr_matrix
    degree: np.ndarray
    tree_report: BuildReport
    heat_scale: float

    @property
    def eigenvalues(self) -> np.ndarray:
        return self.provider.eigenvalues

    def eigenvectors(self) -> np.ndarray:
        """Dense generalized eigenvectors ``φ = D^{-1/2} v``, column per eigenvalue."""
        return self.provider.columns()

    def orthonormality_error(self) -> float:
        """``max |VᵀV − I|`` over all bands together, before degree scaling."""
        bands = self.provider.bands
        if not bands:
            return 0.0
        return EigenBand(
            np.concatenate([b.eigenvalues for b in bands]), np.hstack([b.vectors for b in bands])
        ).orthonormality_error()


def graph_factorization(
    K,
    m: int,
    eps: float,
    space_leaf_size: Optional[int] = None,
    freq_leaf_size: Optional[int] = None,
    band_size: Optional[int] = None,
    seed: int = 0,
    threads: Optional[int] = 1,
    heat_scale: float = float("nan"),
) -> EigenmapsResult:
    """
    Compress the first ``m`` generalized eigenvectors of ``L φ = λ D φ`` for
    the weighted graph ``K``.

    Raises:
        IsolatedVertexError: a vertex has zero degree
        ConvergenceError: an eigensolve failed
    """
    from bfmht.settings import get_settings

    settings = get_settings()
    space_leaf_size = space_leaf_size or settings.SPACE_LEAF_SIZE
    freq_leaf_size = freq_leaf_size or settings.FREQ_LEAF_SIZE
    band_size = band_size or freq_leaf_size

    K = sp.csr_matrix(K, dtype=np.float64)
    op, degree = eigenmaps_operator(K)
    space_tree, report = build_fiedler_tree(K, space_leaf_size, seed=seed, threads=threads)
    depth = max(space_tree.depth, depth_for(m, 2, freq_leaf_size))
    space_tree = pad_tree(space_tree, depth)
    freq_tree = build_count_tree(m, 2, depth)

    provider = BandedEigenProvider(op, m, band_size, scale=1.0 / np.sqrt(degree), seed=seed)
    bf = butterfly_factor_streaming(provider, space_tree, freq_tree, eps, threads=threads)
    for msg in provider.warnings:
        logger.warning(msg)
    return EigenmapsResult(bf, provider, K, degree, report, heat_scale)


def eigenmaps_factorization(
    points,
    m: int,
    eps: float,
    t: Optional[float] = None,
    threshold: Optional[float] = None,
    space_leaf_size: Optional[int] = None,
    freq_leaf_size: Optional[int] = None,
    band_size: Optional[int] = None,
    seed: int = 0,
    threads: Optional[int] = 1,
) -> EigenmapsResult:
    """
    Compress the first ``m`` generalized eigenvectors of a cloud's heat-kernel
    graph.

    Args:
        points: PointCloud or n × d array
        m: number of eigenvectors
        eps: butterfly tolerance
        t: heat-kernel scale; calibrated from the cloud when None
        threshold: kernel drop tolerance (``settings.HEAT_KERNEL_THRESHOLD``)
        space_leaf_size: Fiedler leaf size (``settings.SPACE_LEAF_SIZE``)
        freq_leaf_size: target columns per frequency leaf (``settings.FREQ_LEAF_SIZE``)
        band_size: eigenpairs per solve; defaults to the frequency leaf size
        seed: eigensolver and tree seed
        threads: worker threads

    Raises:
        IsolatedVertexError: a point has no neighbours at this scale
        ConvergenceError: an eigensolve failed
    """
    from bfmht.settings import get_settings

    threshold = get_settings().HEAT_KERNEL_THRESHOLD if threshold is None else threshold
    cloud = points if isinstance(points, PointCloud) else PointCloud(points)
    t = default_heat_scale(cloud) if t is None else t
    K = heat_kernel_graph(cloud, t, threshold)
    logger.info(f"eigenmaps: n={cloud.n}, m={m}, t={t:.4g}, {K.nnz} kernel entries")
    return graph_factorization(
        K,
        m,
        eps,
        space_leaf_size=space_leaf_size,
        freq_leaf_size=freq_leaf_size,
        band_size=band_size,
        seed=seed,
        threads=threads,
        heat_scale=t,
    )
