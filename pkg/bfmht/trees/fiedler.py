# -*- coding: utf-8 -*-
"""
Fiedler trees: recursive spectral bisection of a graph.

Each node's vertex set is split by the sign of the Fiedler vector of the
Laplacian of the induced subgraph. Vertices where the vector vanishes go to
the nonnegative side, which is always the first child. Nodes that stop early
are carried down to the common depth as ``[node, empty]`` pairs.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from bfmht.errors import ConvergenceError, InvalidInputError
from bfmht.trees.tree import IndexTree
from bfmht.utils.parallel import ordered_map

logger = logging.getLogger(__name__)

MODULE = "index-trees"

# balance window recorded for every split; the build itself never rejects a split
BALANCE_WINDOW = (0.35, 0.65)


@dataclass
class SplitRecord:
    """One bisection: which node, how it split and how."""

    level: int
    position: int
    size: int
    left: int
    right: int
    method: str = "fiedler"

    @property
    def fractions(self) -> Tuple[float, float]:
        return self.left / self.size, self.right / self.size

    @property
    def balanced(self) -> bool:
        lo, hi = BALANCE_WINDOW
        return all(lo <= f <= hi for f in self.fractions)


@dataclass
class BuildReport:
    """Per-split diagnostics of a Fiedler tree build."""

    max_leaf_size: int
    splits: List[SplitRecord] = field(default_factory=list)
    balance_window: Tuple[float, float] = BALANCE_WINDOW

    @property
    def fallbacks(self) -> List[SplitRecord]:
        return [s for s in self.splits if s.method != "fiedler"]

    @property
    def all_balanced(self) -> bool:
        return all(s.balanced for s in self.splits)

    def min_fraction(self) -> float:
        return min((min(s.fractions) for s in self.splits), default=0.5)


def _component_split(W: sp.csr_matrix, labels: np.ndarray, count: int) -> np.ndarray:
    """Greedy two-way packing of connected components, largest first."""
    sizes = np.bincount(labels, minlength=count)
    side = np.zeros(count, dtype=bool)
    totals = [0, 0]
    for comp in np.argsort(-sizes, kind="stable"):
        target = 0 if totals[0] <= totals[1] else 1
        side[comp] = target == 0
        totals[target] += sizes[comp]
    return side[labels]


def _split(W: sp.csr_matrix, vertices: np.ndarray, seed: int, node_label: str) -> Tuple[np.ndarray, np.ndarray, str]:
    from bfmht.graph.eigen import fiedler_vector
    from bfmht.graph.sparse import graph_laplacian

    sub = W[vertices][:, vertices]
    count, labels = connected_components(sub, directed=False)
    if count > 1:
        mask = _component_split(sub, labels, count)
        logger.warning(f"node {node_label}: subgraph has {count} components, splitting by component")
        method = "components"
    else:
        try:
            v = fiedler_vector(graph_laplacian(sub), seed=seed)
        except ConvergenceError as e:
            raise ConvergenceError(
                f"Fiedler vector did not converge at node {node_label}",
                residuals=e.residuals,
                node_id=e.node_id,
                module=MODULE,
            ) from e
        mask = v >= -1e-12 * np.max(np.abs(v))
        method = "fiedler"
    return vertices[mask], vertices[~mask], method


def build_fiedler_tree(
    graph,
    max_leaf_size: int,
    seed: int = 0,
    threads: Optional[int] = 1,
    min_depth: int = 0,
) -> Tuple[IndexTree, BuildReport]:
    """
    Binary tree by recursive Fiedler bisection.

    Args:
        graph: symmetric nonnegative adjacency (weights) on n vertices
        max_leaf_size: nodes at or below this size are not split
        seed: start-vector seed for the sparse eigensolver
        threads: sibling nodes of one level are split concurrently
        min_depth: pad the tree to at least this depth

    Returns:
        The tree and its build report

    Raises:
        InvalidInputError: bad leaf size or a non-square graph
        ConvergenceError: the eigensolver failed; ``node_id`` names the node
    """
    W = sp.csr_matrix(graph, dtype=np.float64)
    if W.shape[0] != W.shape[1]:
        raise InvalidInputError(f"graph must be square, got {W.shape}", module=MODULE)
    if max_leaf_size < 1:
        raise InvalidInputError("max_leaf_size must be positive", module=MODULE)
    n = W.shape[0]
    report = BuildReport(max_leaf_size=max_leaf_size)

    level_sets: List[List[np.ndarray]] = [[np.arange(n, dtype=np.int64)]]
    # nodes that may still be split
    open_nodes: List[bool] = [n > max_leaf_size]
    while any(open_nodes) or len(level_sets) - 1 < min_depth:
        d = len(level_sets) - 1
        current = level_sets[-1]
        offset = 2**d - 1
        work = [p for p, is_open in enumerate(open_nodes) if is_open]

        def split_one(pos: int):
            try:
                return _split(W, current[pos], seed, str(offset + pos))
            except ConvergenceError as e:
                e.node_id = offset + pos
                raise

        results = dict(zip(work, ordered_map(split_one, work, threads)))
        next_sets: List[np.ndarray] = []
        next_open: List[bool] = []
        for pos, idx in enumerate(current):
            if pos in results:
                left, right, method = results[pos]
                if left.size and right.size:
                    report.splits.append(SplitRecord(d, pos, idx.size, left.size, right.size, method))
                    next_sets += [left, right]
                    next_open += [left.size > max_leaf_size, right.size > max_leaf_size]
                    continue
                logger.warning(f"node {offset + pos}: bisection produced an empty side, keeping it as a leaf")
            next_sets += [idx, np.zeros(0, dtype=np.int64)]
            next_open += [False, False]
        level_sets.append(next_sets)
        open_nodes = next_open

    tree = IndexTree.from_level_sets(2, level_sets)
    logger.info(
        f"Fiedler tree: n={n}, depth={tree.depth}, {len(report.splits)} splits, "
        f"{len(report.fallbacks)} component fallbacks, min child fraction {report.min_fraction():.3f}"
    )
    return tree, report


def pad_tree(tree: IndexTree, depth: int) -> IndexTree:
    """Extend a tree to ``depth`` by giving every leaf the children ``[leaf, empty, ...]``."""
    if depth < tree.depth:
        raise InvalidInputError(f"cannot pad a depth-{tree.depth} tree down to {depth}", module=MODULE)
    level_sets = [[node.indices for node in level] for level in tree.levels]
    empty = np.zeros(0, dtype=np.int64)
    while len(level_sets) - 1 < depth:
        level_sets.append([s for idx in level_sets[-1] for s in [idx] + [empty] * (tree.arity - 1)])
    return IndexTree.from_level_sets(tree.arity, level_sets, values=tree.values)
