# -*- coding: utf-8 -*-
"""
IndexTree - complete k-ary trees over row or column indices.

Every level ``d`` holds exactly ``arity**d`` nodes in positional order, so a
node's parent is at position ``pos // arity`` and its children at
``arity * pos + i``. Leaves all sit at depth ``L``; boxes or intervals with no
indices are kept as empty nodes.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence

import numpy as np

from bfmht.errors import InvalidInputError, ShapeError

logger = logging.getLogger(__name__)

MODULE = "index-trees"
TREE_ARITIES = frozenset({2, 4})

# tolerance on the [−π, π]² boundary for quadtree input
DOMAIN_TOL = 1e-12


@dataclass(eq=False)
class TreeNode:
    """A node with a sorted index set."""

    id: int
    level: int
    position: int
    parent: Optional[int]
    children: List[int]
    indices: np.ndarray

    @property
    def size(self) -> int:
        return int(self.indices.size)

    @property
    def is_empty(self) -> bool:
        return self.indices.size == 0

    @property
    def is_contiguous(self) -> bool:
        idx = self.indices
        return idx.size == 0 or int(idx[-1]) - int(idx[0]) + 1 == idx.size

    def __repr__(self) -> str:
        return f"TreeNode(id={self.id}, level={self.level}, position={self.position}, size={self.size})"


def _level_offset(arity: int, level: int) -> int:
    return sum(arity**j for j in range(level))


@dataclass(eq=False)
class IndexTree:
    """
    Complete ``arity``-ary tree of depth ``L`` over ``size`` indices.

    Attributes:
        arity: 2 or 4
        levels: ``levels[d]`` lists the ``arity**d`` nodes of depth ``d``
        values: optional per-index values the tree was built on (eigenvalues
            for frequency trees)
    """

    arity: int
    levels: List[List[TreeNode]]
    values: Optional[np.ndarray] = None
    _by_id: Dict[int, TreeNode] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        self._by_id = {node.id: node for level in self.levels for node in level}

    @classmethod
    def from_level_sets(
        cls,
        arity: int,
        level_sets: Sequence[Sequence[np.ndarray]],
        values: Optional[np.ndarray] = None,
    ) -> "IndexTree":
        """
        Build a tree from per-level index arrays in positional order.

        Args:
            arity: branching factor
            level_sets: ``level_sets[d][pos]`` is the index set of that node
            values: optional values attached to the indices

        Returns:
            The validated tree
        """
        if arity not in TREE_ARITIES:
            raise InvalidInputError(f"arity must be 2 or 4, got {arity}", module=MODULE)
        levels: List[List[TreeNode]] = []
        depth = len(level_sets) - 1
        for d, sets in enumerate(level_sets):
            if len(sets) != arity**d:
                raise ShapeError(f"level {d} has {len(sets)} nodes, expected {arity ** d}", module=MODULE)
            offset = _level_offset(arity, d)
            child_offset = _level_offset(arity, d + 1)
            nodes = []
            for pos, idx in enumerate(sets):
                parent = None if d == 0 else _level_offset(arity, d - 1) + pos // arity
                children = [] if d == depth else [child_offset + arity * pos + i for i in range(arity)]
                nodes.append(
                    TreeNode(
                        id=offset + pos,
                        level=d,
                        position=pos,
                        parent=parent,
                        children=children,
                        indices=np.asarray(idx, dtype=np.int64),
                    )
                )
            levels.append(nodes)
        tree = cls(arity=arity, levels=levels, values=None if values is None else np.asarray(values, dtype=np.float64))
        tree.validate()
        return tree

    @property
    def depth(self) -> int:
        return len(self.levels) - 1

    @property
    def root(self) -> TreeNode:
        return self.levels[0][0]

    @property
    def size(self) -> int:
        return self.root.size

    @property
    def leaves(self) -> List[TreeNode]:
        return self.levels[-1]

    def node(self, node_id: int) -> TreeNode:
        return self._by_id[node_id]

    def level(self, d: int) -> List[TreeNode]:
        return self.levels[d]

    def children(self, node: TreeNode) -> List[TreeNode]:
        return [self._by_id[c] for c in node.children]

    def parent(self, node: TreeNode) -> Optional[TreeNode]:
        return None if node.parent is None else self._by_id[node.parent]

    def __iter__(self) -> Iterator[TreeNode]:
        for level in self.levels:
            yield from level

    def __len__(self) -> int:
        return len(self._by_id)

    def postorder(self) -> Iterator[TreeNode]:
        """Children left to right, then the parent."""

        def visit(node: TreeNode):
            for child in self.children(node):
                yield from visit(child)
            yield node

        yield from visit(self.root)

    def validate(self) -> None:
        """
        Check the partition property at every level.

        Raises:
            InvalidInputError: children do not partition their parent, or a
                node's indices are unsorted
        """
        root = self.root.indices
        if root.size and not np.array_equal(root, np.arange(root.size)):
            raise InvalidInputError("root must hold every index 0..n-1", module=MODULE)
        for node in self:
            idx = node.indices
            if idx.size > 1 and np.any(np.diff(idx) <= 0):
                raise InvalidInputError(f"node {node.id} has unsorted or repeated indices", module=MODULE)
            if node.children:
                merged = np.sort(np.concatenate([self._by_id[c].indices for c in node.children]))
                if not np.array_equal(merged, idx):
                    raise InvalidInputError(f"children of node {node.id} do not partition it", module=MODULE)

    def counts(self, level: int) -> np.ndarray:
        return np.array([node.size for node in self.levels[level]], dtype=np.int64)

    def to_json(self) -> str:
        from bfmht.schemas import IndexTreeSchema

        return json.dumps(IndexTreeSchema().dump(self))

    @classmethod
    def from_json(cls, text: str) -> "IndexTree":
        from bfmht.schemas import IndexTreeSchema

        return IndexTreeSchema().load(json.loads(text))


def _ranges_from_sorted_keys(keys: np.ndarray, count: int) -> List[np.ndarray]:
    """Split ``arange(len(keys))`` by the nondecreasing bucket ``keys``."""
    bounds = np.searchsorted(keys, np.arange(count + 1), side="left")
    return [np.arange(bounds[k], bounds[k + 1], dtype=np.int64) for k in range(count)]


def build_frequency_tree(eigenvalues, arity: int, depth: int) -> IndexTree:
    """
    Frequency tree by uniform eigenvalue intervals on ``[0, λ_m]``.

    The node at depth ``d``, position ``k`` holds the indices with
    eigenvalue in ``[k·λ_m/arity^d, (k+1)·λ_m/arity^d)``; the last interval
    is closed.

    Raises:
        InvalidInputError: empty, unsorted or negative eigenvalues
    """
    lam = np.asarray(eigenvalues, dtype=np.float64).ravel()
    if lam.size == 0:
        raise InvalidInputError("need at least one eigenvalue", module=MODULE)
    if depth < 0:
        raise InvalidInputError(f"depth must be nonnegative, got {depth}", module=MODULE)
    if not np.all(np.isfinite(lam)):
        raise InvalidInputError("eigenvalues must be finite", module=MODULE)
    if np.any(np.diff(lam) < 0):
        raise InvalidInputError("eigenvalues must be sorted ascending", module=MODULE)
    lam_max = lam[-1]
    # solver roundoff around zero
    if lam[0] < -1e-10 * max(1.0, abs(lam_max)):
        raise InvalidInputError(f"eigenvalues must be nonnegative, got {lam[0]}", module=MODULE)
    leaves = arity**depth
    if lam_max > 0:
        bucket = np.floor(np.clip(lam, 0.0, None) * leaves / lam_max).astype(np.int64)
        bucket = np.clip(bucket, 0, leaves - 1)
    else:
        bucket = np.zeros(lam.size, dtype=np.int64)
    level_sets = [
        _ranges_from_sorted_keys(bucket // arity ** (depth - d), arity**d) for d in range(depth + 1)
    ]
    return IndexTree.from_level_sets(arity, level_sets, values=lam)


def build_count_tree(m: int, arity: int, depth: int, values=None) -> IndexTree:
    """
    Frequency tree by equal index counts.

    By Weyl's law eigenvalue counts grow linearly in λ on surfaces, so equal
    counts stand in for equal intervals when the eigenvalues are not known
    before streaming.
    """
    if m < 1:
        raise InvalidInputError("need at least one column", module=MODULE)
    level_sets = []
    for d in range(depth + 1):
        nodes = arity**d
        bounds = (np.arange(nodes + 1, dtype=np.int64) * m) // nodes
        level_sets.append([np.arange(bounds[k], bounds[k + 1], dtype=np.int64) for k in range(nodes)])
    return IndexTree.from_level_sets(arity, level_sets, values=values)


def _morton(ix: np.ndarray, iy: np.ndarray, depth: int) -> np.ndarray:
    code = np.zeros(ix.shape, dtype=np.int64)
    for j in range(depth):
        code |= ((ix >> j) & 1) << (2 * j + 1)
        code |= ((iy >> j) & 1) << (2 * j)
    return code


def build_quadtree(points, depth: int) -> IndexTree:
    """
    Midpoint quadtree on ``[−π, π]²``.

    Child ``2·bx + by`` of a box is its upper half in x when ``bx = 1`` and
    in y when ``by = 1``; points on a midpoint go to the upper half.

    Raises:
        InvalidInputError: a point lies outside the square
    """
    from bfmht.trees.points import PointCloud

    cloud = points if isinstance(points, PointCloud) else PointCloud(points)
    xy = cloud.points
    if xy.shape[1] != 2:
        raise InvalidInputError("quadtree needs 2-D points", module=MODULE)
    if depth < 0:
        raise InvalidInputError(f"depth must be nonnegative, got {depth}", module=MODULE)
    if np.any(np.abs(xy) > np.pi + DOMAIN_TOL):
        raise InvalidInputError("points must lie in [-pi, pi]^2", module=MODULE)
    side = 2**depth
    cells = np.floor((xy + np.pi) / (2 * np.pi) * side).astype(np.int64)
    cells = np.clip(cells, 0, side - 1)
    code = _morton(cells[:, 0], cells[:, 1], depth)
    level_sets = []
    for d in range(depth + 1):
        key = code >> (2 * (depth - d))
        order = np.argsort(key, kind="stable")
        bounds = np.searchsorted(key[order], np.arange(4**d + 1), side="left")
        level_sets.append([np.sort(order[bounds[k] : bounds[k + 1]]) for k in range(4**d)])
    return IndexTree.from_level_sets(4, level_sets)


def depth_for(count: int, arity: int, max_leaf_size: int) -> int:
    """Smallest L with ``count / arity**L <= max_leaf_size``."""
    depth = 0
    while count > max_leaf_size * arity**depth:
        depth += 1
    return depth


def choose_depth(
    n: int,
    m: int,
    space_arity: int = 4,
    freq_arity: int = 4,
    space_leaf_size: int = 256,
    freq_leaf_size: int = 64,
) -> int:
    """Common depth so that both trees meet their leaf-size targets."""
    return max(depth_for(n, space_arity, space_leaf_size), depth_for(m, freq_arity, freq_leaf_size))
