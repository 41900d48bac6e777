# -*- coding: utf-8 -*-
"""
Row (space) and column (frequency) trees for butterfly factorizations.

Example:
    from bfmht.trees import build_frequency_tree, build_quadtree, torus_grid

    points = torus_grid(64)
    space = build_quadtree(points, depth=3)
    freq = build_frequency_tree(eigenvalues, arity=4, depth=3)
"""

from bfmht.trees.fiedler import BuildReport, SplitRecord, build_fiedler_tree, pad_tree
from bfmht.trees.points import PointCloud, noisy_sphere, torus_embedding, torus_grid
from bfmht.trees.tree import (
    IndexTree,
    TreeNode,
    build_count_tree,
    build_frequency_tree,
    build_quadtree,
    choose_depth,
    depth_for,
)

__all__ = [
    "BuildReport",
    "IndexTree",
    "PointCloud",
    "SplitRecord",
    "TreeNode",
    "build_count_tree",
    "build_fiedler_tree",
    "build_frequency_tree",
    "build_quadtree",
    "choose_depth",
    "depth_for",
    "noisy_sphere",
    "pad_tree",
    "torus_embedding",
    "torus_grid",
]
