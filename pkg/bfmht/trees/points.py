# -*- coding: utf-8 -*-
"""
Point clouds and the synthetic geometries used by the pipelines.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from os import PathLike
from typing import Optional, Union

import numpy as np

from bfmht.errors import InvalidInputError

logger = logging.getLogger(__name__)

MODULE = "index-trees"


@dataclass(frozen=True, eq=False)
class PointCloud:
    """n points in R² or R³, one per row."""

    points: np.ndarray

    def __init__(self, points):
        arr = np.asarray(points, dtype=np.float64)
        if arr.ndim == 1:
            arr = arr.reshape(1, -1)
        if arr.ndim != 2 or arr.shape[1] not in (2, 3):
            raise InvalidInputError(f"points must be n x 2 or n x 3, got shape {arr.shape}", module=MODULE)
        if not np.all(np.isfinite(arr)):
            raise InvalidInputError("point coordinates must be finite", module=MODULE)
        object.__setattr__(self, "points", arr)

    @property
    def n(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.n

    @classmethod
    def from_file(cls, path: Union[str, PathLike]) -> "PointCloud":
        """Whitespace or comma separated text, one point per line."""
        with open(path) as fh:
            text = fh.read().replace(",", " ")
        rows = [line.split() for line in text.splitlines() if line.strip() and not line.lstrip().startswith("#")]
        try:
            data = np.array(rows, dtype=np.float64)
        except ValueError as e:
            raise InvalidInputError(f"{path}: cannot parse point cloud ({e})", module=MODULE) from e
        return cls(data)

    def to_file(self, path: Union[str, PathLike]) -> None:
        np.savetxt(path, self.points, fmt="%.17g")


def torus_grid(side: int) -> PointCloud:
    """
    Uniform ``side × side`` cell-centred grid on ``[−π, π)²``.

    Points are ordered with the second coordinate varying fastest.
    """
    if side < 1:
        raise InvalidInputError("grid side must be positive", module=MODULE)
    axis = -np.pi + 2 * np.pi * (np.arange(side) + 0.5) / side
    x1, x2 = np.meshgrid(axis, axis, indexing="ij")
    return PointCloud(np.column_stack([x1.ravel(), x2.ravel()]))


def torus_embedding(points) -> np.ndarray:
    """Map torus parameters to the ring torus in R³ with radii 2 and 1."""
    xy = points.points if isinstance(points, PointCloud) else np.asarray(points, dtype=np.float64)
    x1, x2 = xy[:, 0], xy[:, 1]
    ring = 2.0 + np.cos(x2)
    return np.column_stack([np.cos(x1) * ring, np.sin(x1) * ring, np.sin(x2)])


def noisy_sphere(n: int, radius: float = 1.0, sigma: float = 0.0, seed: Optional[int] = 0) -> PointCloud:
    """
    ``n`` points on a sphere, spread by a Fibonacci lattice, with Gaussian
    radial-and-tangential noise of standard deviation ``sigma``.
    """
    if n < 1:
        raise InvalidInputError("need at least one point", module=MODULE)
    golden = np.pi * (3.0 - np.sqrt(5.0))
    k = np.arange(n)
    z = 1.0 - 2.0 * (k + 0.5) / n
    r = np.sqrt(1.0 - z * z)
    theta = golden * k
    pts = radius * np.column_stack([r * np.cos(theta), r * np.sin(theta), z])
    if sigma > 0:
        rng = np.random.default_rng(seed)
        pts = pts + rng.normal(scale=sigma, size=pts.shape)
    return PointCloud(pts)
