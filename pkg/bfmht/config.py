# -*- coding: utf-8 -*-
"""
Run configuration of the command line, validated with Pydantic before any
compute starts.
"""

from __future__ import annotations

from enum import Enum
from pathlib import Path
from typing import Optional

from pydantic import BaseModel, ConfigDict, field_validator, model_validator

from bfmht.trees.tree import TREE_ARITIES

GEOMETRY_COMMANDS = ("factorize", "eigenmaps")


class TreeKind(str, Enum):
    QUADTREE = "quadtree"
    FIEDLER = "fiedler"


class GeometrySource(str, Enum):
    GRID = "grid"
    POINTS = "points"
    MATRIX = "matrix"
    SPHERE = "sphere"


class RunConfig(BaseModel):
    """
    Everything a geometry-driven run needs.

    Exactly one geometry source is given: a torus grid side, a point-cloud
    file, a Matrix Market graph, or the size of a synthetic noisy sphere.
    """

    model_config = ConfigDict(extra="forbid", use_enum_values=False)

    subcommand: str = "factorize"

    grid: Optional[int] = None
    points: Optional[Path] = None
    matrix: Optional[Path] = None
    sphere: Optional[int] = None
    sigma: float = 0.01
    radius: float = 1.0

    m: Optional[int] = None
    m_ratio: Optional[float] = None
    eps: float = 1e-3

    tree: Optional[TreeKind] = None
    freq_arity: int = 4
    space_leaf_size: int = 256
    freq_leaf_size: int = 64
    band_size: Optional[int] = None
    streaming: bool = True

    heat_scale: Optional[float] = None
    threshold: Optional[float] = None

    out: Optional[Path] = None
    seed: int = 0
    threads: int = 1

    @field_validator("grid", "sphere", "m", "band_size")
    @classmethod
    def validate_positive_int(cls, v: Optional[int]) -> Optional[int]:
        if v is not None and v < 1:
            raise ValueError("must be a positive integer")
        return v

    @field_validator("m_ratio", "heat_scale", "threshold", "radius")
    @classmethod
    def validate_positive(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and not v > 0:
            raise ValueError("must be positive")
        return v

    @field_validator("sigma")
    @classmethod
    def validate_sigma(cls, v: float) -> float:
        if v < 0:
            raise ValueError("noise level must be nonnegative")
        return v

    @field_validator("eps")
    @classmethod
    def validate_eps(cls, v: float) -> float:
        if not 0.0 < v < 1.0:
            raise ValueError("tolerance must lie in (0, 1)")
        return v

    @field_validator("freq_arity")
    @classmethod
    def validate_arity(cls, v: int) -> int:
        if v not in TREE_ARITIES:
            raise ValueError(f"tree arity must be one of {sorted(TREE_ARITIES)}")
        return v

    @field_validator("space_leaf_size", "freq_leaf_size", "threads")
    @classmethod
    def validate_at_least_one(cls, v: int) -> int:
        if v < 1:
            raise ValueError("must be at least 1")
        return v

    @field_validator("points", "matrix")
    @classmethod
    def validate_file(cls, v: Optional[Path]) -> Optional[Path]:
        if v is not None and not v.is_file():
            raise ValueError(f"no such file: {v}")
        return v

    @model_validator(mode="after")
    def check_consistency(self) -> "RunConfig":
        if self.subcommand not in GEOMETRY_COMMANDS:
            raise ValueError(f"unknown geometry subcommand {self.subcommand!r}")
        given = [s for s in GeometrySource if getattr(self, s.value) is not None]
        if len(given) != 1:
            raise ValueError("give exactly one geometry source: --grid, --points, --matrix or --sphere")
        if self.m is not None and self.m_ratio is not None:
            raise ValueError("give either --m or --m-ratio, not both")
        source = given[0]

        if self.subcommand == "factorize":
            if source is GeometrySource.SPHERE:
                raise ValueError("a sphere cloud has no closed-form basis; use the eigenmaps subcommand")
            if self.tree is None:
                self.tree = TreeKind.FIEDLER if source is GeometrySource.MATRIX else TreeKind.QUADTREE
            if self.tree is TreeKind.FIEDLER and source is GeometrySource.POINTS:
                raise ValueError("the fiedler tree needs a graph source (--grid or --matrix)")
            if self.tree is TreeKind.QUADTREE and source is GeometrySource.MATRIX:
                raise ValueError("a matrix source has no coordinates for a quadtree; use --tree fiedler")
        else:
            if source in (GeometrySource.GRID, GeometrySource.MATRIX):
                raise ValueError("eigenmaps runs on a point cloud (--points or --sphere)")
            if self.tree is TreeKind.QUADTREE:
                raise ValueError("eigenmaps always builds a fiedler tree")
            self.tree = TreeKind.FIEDLER

        if self.grid is not None and self.m is not None and self.m > self.grid**2:
            raise ValueError(f"m={self.m} exceeds the {self.grid**2} grid points")
        if self.sphere is not None and self.m is not None and self.m > self.sphere:
            raise ValueError(f"m={self.m} exceeds the {self.sphere} sphere points")
        return self

    @property
    def source(self) -> GeometrySource:
        return next(s for s in GeometrySource if getattr(self, s.value) is not None)

    def resolve_m(self, n: int) -> int:
        """Explicit ``m``, else ``⌈n / m_ratio⌉`` (ratio 25 when neither is set)."""
        from bfmht.torus import m_for_ratio

        if self.m is not None:
            return self.m
        return m_for_ratio(n, self.m_ratio or 25.0)
