# -*- coding: utf-8 -*-
"""
ColumnBandProvider - abstract source of column bands for streaming builds.

A provider hands out the block columns ``Φ(:, ν)`` of the transform matrix
one frequency leaf at a time, in post-order (left to right), so that the full
matrix never has to exist in memory.
"""

from __future__ import annotations

import logging
from abc import ABC, abstractmethod
from typing import Optional, Set

import numpy as np

from bfmht.errors import StreamError
from bfmht.trees.tree import IndexTree, TreeNode

logger = logging.getLogger(__name__)


class ColumnBandProvider(ABC):
    """
    Abstract base class for column band sources.

    Subclasses implement :meth:`_materialize`; :meth:`next_band` enforces the
    streaming contract (each leaf exactly once, left to right).

    Example:
        class OnesProvider(ColumnBandProvider):
            name = "ones"

            def _materialize(self, indices):
                return np.ones((self.n, indices.size))
    """

    name: str = "base"

    def __init__(self, n: int, m: int):
        self.n = int(n)
        self.m = int(m)
        self._served: Set[int] = set()
        self._last_position = -1

    @property
    def eigenvalues(self) -> Optional[np.ndarray]:
        """Eigenvalues of the columns served so far, when known."""
        return None

    @abstractmethod
    def _materialize(self, indices: np.ndarray) -> np.ndarray:
        """
        Produce the n × len(indices) block of columns.

        Args:
            indices: sorted column indices of one frequency leaf

        Returns:
            Dense array with ``n`` rows
        """

    def bind(self, freq_tree: IndexTree) -> None:
        """Check that the frequency tree covers exactly this provider's columns."""
        if freq_tree.size != self.m:
            raise StreamError(f"{self.name} provider has {self.m} columns, frequency tree covers {freq_tree.size}")

    def next_band(self, leaf: TreeNode) -> np.ndarray:
        """
        Return ``Φ(:, leaf)``.

        Raises:
            StreamError: the leaf was already served, arrives out of order or
                asks for columns the provider does not have
        """
        if leaf.id in self._served:
            raise StreamError(f"band for leaf {leaf.id} was already served")
        if leaf.position <= self._last_position:
            raise StreamError(
                f"leaf {leaf.id} (position {leaf.position}) requested after position {self._last_position}"
            )
        if leaf.size and int(leaf.indices[-1]) >= self.m:
            raise StreamError(f"leaf {leaf.id} asks for column {int(leaf.indices[-1])}, provider has {self.m}")
        band = np.asarray(self._materialize(leaf.indices))
        if band.shape != (self.n, leaf.size):
            raise StreamError(f"{self.name} provider returned shape {band.shape}, expected {(self.n, leaf.size)}")
        self._served.add(leaf.id)
        self._last_position = leaf.position
        return band

    def reset(self) -> None:
        """Allow the provider to be streamed again."""
        self._served.clear()
        self._last_position = -1


class DenseColumnProvider(ColumnBandProvider):
    """Serves bands of an in-memory matrix."""

    name = "dense"

    def __init__(self, matrix, eigenvalues=None):
        self.matrix = np.asarray(matrix)
        super().__init__(*self.matrix.shape)
        self._eigenvalues = None if eigenvalues is None else np.asarray(eigenvalues, dtype=np.float64)

    @property
    def eigenvalues(self) -> Optional[np.ndarray]:
        return self._eigenvalues

    def _materialize(self, indices: np.ndarray) -> np.ndarray:
        return self.matrix[:, indices]
