# -*- coding: utf-8 -*-
"""
Exception hierarchy for bfmht.

Every error names the module that raised it so the command line can report
``error [<module>]: <message>`` and exit with status 1.
"""

from __future__ import annotations

from typing import Any, Optional, Sequence


class BfmhtError(Exception):
    """Base class for all bfmht failures."""

    module: str = "bfmht"

    def __init__(self, message: str, module: Optional[str] = None, **context: Any):
        if module is not None:
            self.module = module
        self.context = context
        super().__init__(message)


class InvalidInputError(BfmhtError, ValueError):
    """Input data violates a documented precondition."""


class ShapeError(BfmhtError, ValueError):
    """Dimensions or lengths do not agree."""


class IndexRangeError(BfmhtError, IndexError):
    """An index is out of range or repeated."""


class ConfigurationError(BfmhtError):
    """Inconsistent configuration, e.g. trees of different depth."""


class StreamError(BfmhtError):
    """A column band provider was exhausted or consumed out of order."""

    module = "butterfly"


class ConvergenceError(BfmhtError):
    """An iterative solver failed to converge."""

    module = "spectral-graph"

    def __init__(
        self,
        message: str,
        residuals: Optional[Sequence[float]] = None,
        node_id: Optional[int] = None,
        **kwargs: Any,
    ):
        self.residuals = list(residuals) if residuals is not None else []
        self.node_id = node_id
        super().__init__(message, **kwargs)


class IsolatedVertexError(InvalidInputError):
    """A graph vertex has zero degree."""

    module = "spectral-graph"

    def __init__(self, vertex: int, **kwargs: Any):
        self.vertex = vertex
        super().__init__(f"vertex {vertex} has zero row sum (isolated)", **kwargs)


class DomainError(BfmhtError, ValueError):
    """Arguments outside the supported envelope of an evaluator."""

    module = "rank-analysis"


class ContainerError(BfmhtError):
    """A serialized artifact is malformed or fails its structural checks."""

    module = "butterfly"
