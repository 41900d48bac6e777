# -*- coding: utf-8 -*-
"""
Dense matrix primitives shared by every other subpackage.

Example:
    from bfmht.linalg import low_rank_factor

    factor = low_rank_factor(A, 1e-6)
    assert factor.left.shape[1] == factor.rank
"""

from bfmht.linalg.dense import (
    LowRankFactor,
    as_dense,
    compress_block,
    low_rank_factor,
    read_dense_text,
    relative_error,
    restrict_rows,
    stack_columns,
    truncation_rank,
    write_dense_text,
)

__all__ = [
    "LowRankFactor",
    "as_dense",
    "compress_block",
    "low_rank_factor",
    "read_dense_text",
    "relative_error",
    "restrict_rows",
    "stack_columns",
    "truncation_rank",
    "write_dense_text",
]
