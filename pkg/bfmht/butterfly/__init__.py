# -*- coding: utf-8 -*-
"""
Butterfly factorization: standard and streaming builds, fast apply and adjoint,
memory accounting and the BFC file format.

Example:
    from bfmht.butterfly import bf_apply, butterfly_factor, write_bfc

    bf = butterfly_factor(phi, space_tree, freq_tree, eps=1e-6)
    y = bf_apply(bf, c)
    write_bfc("phi.bfc", bf)
"""

from bfmht.butterfly.apply import bf_apply, bf_apply_adjoint, estimate_norm
from bfmht.butterfly.container import read_bfc, write_bfc
from bfmht.butterfly.factor import (
    ButterflyFactor,
    StreamStats,
    butterfly_factor,
    butterfly_factor_streaming,
    factor_dense_streaming,
)
from bfmht.butterfly.providers import ColumnBandProvider, DenseColumnProvider
from bfmht.butterfly.report import MemoryReport, memory_report

__all__ = [
    "ButterflyFactor",
    "ColumnBandProvider",
    "DenseColumnProvider",
    "MemoryReport",
    "StreamStats",
    "bf_apply",
    "bf_apply_adjoint",
    "butterfly_factor",
    "butterfly_factor_streaming",
    "estimate_norm",
    "factor_dense_streaming",
    "memory_report",
    "read_bfc",
    "write_bfc",
]
