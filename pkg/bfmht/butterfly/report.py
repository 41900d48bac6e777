# -*- coding: utf-8 -*-
"""
Memory accounting of butterfly factorizations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List

from bfmht.butterfly.factor import ButterflyFactor


@dataclass
class MemoryReport:
    """Exact counts taken from the stored factors."""

    n: int
    m: int
    depth: int
    eps: float
    levels: List[Dict] = field(default_factory=list)
    stored_entries: int = 0
    total_bytes: int = 0
    dense_entries: int = 0
    compression: float = 0.0
    block_ranks: List[Dict] = field(default_factory=list)

    def to_dict(self) -> Dict:
        from bfmht.schemas import MemoryReportSchema, sanitize

        return sanitize(MemoryReportSchema().dump(self))


def _level_entry(name: str, arrays, ranks) -> Dict:
    arrays = list(arrays)
    return {
        "level": name,
        "blocks": len(arrays),
        "entries": int(sum(a.size for a in arrays)),
        "max_rank": int(max(ranks, default=0)),
    }


def memory_report(bf: ButterflyFactor) -> MemoryReport:
    """
    Entries per level, bytes, per-block ranks and the compression factor
    ``n·m / stored_entries``.
    """
    L = bf.depth
    levels = [
        _level_entry(
            "row_bases",
            bf.leaf_row_bases.values(),
            [v.shape[1] for v in bf.leaf_row_bases.values()],
        )
    ]
    for level in range(1, L + 1):
        mats = bf.transfer[level - 1].values()
        levels.append(_level_entry(f"transfer_{level}", mats, [r.shape[1] for r in mats]))
    levels.append(
        _level_entry(
            "column_bases",
            bf.leaf_col_bases.values(),
            [u.shape[1] for u in bf.leaf_col_bases.values()],
        )
    )
    stored = bf.stored_entries
    itemsize = 16 if bf.is_complex else 8
    dense = bf.n * bf.m
    block_ranks = [
        {"level": level, "tau": tau, "nu": nu, "rank": rank} for level, tau, nu, rank in bf.rank_table()
    ]
    return MemoryReport(
        n=bf.n,
        m=bf.m,
        depth=L,
        eps=bf.eps,
        levels=levels,
        stored_entries=stored,
        total_bytes=stored * itemsize,
        dense_entries=dense,
        compression=dense / stored if stored else float("inf"),
        block_ranks=block_ranks,
    )
