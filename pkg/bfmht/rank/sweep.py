# -*- coding: utf-8 -*-
"""
Parameter sweeps: memory of the torus transform against n, and rank bounds
against empirical ε-ranks over a parameter grid.
"""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field
from os import PathLike
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from bfmht.errors import InvalidInputError
from bfmht.rank.empirical import RankBoundReport, fit_power_law, rank_bound_report
from bfmht.utils import presets
from bfmht.utils.parallel import ordered_map
from bfmht.utils.tables import write_csv

logger = logging.getLogger(__name__)

MODULE = "rank-analysis"


@dataclass
class SweepResult:
    """Rows of a complexity sweep and the fitted log–log slope."""

    rows: List[Dict] = field(default_factory=list)
    slope: float = float("nan")
    prefactor: float = float("nan")

    def to_csv(self, path: Union[str, PathLike]) -> None:
        write_csv(path, self.rows, presets.csv_columns["bench"])


def _grid_side(n: int) -> int:
    side = math.isqrt(n)
    if side * side != n:
        raise InvalidInputError(f"torus sizes must be perfect squares, got {n}", module=MODULE)
    return side


def complexity_sweep(
    sizes: Sequence[int],
    m_ratio: float = 25.0,
    eps: float = 1e-3,
    freq_arity: int = 4,
    streaming: bool = True,
    threads: Optional[int] = 1,
    out: Optional[Union[str, PathLike]] = None,
) -> SweepResult:
    """
    Factor the torus transform at each size with ``m = ⌈n / m_ratio⌉`` and fit
    the slope of stored entries against ``n``.

    Raises:
        InvalidInputError: sizes not ascending or not perfect squares
    """
    from bfmht.butterfly.report import memory_report
    from bfmht.torus import m_for_ratio, torus_factorization

    sizes = [int(n) for n in sizes]
    if not sizes:
        raise InvalidInputError("no sizes given", module=MODULE)
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise InvalidInputError(f"sizes must be strictly ascending, got {sizes}", module=MODULE)
    result = SweepResult()
    for n in sizes:
        side = _grid_side(n)
        m = m_for_ratio(n, m_ratio)
        start = time.perf_counter()
        bf, _, _ = torus_factorization(side, m, eps, freq_arity=freq_arity, streaming=streaming, threads=threads)
        seconds = time.perf_counter() - start
        report = memory_report(bf)
        result.rows.append(
            {
                "n": n,
                "m": m,
                "stored_entries": report.stored_entries,
                "dense_entries": report.dense_entries,
                "compression": report.compression,
                "seconds": round(seconds, 3),
            }
        )
        logger.info(f"n={n}, m={m}: {report.stored_entries} entries ({report.compression:.1f}x), {seconds:.1f}s")
        del bf
    if len(result.rows) >= 2:
        result.slope, result.prefactor = fit_power_law(
            [row["n"] for row in result.rows], [row["stored_entries"] for row in result.rows]
        )
        logger.info(f"stored entries ~ n^{result.slope:.3f}")
    if out is not None:
        result.to_csv(out)
    return result


def rank_study(
    kernel: str,
    a_values: Iterable[float],
    b_values: Iterable[float],
    R_values: Iterable[float],
    eps_values: Iterable[float],
    resolution: int = 64,
    orders: Sequence[int] = (0,),
    threads: Optional[int] = 1,
    out: Optional[Union[str, PathLike]] = None,
) -> List[RankBoundReport]:
    """
    :func:`rank_bound_report` over the product of the parameter lists.
    Points run in parallel; each is independent.

    Annulus points with ``(b − a)R ≥ 1`` and points with ``a > b`` are skipped.
    """
    points: List[Tuple[float, float, float, float, int]] = []
    for eps in eps_values:
        for a in a_values:
            for b in b_values:
                for R in R_values:
                    for k in orders:
                        if a > b:
                            continue
                        if kernel == "annulus" and (b - a) * R >= 1.0:
                            continue
                        points.append((a, b, R, eps, k))
    reports = ordered_map(
        lambda p: rank_bound_report(kernel, p[0], p[1], p[2], p[3], resolution=resolution, order=p[4]),
        points,
        threads,
    )
    violations = [r for r in reports if not r.passed]
    if violations:
        logger.warning(f"{len(violations)} of {len(reports)} {kernel} points exceed their bound")
    if out is not None:
        write_csv(out, [r.as_row() for r in reports], presets.csv_columns["rank"])
    return reports
