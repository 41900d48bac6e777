# -*- coding: utf-8 -*-
"""
Closed-form upper bounds on the ε-rank of Fourier and Bessel kernels.

All logarithms are natural.
"""

from __future__ import annotations

import math
from typing import Tuple

from scipy.optimize import minimize_scalar

from bfmht.errors import DomainError

MODULE = "rank-analysis"


def _check_eps(eps: float) -> None:
    if not 0.0 < eps < 1.0:
        raise DomainError(f"eps must lie in (0, 1), got {eps}", module=MODULE)


def bound_disk_rank(b: float, R: float, eps: float) -> float:
    """
    ε-rank bound ``½⌈e·b·R + log 2 + log ε⁻¹⌉²`` of ``e^{iω·x}`` for
    ``|ω| ≤ b`` and ``|x| ≤ R``.
    """
    if b <= 0 or R <= 0:
        raise DomainError(f"radii must be positive, got b={b}, R={R}", module=MODULE)
    _check_eps(eps)
    return 0.5 * math.ceil(math.e * b * R + math.log(2.0) + math.log(1.0 / eps)) ** 2


def bound_bessel_rank(a: float, b: float, R: float, eps: float, xi: float) -> int:
    """
    ε-rank bound ``⌈(2ξ + 2 log 4 + log ε⁻²) / log(8ξ / ((b − a)R))⌉`` of
    ``J_k(ρr)`` for ``a ≤ ρ ≤ b`` and ``0 ≤ r ≤ R``, valid for any order.

    A zero-width interval gives 1.

    Raises:
        DomainError: ``ξ ≤ (b − a)R / 8``, ``b < a`` or eps outside (0, 1)
    """
    _check_eps(eps)
    if b < a or R < 0:
        raise DomainError(f"need a <= b and R >= 0, got a={a}, b={b}, R={R}", module=MODULE)
    width = (b - a) * R
    if width == 0.0:
        return 1
    if xi <= width / 8.0:
        raise DomainError(f"xi={xi} must exceed (b-a)R/8 = {width / 8.0}", module=MODULE)
    numerator = 2.0 * xi + 2.0 * math.log(4.0) + math.log(eps**-2)
    return int(math.ceil(numerator / math.log(8.0 * xi / width)))


def minimize_bessel_bound(a: float, b: float, R: float, eps: float) -> Tuple[int, float]:
    """
    Smallest :func:`bound_bessel_rank` over ``ξ``.

    The ceiling is monotone, so the continuous bound is minimized over
    ``log ξ`` and rounded up at the minimizer.

    Returns:
        ``(bound, ξ)`` at the minimum
    """
    _check_eps(eps)
    if b < a or R < 0:
        raise DomainError(f"need a <= b and R >= 0, got a={a}, b={b}, R={R}", module=MODULE)
    width = (b - a) * R
    if width == 0.0:
        return bound_bessel_rank(a, b, R, eps, 1.0), 1.0
    numerator = 2.0 * math.log(4.0) + math.log(eps**-2)

    def continuous(t: float) -> float:
        xi = math.exp(t)
        return (2.0 * xi + numerator) / math.log(8.0 * xi / width)

    lo = width / 8.0 * (1.0 + 1e-6)
    hi = max(lo * 1e4, 1e3)
    res = minimize_scalar(continuous, bounds=(math.log(lo), math.log(hi)), method="bounded", options={"xatol": 1e-10})
    xi = float(math.exp(res.x))
    return bound_bessel_rank(a, b, R, eps, xi), xi


def bound_annulus_rank(b: float, R: float, eps: float) -> int:
    """
    ε-rank bound ``⌈5/2 + log ε⁻⁴⌉ · ⌈(e/2)·b·R + log ε⁻¹⌉`` of ``e^{iω·x}``
    for ``a ≤ |ω| ≤ b`` and ``|x| ≤ R``. The caller is responsible for
    ``(b − a)R < 1``.
    """
    if b < 0 or R < 0:
        raise DomainError(f"radii must be nonnegative, got b={b}, R={R}", module=MODULE)
    _check_eps(eps)
    first = math.ceil(2.5 + math.log(eps**-4))
    second = math.ceil(math.e / 2.0 * b * R + math.log(1.0 / eps))
    return int(first * second)
