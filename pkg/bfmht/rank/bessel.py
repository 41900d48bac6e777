# -*- coding: utf-8 -*-
"""
Bessel functions of the first kind of integer order, and the Chebyshev
expansion of ``ρ ↦ J_k(ρr)`` on an interval ``[a, b]``.

Small arguments use the power series. Everything else uses Miller's
downward recurrence started well above both the order and the argument,
normalized with ``1 = J₀(x) + 2 Σ_j J_{2j}(x)``.
"""

from __future__ import annotations

import logging
import math
from typing import Optional

import numpy as np
from numpy.polynomial import chebyshev
from scipy.special import gammaln

from bfmht.errors import DomainError

logger = logging.getLogger(__name__)

MODULE = "rank-analysis"

MAX_ORDER = 200
MAX_ARGUMENT = 1e4
SERIES_CUTOFF = 1.0
SERIES_TERMS = 30

_RESCALE_AT = 1e250
_RESCALE_BY = 1e-250


def _check_arguments(x: np.ndarray) -> None:
    bad = ~((x >= 0.0) & (x <= MAX_ARGUMENT))
    if np.any(bad):
        raise DomainError(f"argument {x[bad][0]} outside [0, {MAX_ARGUMENT:g}]", module=MODULE)


def _series(kmax: int, x: np.ndarray) -> np.ndarray:
    orders = np.arange(kmax + 1)[:, None]
    out = np.zeros((kmax + 1, x.size))
    out[0, x == 0.0] = 1.0
    nonzero = x > 0.0
    if not np.any(nonzero):
        return out
    log_half = np.log(x[nonzero] / 2.0)[None, :]
    acc = np.zeros((kmax + 1, log_half.shape[1]))
    # smallest terms first
    for j in range(SERIES_TERMS - 1, -1, -1):
        term = np.exp((2 * j + orders) * log_half - gammaln(j + 1) - gammaln(j + orders + 1))
        acc += term if j % 2 == 0 else -term
    out[:, nonzero] = acc
    return out


def _miller(kmax: int, x: np.ndarray) -> np.ndarray:
    top = max(kmax, int(math.ceil(x.max())))
    start = top + int(math.sqrt(160 * top)) + 20
    start += start % 2
    vals = np.zeros((start + 2, x.size))
    vals[start] = 1.0
    two_over_x = 2.0 / x
    for j in range(start, 0, -1):
        vals[j - 1] = j * two_over_x * vals[j] - vals[j + 1]
        big = np.abs(vals[j - 1]) > _RESCALE_AT
        if np.any(big):
            vals[j - 1 :, big] *= _RESCALE_BY
    norm = vals[0] + 2.0 * np.sum(vals[2 : start + 1 : 2], axis=0)
    return vals[: kmax + 1] / norm


def bessel_j_table(kmax: int, x) -> np.ndarray:
    """
    ``J_k(x_i)`` for ``k = 0..kmax`` and every argument, as a
    ``(kmax + 1) × len(x)`` array.

    Raises:
        DomainError: negative order or an argument outside ``[0, 1e4]``
    """
    if kmax < 0:
        raise DomainError(f"order must be nonnegative, got {kmax}", module=MODULE)
    x = np.atleast_1d(np.asarray(x, dtype=np.float64)).ravel()
    _check_arguments(x)
    out = np.empty((kmax + 1, x.size))
    small = x <= SERIES_CUTOFF
    if np.any(small):
        out[:, small] = _series(kmax, x[small])
    if not np.all(small):
        out[:, ~small] = _miller(kmax, x[~small])
    return out


def bessel_j_orders(kmax: int, x: float) -> np.ndarray:
    """``[J_0(x), …, J_kmax(x)]`` for one argument."""
    return bessel_j_table(kmax, [x])[:, 0]


def bessel_j(k: int, x):
    """
    ``J_k(x)`` for an integer order ``0 ≤ k ≤ 200`` and ``0 ≤ x ≤ 1e4``.

    ``x`` may be a scalar or an array.

    Raises:
        DomainError: outside that envelope
    """
    if not 0 <= k <= MAX_ORDER:
        raise DomainError(f"order {k} outside [0, {MAX_ORDER}]", module=MODULE)
    xs = np.asarray(x, dtype=np.float64)
    values = bessel_j_table(k, xs)[k]
    if xs.ndim == 0:
        return float(values[0])
    return values.reshape(xs.shape)


def bessel_envelope(k: int, x: float, xi: Optional[float] = None) -> float:
    """
    Upper bound on ``|J_k(x)|``: ``(x/2)^k / k!``, or ``e^ξ (x/2ξ)^k`` when
    ``ξ`` is given. ``ξ = e·x/2`` gives ``e^{e·x/2 − k}``.
    """
    if x == 0.0:
        return 1.0 if k == 0 else 0.0
    if xi is None:
        return math.exp(k * math.log(x / 2.0) - math.lgamma(k + 1))
    return math.exp(xi + k * math.log(x / (2.0 * xi)))


def _signed(table: np.ndarray, orders: np.ndarray) -> np.ndarray:
    """``J_n`` for possibly negative integer ``n`` using ``J_{−n} = (−1)^n J_n``."""
    mag = np.abs(orders)
    sign = np.where((orders < 0) & (mag % 2 == 1), -1.0, 1.0)
    return sign * table[mag]


def default_q_max(a: float, b: float, r: float) -> int:
    """Terms per coefficient so the neglected tail stays below roundoff."""
    beta = (b - a) * r / 4.0
    return int(math.ceil(math.e * beta / 2.0)) + 40


def bessel_chebyshev_coeffs(
    k: int,
    a: float,
    b: float,
    r: float,
    l_max: int,
    q_max: Optional[int] = None,
) -> np.ndarray:
    """
    Chebyshev coefficients ``c_{k0}, …, c_{k,l_max}`` of ``ρ ↦ J_k(ρr)`` on
    ``[a, b]``, so that

        J_k(ρr) = c_{k0}/2 + Σ_{ℓ≥1} c_{kℓ} T_ℓ(2(ρ − a)/(b − a) − 1).

    Each coefficient is a sum over ``p = 2q`` (even ℓ) or ``p = 2q + 1``
    (odd ℓ), ``q = 0..q_max``, of

        2 η_p J_{(p+ℓ)/2}(β) J_{(p−ℓ)/2}(β) [J_{k−p}(γ) + (−1)^p J_{k+p}(γ)]

    with ``β = (b − a)r/4``, ``γ = (b + a)r/2``, ``η_0 = 1/2`` and ``η_p = 1``
    otherwise.

    Raises:
        DomainError: negative order, ``b < a`` or a negative radius
    """
    if k < 0 or l_max < 0:
        raise DomainError("order and coefficient count must be nonnegative", module=MODULE)
    if b < a or a < 0 or r < 0:
        raise DomainError(f"need 0 <= a <= b and r >= 0, got a={a}, b={b}, r={r}", module=MODULE)
    if q_max is None:
        q_max = default_q_max(a, b, r)
    beta = (b - a) * r / 4.0
    gamma = (b + a) * r / 2.0
    p_top = 2 * q_max + 1
    j_beta = bessel_j_orders((p_top + l_max) // 2 + 1, beta)
    j_gamma = bessel_j_orders(k + p_top, gamma)

    coeffs = np.zeros(l_max + 1)
    q = np.arange(q_max + 1)
    for ell in range(l_max + 1):
        p = 2 * q + (ell % 2)
        eta = np.where(p == 0, 0.5, 1.0)
        head = _signed(j_beta, (p + ell) // 2) * _signed(j_beta, (p - ell) // 2)
        tail = _signed(j_gamma, k - p) + np.where(p % 2 == 0, 1.0, -1.0) * j_gamma[k + p]
        coeffs[ell] = np.sum((2.0 * eta * head * tail)[::-1])
    return coeffs


def chebyshev_reconstruct(coeffs, a: float, b: float, rho) -> np.ndarray:
    """Evaluate ``c_0/2 + Σ c_ℓ T_ℓ(t(ρ))`` with ``t`` mapping ``[a, b]`` onto ``[−1, 1]``."""
    c = np.array(coeffs, dtype=np.float64)
    c[0] /= 2.0
    rho = np.asarray(rho, dtype=np.float64)
    if b == a:
        t = np.zeros_like(rho)
    else:
        t = 2.0 * (rho - a) / (b - a) - 1.0
    return chebyshev.chebval(t, c)
