# -*- coding: utf-8 -*-
"""
Empirical ε-ranks of sampled kernels, and their comparison with the bounds
in :mod:`bfmht.rank.bounds`.

The ε-rank is taken in the max-entry norm: the smallest ``r`` for which the
rank-``r`` SVD truncation differs from the sampled kernel by at most ``ε`` in
every entry. The count of singular values above ``ε`` is reported alongside.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from bfmht.errors import DomainError, InvalidInputError
from bfmht.rank.bessel import bessel_j_table
from bfmht.rank.bounds import bound_annulus_rank, bound_disk_rank, minimize_bessel_bound

logger = logging.getLogger(__name__)

MODULE = "rank-analysis"

KERNELS = ("disk", "annulus", "circle", "bessel")
MIN_RESOLUTION = 64
DEFAULT_RESOLUTION = 64


@dataclass(frozen=True)
class KernelDomain:
    """
    A disk ``B_b``, an annulus ``A_a^b`` or a circle ``C_b`` in the plane.

    Disks have ``a = 0``; circles have ``a = b``.
    """

    kind: str
    a: float
    b: float
    center: Tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.kind not in ("disk", "annulus", "circle"):
            raise InvalidInputError(f"unknown domain kind {self.kind!r}", module=MODULE)
        if not 0.0 <= self.a <= self.b:
            raise InvalidInputError(f"need 0 <= a <= b, got a={self.a}, b={self.b}", module=MODULE)

    @classmethod
    def disk(cls, radius: float, center: Tuple[float, float] = (0.0, 0.0)) -> "KernelDomain":
        if radius <= 0:
            raise InvalidInputError(f"disk radius must be positive, got {radius}", module=MODULE)
        return cls("disk", 0.0, float(radius), tuple(center))

    @classmethod
    def annulus(cls, a: float, b: float) -> "KernelDomain":
        return cls("annulus", float(a), float(b))

    @classmethod
    def circle(cls, radius: float) -> "KernelDomain":
        return cls("circle", float(radius), float(radius))

    def radii(self, resolution: int) -> np.ndarray:
        if self.kind == "circle":
            return np.array([self.b])
        return np.linspace(self.a, self.b, max(8, resolution // 8))

    def samples(self, resolution: int) -> np.ndarray:
        """Tensor grid in polar coordinates, ``resolution`` angles per radius."""
        theta = np.linspace(0.0, 2.0 * np.pi, resolution, endpoint=False)
        rr, tt = np.meshgrid(self.radii(resolution), theta, indexing="ij")
        pts = np.column_stack([(rr * np.cos(tt)).ravel(), (rr * np.sin(tt)).ravel()])
        return pts + np.asarray(self.center)


@dataclass
class EpsRankResult:
    """
    Attributes:
        rank: max-norm ε-rank at the finest resolution sampled
        singular_value_rank: singular values above ε at that resolution
        resolution: finest resolution sampled
        converged: ranks at the base and doubled resolutions agree
        coarse_rank: max-norm ε-rank at the base resolution
    """

    rank: int
    singular_value_rank: int
    resolution: int
    converged: bool = True
    coarse_rank: Optional[int] = None


@dataclass
class RankBoundReport:
    kernel: str
    a: float
    b: float
    R: float
    eps: float
    bound: float
    empirical: int
    singular_value_rank: int
    resolution: int
    converged: bool
    order: int = 0
    xi: Optional[float] = None
    extra: Dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.empirical <= self.bound

    def as_row(self) -> Dict:
        return {
            "kernel": self.kernel,
            "k": self.order,
            "a": self.a,
            "b": self.b,
            "R": self.R,
            "eps": self.eps,
            "resolution": self.resolution,
            "empirical": self.empirical,
            "singular_value_rank": self.singular_value_rank,
            "bound": self.bound,
            "passed": self.passed,
            "converged": self.converged,
        }


def eps_rank_of_matrix(A, eps: float) -> Tuple[int, int]:
    """
    Max-norm ε-rank of a matrix.

    Returns:
        ``(rank, singular_value_rank)``
    """
    A = np.asarray(A)
    if A.size == 0:
        return 0, 0
    U, s, Vh = scipy.linalg.svd(A, full_matrices=False, check_finite=False)
    upper = int(np.count_nonzero(s > eps))
    # max |E| >= ||E||_F / sqrt(N1 N2) >= s[r] / sqrt(N1 N2)
    lower = int(np.count_nonzero(s > eps * np.sqrt(A.shape[0] * A.shape[1])))
    residual = A - (U[:, :lower] * s[:lower]) @ Vh[:lower]
    rank = lower
    while rank < upper and np.max(np.abs(residual)) > eps:
        residual -= s[rank] * np.outer(U[:, rank], Vh[rank])
        rank += 1
    return rank, upper


def kernel_matrix(
    kernel: str,
    freq: KernelDomain,
    space: KernelDomain,
    resolution: int,
    order: int = 0,
) -> np.ndarray:
    """
    Sampled kernel: ``e^{iω·x}`` between the frequency and space domains, or
    ``J_k(ρr)`` for ``ρ ∈ [freq.a, freq.b]`` and ``r ∈ [0, space.b]`` when
    ``kernel == "bessel"``.
    """
    if kernel == "bessel":
        rho = np.linspace(freq.a, freq.b, resolution)
        r = np.linspace(0.0, space.b, resolution)
        prod = np.outer(rho, r)
        return bessel_j_table(order, prod.ravel())[order].reshape(prod.shape)
    if kernel not in KERNELS:
        raise InvalidInputError(f"unknown kernel {kernel!r}", module=MODULE)
    omega = freq.samples(resolution)
    x = space.samples(resolution)
    return np.exp(1j * (omega @ x.T))


def empirical_eps_rank(
    kernel: str,
    freq: KernelDomain,
    space: KernelDomain,
    eps: float,
    resolution: int = DEFAULT_RESOLUTION,
    order: int = 0,
    check_convergence: bool = True,
) -> EpsRankResult:
    """
    Max-norm ε-rank of a sampled kernel, rechecked at double resolution.

    Raises:
        InvalidInputError: resolution below 64 or an unknown kernel
    """
    if resolution < MIN_RESOLUTION:
        raise InvalidInputError(f"resolution must be at least {MIN_RESOLUTION}, got {resolution}", module=MODULE)
    rank, sv_rank = eps_rank_of_matrix(kernel_matrix(kernel, freq, space, resolution, order), eps)
    if not check_convergence:
        return EpsRankResult(rank, sv_rank, resolution)
    fine = 2 * resolution
    fine_rank, fine_sv = eps_rank_of_matrix(kernel_matrix(kernel, freq, space, fine, order), eps)
    converged = abs(fine_rank - rank) <= max(1, int(np.ceil(0.05 * rank)))
    if not converged:
        logger.warning(
            f"{kernel} eps-rank not converged: {rank} at resolution {resolution}, {fine_rank} at {fine}"
        )
    return EpsRankResult(fine_rank, fine_sv, fine, converged=converged, coarse_rank=rank)


def rank_bound_report(
    kernel: str,
    a: float,
    b: float,
    R: float,
    eps: float,
    resolution: int = DEFAULT_RESOLUTION,
    order: int = 0,
    check_convergence: bool = True,
) -> RankBoundReport:
    """
    Empirical ε-rank of one kernel configuration next to its bound.

    ``disk``: ``|ω| ≤ b`` to ``|x| ≤ R``; ``annulus``: ``a ≤ |ω| ≤ b`` to
    ``|x| ≤ R``; ``circle``: ``|ω| = b`` to ``|x| = R``; ``bessel``: ``J_k(ρr)``
    on ``[a, b] × [0, R]``.
    """
    xi = None
    extra: Dict = {}
    if kernel == "disk":
        freq, space = KernelDomain.disk(b), KernelDomain.disk(R)
        bound = bound_disk_rank(b, R, eps)
    elif kernel == "annulus":
        freq, space = KernelDomain.annulus(a, b), KernelDomain.disk(R)
        bound = bound_annulus_rank(b, R, eps)
        extra["narrow"] = (b - a) * R < 1.0
    elif kernel == "circle":
        freq, space = KernelDomain.circle(b), KernelDomain.circle(R)
        bound = bound_annulus_rank(b, R, eps)
    elif kernel == "bessel":
        freq, space = KernelDomain.annulus(a, b), KernelDomain.disk(R)
        bound, xi = minimize_bessel_bound(a, b, R, eps)
    else:
        raise DomainError(f"unknown kernel {kernel!r}; expected one of {', '.join(KERNELS)}", module=MODULE)
    result = empirical_eps_rank(kernel, freq, space, eps, resolution, order, check_convergence)
    report = RankBoundReport(
        kernel=kernel,
        a=a,
        b=b,
        R=R,
        eps=eps,
        bound=bound,
        empirical=result.rank,
        singular_value_rank=result.singular_value_rank,
        resolution=result.resolution,
        converged=result.converged,
        order=order,
        xi=xi,
        extra=extra,
    )
    logger.info(
        f"{kernel} k={order} a={a:g} b={b:g} R={R:g} eps={eps:g}: empirical {report.empirical}, "
        f"bound {report.bound:g}{'' if report.passed else ' VIOLATED'}"
    )
    return report


def fit_power_law(x: Sequence[float], y: Sequence[float]) -> Tuple[float, float]:
    """
    Least-squares fit of ``y ≈ C x^p`` on log–log axes.

    Returns:
        ``(p, C)``

    Raises:
        InvalidInputError: fewer than two points or nonpositive values
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.size < 2 or x.size != y.size:
        raise InvalidInputError("need at least two matching (x, y) points", module=MODULE)
    if np.any(x <= 0) or np.any(y <= 0):
        raise InvalidInputError("power-law fit needs positive values", module=MODULE)
    slope, intercept = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope), float(np.exp(intercept))
