# -*- coding: utf-8 -*-
"""
Gaussian random fields from a truncated Karhunen–Loève expansion.

A field is ``Y = Φ (√S ⊙ z)`` with ``z`` standard normal. Normal variates
come from Box–Muller on a Philox stream keyed by the seed, with the sample
index in the counter, so every sample is reproducible on its own and on any
platform.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from bfmht.applications.densities import SpectralDensity
from bfmht.butterfly.apply import bf_apply, bf_apply_adjoint
from bfmht.butterfly.factor import ButterflyFactor
from bfmht.errors import ConfigurationError, ShapeError

logger = logging.getLogger(__name__)

MODULE = "applications"


@dataclass(eq=False)
class GrfModel:
    """
    Covariance ``Φ S Φ^*`` of a random field.

    Attributes:
        factorization: the transform ``Φ``
        density: the spectrum ``S``
        eigenvalues: eigenvalue of each column; defaults to the values stored
            on the factorization's frequency tree
    """

    factorization: ButterflyFactor
    density: SpectralDensity
    eigenvalues: Optional[np.ndarray] = None
    spectrum: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.eigenvalues is None:
            self.eigenvalues = self.factorization.eigenvalues
        if self.eigenvalues is None:
            raise ConfigurationError(
                "the factorization carries no eigenvalues; pass them explicitly", module=MODULE
            )
        self.eigenvalues = np.asarray(self.eigenvalues, dtype=np.float64)
        if self.eigenvalues.size != self.factorization.m:
            raise ShapeError(
                f"{self.eigenvalues.size} eigenvalues for {self.factorization.m} columns", module=MODULE
            )
        self.spectrum = self.density(self.eigenvalues)

    @property
    def amplitudes(self) -> np.ndarray:
        return np.sqrt(self.spectrum)


def standard_normals(seed: int, index: int, count: int) -> np.ndarray:
    """
    ``count`` standard normal variates for sample ``index`` of stream ``seed``.

    Uniforms come from Philox-4x64 with key ``seed`` and counter
    ``[0, 0, index, 0]``; pairs are turned into normals by Box–Muller.
    """
    bitgen = np.random.Philox(key=int(seed), counter=[0, 0, int(index), 0])
    half = (count + 1) // 2
    u = np.random.Generator(bitgen).random(2 * half)
    u1, u2 = 1.0 - u[:half], u[half:]
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = 2.0 * np.pi * u2
    return np.concatenate([radius * np.cos(angle), radius * np.sin(angle)])[:count]


def grf_sample(model: GrfModel, seed: int, index: int = 0) -> np.ndarray:
    """One field ``Φ(√S ⊙ z)``; identical for identical ``(seed, index)``."""
    z = standard_normals(seed, index, model.factorization.m)
    return bf_apply(model.factorization, model.amplitudes * z)


def grf_samples(model: GrfModel, seed: int, count: int, start: int = 0) -> np.ndarray:
    """
    ``count`` fields as rows of a ``count × n`` array, computed with one block
    apply. Row ``i`` matches ``grf_sample(model, seed, start + i)`` to roundoff.
    """
    m = model.factorization.m
    Z = np.zeros((m, count))
    for i in range(count):
        Z[:, i] = standard_normals(seed, start + i, m)
    Y = bf_apply(model.factorization, model.amplitudes[:, None] * Z)
    logger.debug(f"{count} random fields from seed {seed}")
    return Y.T


def covariance_matvec(model: GrfModel, v) -> np.ndarray:
    """``Φ (S ⊙ Φ^* v)``."""
    bf = model.factorization
    v = np.asarray(v)
    if v.shape[0] != bf.n:
        raise ShapeError(f"expected {bf.n} values, got {v.shape[0]}", module=MODULE)
    w = bf_apply_adjoint(bf, v)
    scale = model.spectrum if w.ndim == 1 else model.spectrum[:, None]
    return bf_apply(bf, scale * w)


def sample_covariance(samples, pairs: Sequence[Tuple[int, int]]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Monte-Carlo estimates of ``E[Y_i conj(Y_j)]`` for zero-mean fields.

    Args:
        samples: ``count × n`` array, one field per row
        pairs: point index pairs ``(i, j)``

    Returns:
        ``(estimates, standard_errors)``, one entry per pair
    """
    Y = np.asarray(samples)
    count = Y.shape[0]
    estimates = np.empty(len(pairs), dtype=np.result_type(Y.dtype, np.float64))
    errors = np.empty(len(pairs))
    for k, (i, j) in enumerate(pairs):
        products = Y[:, i] * np.conj(Y[:, j])
        estimates[k] = products.mean()
        errors[k] = np.sqrt(np.mean(np.abs(products - estimates[k]) ** 2) / count)
    return estimates, errors
