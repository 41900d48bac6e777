# -*- coding: utf-8 -*-
"""
SpectralDensity - nonnegative functions of the eigenvalue.

The same type serves as a covariance spectrum for random fields and as a
filter on expansion coefficients. Densities parse from short strings::

    matern:nu=3,ell=0.1,var=1
    bump:l0=5500,eta=5000,amp=6400,offset=1
    lowpass:cut=1000
    const:value=1
    table:path/to/values.csv
    preset:smooth
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional

import numpy as np

from bfmht.errors import InvalidInputError, ShapeError

logger = logging.getLogger(__name__)

MODULE = "applications"

SURFACE_DIM = 2


class DensityFamily(Enum):
    """Supported spectral density families."""

    MATERN = "matern"
    GAUSS_BUMP = "bump"
    LOWPASS = "lowpass"
    CONSTANT = "const"
    TABULATED = "table"


_REQUIRED: Dict[DensityFamily, tuple] = {
    DensityFamily.MATERN: ("nu", "ell"),
    DensityFamily.GAUSS_BUMP: ("l0", "eta"),
    DensityFamily.LOWPASS: ("cut",),
    DensityFamily.CONSTANT: (),
    DensityFamily.TABULATED: (),
}

_DEFAULTS: Dict[DensityFamily, Dict[str, float]] = {
    DensityFamily.MATERN: {"var": 1.0},
    DensityFamily.GAUSS_BUMP: {"amp": 1.0, "offset": 0.0},
    DensityFamily.LOWPASS: {},
    DensityFamily.CONSTANT: {"value": 1.0},
    DensityFamily.TABULATED: {},
}


@dataclass(eq=False)
class SpectralDensity:
    """
    ``S(λ)`` of one family.

    Matérn: ``σ² (2ν/ℓ² + λ)^{−(ν + 1)}``, rescaled so that its values over
    the eigenvalues it is evaluated on sum to ``σ²``.
    Bump: ``offset + amp · exp(−(λ − λ₀)² / η²)``.
    Low-pass: 1 for ``λ < cut``, else 0.
    Tabulated: one value per eigenvalue, in order.
    """

    family: DensityFamily
    params: Dict[str, float] = field(default_factory=dict)
    table: Optional[np.ndarray] = None

    def __post_init__(self):
        missing = [p for p in _REQUIRED[self.family] if p not in self.params]
        if missing:
            raise InvalidInputError(f"{self.family.value} density needs {', '.join(missing)}", module=MODULE)
        self.params = {**_DEFAULTS[self.family], **self.params}
        if self.family is DensityFamily.MATERN and (self.params["nu"] <= 0 or self.params["ell"] <= 0):
            raise InvalidInputError("Matern nu and ell must be positive", module=MODULE)
        if self.family is DensityFamily.GAUSS_BUMP and self.params["eta"] <= 0:
            raise InvalidInputError("bump width eta must be positive", module=MODULE)
        if self.family is DensityFamily.TABULATED:
            if self.table is None:
                raise InvalidInputError("tabulated density needs values", module=MODULE)
            self.table = np.asarray(self.table, dtype=np.float64).ravel()

    @classmethod
    def matern(cls, nu: float, ell: float, var: float = 1.0) -> "SpectralDensity":
        return cls(DensityFamily.MATERN, {"nu": nu, "ell": ell, "var": var})

    @classmethod
    def bump(cls, l0: float, eta: float, amp: float = 1.0, offset: float = 0.0) -> "SpectralDensity":
        return cls(DensityFamily.GAUSS_BUMP, {"l0": l0, "eta": eta, "amp": amp, "offset": offset})

    @classmethod
    def lowpass(cls, cut: float) -> "SpectralDensity":
        return cls(DensityFamily.LOWPASS, {"cut": cut})

    @classmethod
    def constant(cls, value: float = 1.0) -> "SpectralDensity":
        return cls(DensityFamily.CONSTANT, {"value": value})

    @classmethod
    def tabulated(cls, values) -> "SpectralDensity":
        return cls(DensityFamily.TABULATED, table=values)

    @classmethod
    def parse(cls, text: str) -> "SpectralDensity":
        """
        Build a density from ``family:key=value,...``.

        Raises:
            InvalidInputError: unknown family, preset or malformed parameters
        """
        name, _, rest = text.strip().partition(":")
        name = name.strip().lower()
        if name == "preset":
            from bfmht.utils import presets

            resolved = presets.density_preset(rest.strip())
            if resolved is None:
                raise InvalidInputError(f"unknown density preset {rest.strip()!r}", module=MODULE)
            return cls.parse(resolved)
        try:
            family = DensityFamily(name)
        except ValueError:
            known = ", ".join(f.value for f in DensityFamily)
            raise InvalidInputError(
                f"unknown density family {name!r}; expected one of {known}, preset", module=MODULE
            ) from None
        if family is DensityFamily.TABULATED:
            from bfmht.utils.tables import read_vector

            return cls.tabulated(np.real(read_vector(rest.strip())))
        params = {}
        for item in filter(None, (p.strip() for p in rest.split(","))):
            key, sep, value = item.partition("=")
            if not sep:
                raise InvalidInputError(f"expected key=value in density string, got {item!r}", module=MODULE)
            try:
                params[key.strip()] = float(value)
            except ValueError:
                raise InvalidInputError(
                    f"density parameter {key.strip()} is not a number: {value!r}", module=MODULE
                ) from None
        return cls(family, params)

    def __str__(self) -> str:
        if self.family is DensityFamily.TABULATED:
            return f"table:<{self.table.size} values>"
        return f"{self.family.value}:" + ",".join(f"{k}={v:g}" for k, v in self.params.items())

    def __call__(self, eigenvalues) -> np.ndarray:
        """
        Values at the given eigenvalues.

        Raises:
            ShapeError: a tabulated density of another length
            InvalidInputError: a negative or non-finite value
        """
        lam = np.asarray(eigenvalues, dtype=np.float64)
        p = self.params
        if self.family is DensityFamily.MATERN:
            kappa2 = 2.0 * p["nu"] / p["ell"] ** 2
            raw = (kappa2 + np.clip(lam, 0.0, None)) ** (-(p["nu"] + SURFACE_DIM / 2.0))
            total = raw.sum()
            values = p["var"] * raw / total if total > 0 else raw
        elif self.family is DensityFamily.GAUSS_BUMP:
            values = p["offset"] + p["amp"] * np.exp(-((lam - p["l0"]) ** 2) / p["eta"] ** 2)
        elif self.family is DensityFamily.LOWPASS:
            values = (lam < p["cut"]).astype(np.float64)
        elif self.family is DensityFamily.CONSTANT:
            values = np.full(lam.shape, p["value"])
        else:
            if self.table.size != lam.size:
                raise ShapeError(
                    f"tabulated density has {self.table.size} values for {lam.size} eigenvalues", module=MODULE
                )
            values = self.table.reshape(lam.shape).copy()
        if not np.all(np.isfinite(values)) or np.any(values < 0):
            raise InvalidInputError(f"density {self} is negative or not finite at some eigenvalue", module=MODULE)
        return values
