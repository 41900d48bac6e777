# -*- coding: utf-8 -*-
"""
Forward and adjoint application of a butterfly factorization.

Forward (``y = Φc``): the row bases ``V`` act on the coefficients of each
frequency leaf, the transfer matrices ``R^*`` carry those through the levels
towards the frequency root, and the column bases ``U`` of the space leaves
produce the values. The adjoint runs the same factors conjugate-transposed
in reverse order.
"""

from __future__ import annotations

import logging
from typing import Dict, Optional, Tuple

import numpy as np

from bfmht.butterfly.factor import ButterflyFactor
from bfmht.errors import ShapeError

logger = logging.getLogger(__name__)

MODULE = "butterfly"


def _as_block(x, length: int, what: str) -> Tuple[np.ndarray, bool]:
    x = np.asarray(x)
    vector = x.ndim == 1
    block = x[:, None] if vector else x
    if block.ndim != 2 or block.shape[0] != length:
        raise ShapeError(f"{what} must have length {length}, got shape {x.shape}", module=MODULE)
    return block, vector


def bf_apply(bf: ButterflyFactor, c) -> np.ndarray:
    """
    ``y ≈ Φ c`` for a coefficient vector of length m (or an m × s block).

    Cost is proportional to the stored entries.

    Raises:
        ShapeError: wrong length
    """
    block, vector = _as_block(c, bf.m, "coefficients")
    dtype = np.result_type(bf.dtype, block.dtype, np.float64)
    s = block.shape[1]
    Tx, Tf, L = bf.space_tree, bf.freq_tree, bf.depth
    root = Tx.root.id

    z: Dict[Tuple[int, int], np.ndarray] = {}
    for nu in Tf.leaves:
        V = bf.leaf_row_bases[nu.id]
        z[(root, nu.id)] = V.conj().T @ block[nu.indices]
    for level in range(1, L + 1):
        transfer = bf.transfer[level - 1]
        nxt = {}
        for tau, nu in bf.level_blocks(level):
            p = tau.parent
            zin = np.vstack([z[(p, c_id)] for c_id in nu.children])
            nxt[(tau.id, nu.id)] = transfer[(tau.id, nu.id)].conj().T @ zin
        z = nxt

    y = np.zeros((bf.n, s), dtype=dtype)
    froot = Tf.root.id
    for tau in Tx.leaves:
        if tau.size:
            y[tau.indices] = bf.leaf_col_bases[tau.id] @ z[(tau.id, froot)]
    return y[:, 0] if vector else y


def bf_apply_adjoint(bf: ButterflyFactor, y) -> np.ndarray:
    """
    ``x ≈ Φ^* y`` for a value vector of length n (or an n × s block).

    Raises:
        ShapeError: wrong length
    """
    block, vector = _as_block(y, bf.n, "values")
    dtype = np.result_type(bf.dtype, block.dtype, np.float64)
    s = block.shape[1]
    Tx, Tf, L = bf.space_tree, bf.freq_tree, bf.depth
    froot = Tf.root.id

    w: Dict[Tuple[int, int], np.ndarray] = {}
    for tau in Tx.leaves:
        U = bf.leaf_col_bases[tau.id]
        w[(tau.id, froot)] = U.conj().T @ block[tau.indices]
    for level in range(L, 0, -1):
        transfer = bf.transfer[level - 1]
        acc: Dict[Tuple[int, int], np.ndarray] = {}
        for p in Tx.level(level - 1):
            for nu in Tf.level(L - level + 1):
                acc[(p.id, nu.id)] = np.zeros((bf.rank(level - 1, p.id, nu.id), s), dtype=dtype)
        for tau, nu in bf.level_blocks(level):
            t = transfer[(tau.id, nu.id)] @ w[(tau.id, nu.id)]
            offset = 0
            for c_id in nu.children:
                target = acc[(tau.parent, c_id)]
                r = target.shape[0]
                target += t[offset : offset + r]
                offset += r
        w = acc

    x = np.zeros((bf.m, s), dtype=dtype)
    root = Tx.root.id
    for nu in Tf.leaves:
        if nu.size:
            x[nu.indices] = bf.leaf_row_bases[nu.id] @ w[(root, nu.id)]
    return x[:, 0] if vector else x


def estimate_norm(bf: ButterflyFactor, iterations: Optional[int] = None, seed: int = 0) -> float:
    """‖Φ‖₂ by power iteration on ``Φ^*Φ``."""
    if iterations is None:
        from bfmht.utils import presets

        iterations = int(presets.norm_power_iterations)
    if bf.m == 0 or bf.n == 0:
        return 0.0
    x = np.random.default_rng(seed).standard_normal(bf.m)
    x /= np.linalg.norm(x)
    sigma = 0.0
    for _ in range(iterations):
        x = bf_apply_adjoint(bf, bf_apply(bf, x))
        nrm = np.linalg.norm(x)
        if nrm == 0.0:
            return 0.0
        sigma = np.sqrt(nrm)
        x /= nrm
    return float(sigma)
