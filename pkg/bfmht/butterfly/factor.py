# -*- coding: utf-8 -*-
"""
Butterfly factorization of a matrix Φ over a space tree and a frequency tree.

Both trees have depth ``L``. Step ``ℓ`` of the factorization works on the
blocks ``Φ(τ, ν)`` with ``τ`` at space depth ``ℓ`` and ``ν`` at frequency
depth ``L − ℓ``:

* step 0 factors every leaf block column ``Φ(:, ν) ≈ U V^*`` and keeps ``V``;
* step ``ℓ ≥ 1`` restricts the parent-level left factors ``U(p, c_i)`` of
  ``ν``'s children to the rows of ``τ``, stacks them and refactors the stack
  as ``U(τ, ν) R(τ, ν)^*``, keeping the transfer matrix ``R``;
* after step ``L`` the left factors ``U(τ, root)`` of the space leaves are
  kept as leaf column bases.

The standard build walks the frequency tree level by level; the streaming
build walks it in post-order and pulls leaf bands from a provider. Both use
the same merge step, so they produce the same factors.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np

from bfmht.butterfly.providers import ColumnBandProvider, DenseColumnProvider
from bfmht.errors import ConfigurationError, ShapeError, StreamError
from bfmht.linalg.dense import as_dense, check_block_error, compress_block
from bfmht.trees.tree import IndexTree, TreeNode
from bfmht.utils.parallel import ordered_map

logger = logging.getLogger(__name__)

MODULE = "butterfly"

BlockKey = Tuple[int, int]


@dataclass
class StreamStats:
    """Working-set instrumentation of a build, in matrix entries."""

    peak_entries: int = 0
    max_band_entries: int = 0
    final_entries: int = 0
    seconds: float = 0.0

    @property
    def overhead_ratio(self) -> float:
        """``(peak − largest band) / final``."""
        if self.final_entries == 0:
            return 0.0
        return (self.peak_entries - self.max_band_entries) / self.final_entries


@dataclass(eq=False)
class ButterflyFactor:
    """
    Compressed representation of an n × m matrix.

    Attributes:
        space_tree: row tree of depth L
        freq_tree: column tree of depth L
        eps: relative tolerance used at every compression
        leaf_row_bases: frequency leaf id → ``V`` (|ν| × r)
        transfer: ``transfer[ℓ − 1][(τ, ν)]`` is ``R(τ, ν)`` for ℓ = 1..L
        leaf_col_bases: space leaf id → ``U`` (|τ| × r)
        stats: build instrumentation, when available
    """

    space_tree: IndexTree
    freq_tree: IndexTree
    eps: float
    leaf_row_bases: Dict[int, np.ndarray] = field(default_factory=dict)
    transfer: List[Dict[BlockKey, np.ndarray]] = field(default_factory=list)
    leaf_col_bases: Dict[int, np.ndarray] = field(default_factory=dict)
    stats: Optional[StreamStats] = None

    @property
    def n(self) -> int:
        return self.space_tree.size

    @property
    def m(self) -> int:
        return self.freq_tree.size

    @property
    def shape(self) -> Tuple[int, int]:
        return self.n, self.m

    @property
    def depth(self) -> int:
        return self.space_tree.depth

    @property
    def eigenvalues(self) -> Optional[np.ndarray]:
        return self.freq_tree.values

    @property
    def is_complex(self) -> bool:
        return any(np.iscomplexobj(a) for a in self.iter_factors())

    @property
    def dtype(self):
        return np.complex128 if self.is_complex else np.float64

    def iter_factors(self) -> Iterator[np.ndarray]:
        yield from self.leaf_row_bases.values()
        for level in self.transfer:
            yield from level.values()
        yield from self.leaf_col_bases.values()

    @property
    def stored_entries(self) -> int:
        return int(sum(a.size for a in self.iter_factors()))

    def level_blocks(self, level: int) -> Iterator[Tuple[TreeNode, TreeNode]]:
        """Pairs ``(τ, ν)`` of step ``level``."""
        L = self.depth
        for tau in self.space_tree.level(level):
            for nu in self.freq_tree.level(L - level):
                yield tau, nu

    def rank(self, level: int, tau_id: int, nu_id: int) -> int:
        """Rank of block ``(τ, ν)`` at step ``level``."""
        if level == 0:
            return self.leaf_row_bases[nu_id].shape[1]
        return self.transfer[level - 1][(tau_id, nu_id)].shape[1]

    def rank_table(self) -> List[Tuple[int, int, int, int]]:
        """``(level, τ, ν, rank)`` for every block."""
        return [
            (level, tau.id, nu.id, self.rank(level, tau.id, nu.id))
            for level in range(self.depth + 1)
            for tau, nu in self.level_blocks(level)
        ]

    def validate(self) -> None:
        """
        Structural checks: trees agree in depth, every transfer matrix has as
        many rows as its source blocks have ranks, and the leaf bases match
        the leaf sizes.

        Raises:
            ConfigurationError: any of the above fails
        """
        L = self.depth
        if self.freq_tree.depth != L:
            raise ConfigurationError(
                f"space tree depth {L} != frequency tree depth {self.freq_tree.depth}", module=MODULE
            )
        if len(self.transfer) != L:
            raise ConfigurationError(f"expected {L} transfer levels, found {len(self.transfer)}", module=MODULE)
        for nu in self.freq_tree.leaves:
            V = self.leaf_row_bases.get(nu.id)
            if V is None or V.shape[0] != nu.size:
                raise ConfigurationError(f"bad row basis for frequency leaf {nu.id}", module=MODULE)
        for level in range(1, L + 1):
            for tau, nu in self.level_blocks(level):
                R = self.transfer[level - 1].get((tau.id, nu.id))
                if R is None:
                    raise ConfigurationError(f"missing transfer matrix ({tau.id}, {nu.id})", module=MODULE)
                p = self.space_tree.parent(tau)
                expected = sum(self.rank(level - 1, p.id, c) for c in nu.children)
                if R.shape[0] != expected:
                    raise ConfigurationError(
                        f"transfer ({tau.id}, {nu.id}) has {R.shape[0]} rows, source ranks sum to {expected}",
                        module=MODULE,
                    )
        root = self.freq_tree.root
        for tau in self.space_tree.leaves:
            U = self.leaf_col_bases.get(tau.id)
            if U is None or U.shape[0] != tau.size or U.shape[1] != self.rank(L, tau.id, root.id):
                raise ConfigurationError(f"bad column basis for space leaf {tau.id}", module=MODULE)


class _Builder:
    """Shared state of standard and streaming builds."""

    def __init__(
        self,
        space_tree: IndexTree,
        freq_tree: IndexTree,
        eps: float,
        threads: Optional[int],
        check: bool,
    ):
        if space_tree.depth != freq_tree.depth:
            raise ConfigurationError(
                f"tree depths differ: space {space_tree.depth}, frequency {freq_tree.depth}", module=MODULE
            )
        if not 0.0 < eps < 1.0:
            raise ConfigurationError(f"tolerance must lie in (0, 1), got {eps}", module=MODULE)
        self.Tx = space_tree
        self.Tf = freq_tree
        self.L = space_tree.depth
        self.eps = eps
        self.threads = threads
        self.check = check
        self.factor = ButterflyFactor(space_tree, freq_tree, eps, transfer=[{} for _ in range(self.L)])
        self.partial: Dict[BlockKey, np.ndarray] = {}
        self.stats = StreamStats()
        self._live = 0
        self._stored = 0
        self._local_rows: Dict[int, np.ndarray] = {}

    def _touch(self, band_entries: int = 0) -> None:
        self.stats.peak_entries = max(self.stats.peak_entries, self._live + self._stored + band_entries)

    def _compress(self, A: np.ndarray):
        f = compress_block(A, self.eps)
        if self.check:
            check_block_error(A, f, self.eps)
        return f

    def local_rows(self, tau: TreeNode) -> np.ndarray:
        """Positions of ``τ``'s indices inside its parent's index list."""
        loc = self._local_rows.get(tau.id)
        if loc is None:
            parent = self.Tx.parent(tau)
            loc = np.searchsorted(parent.indices, tau.indices)
            self._local_rows[tau.id] = loc
        return loc

    def compress_leaf(self, nu: TreeNode, band: np.ndarray) -> None:
        self.stats.max_band_entries = max(self.stats.max_band_entries, band.size)
        self._touch(band.size)
        f = self._compress(band)
        self.factor.leaf_row_bases[nu.id] = f.right
        self.partial[(self.Tx.root.id, nu.id)] = f.left
        self._stored += f.right.size
        self._live += f.left.size
        self._touch(band.size)
        logger.debug(f"leaf {nu.id}: {band.shape[1]} columns -> rank {f.rank}")

    def compress_leaves(self, leaves: List[TreeNode], bands: List[np.ndarray]) -> None:
        factors = ordered_map(lambda band: self._compress(band), bands, self.threads)
        root = self.Tx.root.id
        for nu, band, f in zip(leaves, bands, factors):
            self.stats.max_band_entries = max(self.stats.max_band_entries, band.size)
            self.factor.leaf_row_bases[nu.id] = f.right
            self.partial[(root, nu.id)] = f.left
            self._stored += f.right.size
            self._live += f.left.size
        self._touch(sum(b.size for b in bands))

    def merge(self, nu: TreeNode) -> None:
        """Step ``ℓ = L − depth(ν)`` for frequency node ``ν`` across all space nodes."""
        level = self.L - nu.level
        children = nu.children
        parents = self.Tx.level(level - 1)

        def group(p: TreeNode):
            sources = [self.partial[(p.id, c)] for c in children]
            out = []
            for tau in self.Tx.children(p):
                loc = self.local_rows(tau)
                stack = np.hstack([U[loc] for U in sources])
                out.append((tau, self._compress(stack)))
            return p, out

        for p, out in ordered_map(group, parents, self.threads):
            for tau, f in out:
                self.factor.transfer[level - 1][(tau.id, nu.id)] = f.right
                self.partial[(tau.id, nu.id)] = f.left
                self._stored += f.right.size
                self._live += f.left.size
            self._touch()
            # the group of p is complete: its children's left factors can go
            for c in children:
                self._live -= self.partial.pop((p.id, c)).size
        self._touch()

    def finish(self) -> ButterflyFactor:
        root = self.Tf.root.id
        for tau in self.Tx.leaves:
            U = self.partial.pop((tau.id, root))
            self.factor.leaf_col_bases[tau.id] = U
            self._live -= U.size
            self._stored += U.size
        self.stats.final_entries = self._stored
        self.factor.stats = self.stats
        return self.factor


def _resolve_check(check: Optional[bool]) -> bool:
    if check is not None:
        return check
    from bfmht.settings import get_settings

    return get_settings().DEBUG


def _ranks_summary(bf: ButterflyFactor) -> str:
    parts = []
    for level in range(bf.depth + 1):
        ranks = [bf.rank(level, t.id, v.id) for t, v in bf.level_blocks(level)]
        parts.append(f"{max(ranks, default=0)}")
    return "/".join(parts)


def butterfly_factor(
    phi,
    space_tree: IndexTree,
    freq_tree: IndexTree,
    eps: float,
    threads: Optional[int] = 1,
    check: Optional[bool] = None,
) -> ButterflyFactor:
    """
    Factor a materialized matrix.

    Args:
        phi: n × m dense matrix
        space_tree: tree over the n rows
        freq_tree: tree over the m columns, same depth as ``space_tree``
        eps: relative Frobenius tolerance of every block compression
        threads: worker threads for the compressions of one level
        check: assert the block error bound (defaults to ``settings.DEBUG``)

    Returns:
        The factorization; ``stats`` records the working set

    Raises:
        ConfigurationError: tree depths differ or eps is out of range
        ShapeError: a tree does not cover the matching dimension of phi
    """
    start = time.perf_counter()
    phi = as_dense(phi, "phi")
    n, m = phi.shape
    if space_tree.size != n or freq_tree.size != m:
        raise ShapeError(
            f"trees cover {space_tree.size} x {freq_tree.size}, matrix is {n} x {m}", module=MODULE
        )
    builder = _Builder(space_tree, freq_tree, eps, threads, _resolve_check(check))
    leaves = freq_tree.leaves
    builder.compress_leaves(leaves, [phi[:, nu.indices] for nu in leaves])
    for d in range(freq_tree.depth - 1, -1, -1):
        for nu in freq_tree.level(d):
            builder.merge(nu)
    bf = builder.finish()
    bf.stats.seconds = time.perf_counter() - start
    logger.info(
        f"butterfly factor {n}x{m}, L={bf.depth}, eps={eps:g}: {bf.stored_entries} entries, "
        f"max ranks per level {_ranks_summary(bf)}, {bf.stats.seconds:.2f}s"
    )
    return bf


def butterfly_factor_streaming(
    provider: ColumnBandProvider,
    space_tree: IndexTree,
    freq_tree: IndexTree,
    eps: float,
    threads: Optional[int] = 1,
    check: Optional[bool] = None,
) -> ButterflyFactor:
    """
    Factor a matrix whose columns arrive band by band.

    The frequency tree is walked in post-order (left, right, parent): a leaf's
    band is compressed as soon as it arrives, and an internal node merges its
    children's left factors and releases them. At most one band is held at a
    time.

    Raises:
        StreamError: the provider does not match the trees or runs dry
    """
    start = time.perf_counter()
    provider.bind(freq_tree)
    if provider.n != space_tree.size:
        raise StreamError(f"provider has {provider.n} rows, space tree covers {space_tree.size}")
    builder = _Builder(space_tree, freq_tree, eps, threads, _resolve_check(check))
    for nu in freq_tree.postorder():
        if nu.children:
            builder.merge(nu)
        else:
            band = provider.next_band(nu)
            builder.compress_leaf(nu, band)
            del band
    bf = builder.finish()
    bf.stats.seconds = time.perf_counter() - start
    values = provider.eigenvalues
    if freq_tree.values is None and values is not None and values.size == bf.m:
        bf.freq_tree = IndexTree(freq_tree.arity, freq_tree.levels, values=np.asarray(values, dtype=np.float64))
    logger.info(
        f"streaming butterfly factor {bf.n}x{bf.m}, L={bf.depth}, eps={eps:g}: {bf.stored_entries} entries, "
        f"peak working set {bf.stats.peak_entries} (overhead ratio {bf.stats.overhead_ratio:.2f}), "
        f"{bf.stats.seconds:.2f}s"
    )
    return bf


def factor_dense_streaming(phi, space_tree: IndexTree, freq_tree: IndexTree, eps: float, **kwargs) -> ButterflyFactor:
    """Streaming build over an in-memory matrix."""
    return butterfly_factor_streaming(DenseColumnProvider(as_dense(phi, "phi")), space_tree, freq_tree, eps, **kwargs)
