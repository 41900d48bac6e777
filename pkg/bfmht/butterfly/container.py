# -*- coding: utf-8 -*-
"""
BFC container: a little-endian binary file holding a butterfly factorization.

Layout::

    b"BFMHT1"                       magic
    f64                              eps
    u8                               1 if entries are complex, 0 if real
    u64 + bytes                      space tree JSON
    u64 + bytes                      frequency tree JSON
    u32                              section count (L + 2)
    per section:
        u64                          block count
        per block:
            i64 tau, i64 nu, u64 rows, u64 cols
            entries                  column-major; complex as re/im f64 pairs

Section 0 holds the row bases of the frequency leaves (τ = space root),
sections 1..L the transfer matrices, section L + 1 the column bases of the
space leaves (ν = frequency root).
"""

from __future__ import annotations

import logging
import struct
from os import PathLike
from typing import BinaryIO, Dict, Iterable, List, Tuple, Union

import numpy as np
from marshmallow import ValidationError

from bfmht.butterfly.factor import ButterflyFactor
from bfmht.errors import BfmhtError, ContainerError
from bfmht.trees.tree import IndexTree

logger = logging.getLogger(__name__)

MAGIC = b"BFMHT1"

_HEAD = struct.Struct("<dB")
_U64 = struct.Struct("<Q")
_U32 = struct.Struct("<I")
_BLOCK = struct.Struct("<qqQQ")

Section = List[Tuple[int, int, np.ndarray]]


def _sections(bf: ButterflyFactor) -> List[Section]:
    root, froot = bf.space_tree.root.id, bf.freq_tree.root.id
    sections = [[(root, nu, V) for nu, V in sorted(bf.leaf_row_bases.items())]]
    for level in bf.transfer:
        sections.append([(tau, nu, R) for (tau, nu), R in sorted(level.items())])
    sections.append([(tau, froot, U) for tau, U in sorted(bf.leaf_col_bases.items())])
    return sections


def _write_blob(fh: BinaryIO, blob: bytes) -> None:
    fh.write(_U64.pack(len(blob)))
    fh.write(blob)


def _write_block(fh: BinaryIO, tau: int, nu: int, A: np.ndarray, dtype: str) -> None:
    rows, cols = A.shape
    fh.write(_BLOCK.pack(tau, nu, rows, cols))
    fh.write(np.asarray(A.ravel(order="F"), dtype=dtype).tobytes())


def write_bfc(path: Union[str, PathLike], bf: ButterflyFactor) -> int:
    """
    Serialize a factorization.

    Returns:
        Number of bytes written
    """
    complex_entries = bf.is_complex
    dtype = "<c16" if complex_entries else "<f8"
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(_HEAD.pack(bf.eps, 1 if complex_entries else 0))
        _write_blob(fh, bf.space_tree.to_json().encode("utf-8"))
        _write_blob(fh, bf.freq_tree.to_json().encode("utf-8"))
        sections = _sections(bf)
        fh.write(_U32.pack(len(sections)))
        for blocks in sections:
            fh.write(_U64.pack(len(blocks)))
            for tau, nu, A in blocks:
                _write_block(fh, tau, nu, A, dtype)
        size = fh.tell()
    logger.info(f"wrote {path}: {bf.stored_entries} entries, {size} bytes")
    return size


class _Reader:
    def __init__(self, data: bytes, path):
        self.data = data
        self.offset = 0
        self.path = path

    def take(self, count: int) -> bytes:
        end = self.offset + count
        if end > len(self.data):
            raise ContainerError(f"{self.path}: truncated at byte {self.offset}")
        chunk = self.data[self.offset : end]
        self.offset = end
        return chunk

    def unpack(self, fmt: struct.Struct) -> Tuple:
        return fmt.unpack(self.take(fmt.size))

    def blob(self) -> bytes:
        (length,) = self.unpack(_U64)
        return self.take(length)

    def array(self, rows: int, cols: int, dtype: str) -> np.ndarray:
        itemsize = np.dtype(dtype).itemsize
        flat = np.frombuffer(self.take(rows * cols * itemsize), dtype=dtype)
        return np.ascontiguousarray(flat.reshape((rows, cols), order="F"), dtype=dtype[1:])


def _read_tree(reader: _Reader, what: str) -> IndexTree:
    try:
        return IndexTree.from_json(reader.blob().decode("utf-8"))
    except (ValidationError, BfmhtError, ValueError, KeyError) as e:
        raise ContainerError(f"{reader.path}: bad {what} tree: {e}") from e


def _read_blocks(reader: _Reader, dtype: str) -> Iterable[Tuple[int, int, np.ndarray]]:
    (count,) = reader.unpack(_U64)
    for _ in range(count):
        tau, nu, rows, cols = reader.unpack(_BLOCK)
        yield tau, nu, reader.array(rows, cols, dtype)


def read_bfc(path: Union[str, PathLike]) -> ButterflyFactor:
    """
    Load a factorization written by :func:`write_bfc` and check its structure.

    Raises:
        ContainerError: bad magic, truncation, malformed trees or inconsistent
            block shapes
    """
    with open(path, "rb") as fh:
        reader = _Reader(fh.read(), path)
    if reader.take(len(MAGIC)) != MAGIC:
        raise ContainerError(f"{path}: not a BFC file")
    eps, flag = reader.unpack(_HEAD)
    if flag not in (0, 1):
        raise ContainerError(f"{path}: bad entry-type flag {flag}")
    dtype = "<c16" if flag else "<f8"
    space_tree = _read_tree(reader, "space")
    freq_tree = _read_tree(reader, "frequency")
    (nsections,) = reader.unpack(_U32)
    L = space_tree.depth
    if nsections != L + 2:
        raise ContainerError(f"{path}: {nsections} sections for a depth-{L} factorization")

    leaf_row_bases: Dict[int, np.ndarray] = {nu: V for _, nu, V in _read_blocks(reader, dtype)}
    transfer = [{(tau, nu): R for tau, nu, R in _read_blocks(reader, dtype)} for _ in range(L)]
    leaf_col_bases: Dict[int, np.ndarray] = {tau: U for tau, _, U in _read_blocks(reader, dtype)}
    if reader.offset != len(reader.data):
        raise ContainerError(f"{path}: {len(reader.data) - reader.offset} trailing bytes")

    bf = ButterflyFactor(
        space_tree,
        freq_tree,
        eps,
        leaf_row_bases=leaf_row_bases,
        transfer=transfer,
        leaf_col_bases=leaf_col_bases,
    )
    try:
        bf.validate()
    except BfmhtError as e:
        raise ContainerError(f"{path}: {e}") from e
    logger.debug(f"read {path}: {bf.n}x{bf.m}, L={L}, {bf.stored_entries} entries")
    return bf
