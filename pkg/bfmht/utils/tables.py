"""
Utilities for the plot-ready CSV tables and vector files the CLI reads and
writes.
"""
import csv
from io import StringIO
from os import PathLike
from typing import Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from bfmht.errors import InvalidInputError


def flatten_dicts(dictionary: Dict, delim: str = ".", _path: Optional[str] = None) -> Dict:
    """
    Flattens a nested dictionary into a flat dictionary, but does NOT flatten any
    lists in the structure.

    :param dictionary: Dictionary to flatten
    :param delim: The delimiter for nested fields
    """
    flattened = {}
    prefix = _path + delim if _path else ""
    for key, value in dictionary.items():
        if isinstance(value, dict):
            flattened.update(flatten_dicts(value, delim=delim, _path=prefix + key))
        else:
            flattened[prefix + key] = value
    return flattened


def rows_to_csv(rows: Iterable[Dict], fields: Optional[Sequence[str]] = None, **writer_opts) -> str:
    """
    Render rows as CSV text with a header line.

    Columns follow ``fields`` when given, otherwise first-seen key order.
    """
    rows = [flatten_dicts(row) for row in rows]
    if fields is None:
        fields = []
        for row in rows:
            fields.extend(k for k in row if k not in fields)
    with StringIO() as fp:
        writer = csv.DictWriter(fp, fieldnames=list(fields), extrasaction="ignore", **writer_opts)
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
        return fp.getvalue()


def write_csv(path: Union[str, PathLike], rows: Iterable[Dict], fields: Optional[Sequence[str]] = None) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(rows_to_csv(rows, fields))


def read_csv(path: Union[str, PathLike]) -> List[Dict[str, str]]:
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _parse_entry(text: str) -> complex:
    text = text.strip().replace(" ", "")
    try:
        return complex(text.replace("i", "j"))
    except ValueError as e:
        raise InvalidInputError(f"cannot parse number {text!r}", module="cli") from e


def read_vector(path: Union[str, PathLike]) -> np.ndarray:
    """
    One entry per line. A line holds a real number, ``re,im``, or a complex
    literal such as ``1+2j``. Lines starting with ``#`` are skipped.

    Returns:
        A float64 array, or complex128 when any entry has an imaginary part
    """
    values = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split(",")
            if len(parts) == 2:
                values.append(complex(float(parts[0]), float(parts[1])))
            elif len(parts) == 1:
                values.append(_parse_entry(parts[0]))
            else:
                raise InvalidInputError(f"{path}: expected one value or re,im per line, got {line!r}", module="cli")
    arr = np.array(values, dtype=np.complex128)
    if arr.size and np.all(arr.imag == 0):
        return arr.real.copy()
    return arr


def write_vector(path: Union[str, PathLike], values) -> None:
    """Inverse of :func:`read_vector`: ``re,im`` lines for complex data."""
    values = np.asarray(values).ravel()
    with open(path, "w") as fh:
        if np.iscomplexobj(values):
            for v in values:
                fh.write(f"{v.real:.17g},{v.imag:.17g}\n")
        else:
            for v in values:
                fh.write(f"{v:.17g}\n")
