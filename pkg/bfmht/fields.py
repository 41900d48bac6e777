"""
Custom field types for serialization/deserialization.

This module provides custom Marshmallow fields for numpy-valued attributes.
"""
from typing import Any

import numpy as np
from marshmallow import ValidationError, fields


class IndexSet(fields.Field):
    """
    A Marshmallow field for sorted index arrays.

    Serializes an int array to a list of ints and loads a list back into a
    sorted ``int64`` array, rejecting unsorted or repeated entries.
    """

    def _serialize(self, value: Any, attr: str, obj: Any, **kwargs) -> Any:
        if value is None:
            return None
        return [int(i) for i in np.asarray(value).ravel()]

    def _deserialize(self, value: Any, attr: str, data: Any, **kwargs) -> Any:
        if value is None:
            return None
        try:
            arr = np.asarray(value, dtype=np.int64).ravel()
        except (TypeError, ValueError) as e:
            raise ValidationError(f"not a list of integers: {e}") from e
        if arr.size > 1 and np.any(np.diff(arr) <= 0):
            raise ValidationError("indices must be strictly increasing")
        return arr


class FloatArray(fields.Field):
    """
    A Marshmallow field for 1-D float arrays.

    Floats are written with Python's shortest round-trip repr, so a dump and
    load gives back identical values.
    """

    def _serialize(self, value: Any, attr: str, obj: Any, **kwargs) -> Any:
        if value is None:
            return None
        return [float(v) for v in np.asarray(value, dtype=np.float64).ravel()]

    def _deserialize(self, value: Any, attr: str, data: Any, **kwargs) -> Any:
        if value is None:
            return None
        try:
            return np.asarray(value, dtype=np.float64).ravel()
        except (TypeError, ValueError) as e:
            raise ValidationError(f"not a list of numbers: {e}") from e
