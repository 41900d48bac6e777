"""
These schemas describe the JSON form of trees and of the reports written
next to artifacts (``*.json`` sidecars).
"""

from __future__ import annotations

import math
from typing import Any, Dict, List

import numpy as np
from marshmallow import Schema, ValidationError, fields, post_dump, post_load, validate

from bfmht.fields import FloatArray, IndexSet


class TreeNodeSchema(Schema):
    id = fields.Integer(required=True)
    parent = fields.Integer(allow_none=True, load_default=None)
    children = fields.List(fields.Integer(), load_default=list)
    range = fields.Method("dump_range", deserialize="load_range", allow_none=True)
    indices = IndexSet(allow_none=True)

    def dump_range(self, node):
        if node.is_contiguous:
            start = int(node.indices[0]) if node.size else 0
            return [start, start + node.size]
        return None

    def load_range(self, value):
        if not isinstance(value, (list, tuple)) or len(value) != 2:
            raise ValidationError("range must be [start, stop]")
        return np.arange(int(value[0]), int(value[1]), dtype=np.int64)

    @post_dump
    def drop_redundant(self, data, **kwargs):
        # contiguous sets are written as a range only
        if data.get("range") is not None:
            data.pop("indices", None)
        else:
            data.pop("range", None)
        return data

    class Meta:
        ordered = True


class IndexTreeSchema(Schema):
    arity = fields.Integer(required=True, validate=validate.OneOf([2, 4]))
    depth = fields.Integer(required=True, validate=validate.Range(min=0))
    values = FloatArray(allow_none=True, load_default=None)
    nodes = fields.Method("dump_nodes", deserialize="load_nodes", required=True)

    def dump_nodes(self, tree):
        return TreeNodeSchema(many=True).dump(list(tree))

    def load_nodes(self, value):
        return TreeNodeSchema(many=True).load(value)

    @post_dump
    def drop_empty_values(self, data, **kwargs):
        if data.get("values") is None:
            data.pop("values", None)
        return data

    @post_load
    def make_tree(self, data, **kwargs):
        from bfmht.trees.tree import IndexTree

        arity, depth = data["arity"], data["depth"]
        by_id = {}
        for node in data["nodes"]:
            idx = node.get("range")
            if idx is None:
                idx = node.get("indices")
            if idx is None:
                raise ValidationError(f"node {node['id']} has neither range nor indices")
            by_id[node["id"]] = idx
        expected = sum(arity**d for d in range(depth + 1))
        if sorted(by_id) != list(range(expected)):
            raise ValidationError(f"a complete depth-{depth} tree of arity {arity} has {expected} nodes")
        level_sets, offset = [], 0
        for d in range(depth + 1):
            level_sets.append([by_id[offset + k] for k in range(arity**d)])
            offset += arity**d
        tree = IndexTree.from_level_sets(arity, level_sets, values=data.get("values"))
        for node in data["nodes"]:
            built = tree.node(node["id"])
            if node["parent"] != built.parent or list(node["children"]) != built.children:
                raise ValidationError(f"node {node['id']} has inconsistent parent/children")
        return tree


class LevelEntriesSchema(Schema):
    level = fields.String()
    blocks = fields.Integer()
    entries = fields.Integer()
    max_rank = fields.Integer()

    class Meta:
        ordered = True


class BlockRankSchema(Schema):
    level = fields.Integer()
    tau = fields.Integer()
    nu = fields.Integer()
    rank = fields.Integer()

    class Meta:
        ordered = True


class MemoryReportSchema(Schema):
    n = fields.Integer()
    m = fields.Integer()
    depth = fields.Integer()
    eps = fields.Float()
    levels = fields.List(fields.Nested(LevelEntriesSchema))
    stored_entries = fields.Integer()
    total_bytes = fields.Integer()
    dense_entries = fields.Integer()
    compression = fields.Float()
    block_ranks = fields.List(fields.Nested(BlockRankSchema))

    class Meta:
        ordered = True


class StreamStatsSchema(Schema):
    peak_entries = fields.Integer()
    max_band_entries = fields.Integer()
    final_entries = fields.Integer()
    overhead_ratio = fields.Float()
    seconds = fields.Float()

    class Meta:
        ordered = True


class SplitRecordSchema(Schema):
    level = fields.Integer()
    position = fields.Integer()
    size = fields.Integer()
    left = fields.Integer()
    right = fields.Integer()
    method = fields.String()
    fractions = fields.List(fields.Float())
    balanced = fields.Boolean()

    class Meta:
        ordered = True


class BuildReportSchema(Schema):
    max_leaf_size = fields.Integer()
    balance_window = fields.List(fields.Float())
    all_balanced = fields.Boolean()
    splits = fields.List(fields.Nested(SplitRecordSchema))
    fallbacks = fields.Method("count_fallbacks")

    def count_fallbacks(self, report):
        return len(report.fallbacks)

    class Meta:
        ordered = True


class LsqrReportSchema(Schema):
    converged = fields.Boolean()
    iterations = fields.Integer()
    stop_reason = fields.String()
    residual_norm = fields.Float()
    normal_residual = fields.Float()
    norm_estimate = fields.Float()

    class Meta:
        ordered = True


def finite_or_none(value: Any) -> Any:
    """JSON has no infinities; map them to None."""
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


def sanitize(data: Any) -> Any:
    """Recursively make a dumped structure JSON-safe."""
    if isinstance(data, dict):
        return {k: sanitize(v) for k, v in data.items()}
    if isinstance(data, (list, tuple)):
        return [sanitize(v) for v in data]
    if isinstance(data, np.generic):
        return sanitize(data.item())
    return finite_or_none(data)
