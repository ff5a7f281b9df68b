"""Sensitive distance and reachability oracles over polynomial matrices."""

from __future__ import annotations

from .graphoracle import (
    Delete,
    DeleteNode,
    Dist,
    DistanceOracle,
    GraphSpec,
    Insert,
    NegativeCycle,
    Reach,
    ReachOracle,
    Reweight,
    Unreachable,
    UpdateBatch,
    build_distance_oracle,
    build_reach_oracle,
)
from .smw import apply_batch, current_det, preprocess, query_adj_entry

__all__ = [
    "Delete",
    "DeleteNode",
    "Dist",
    "DistanceOracle",
    "GraphSpec",
    "Insert",
    "NegativeCycle",
    "Reach",
    "ReachOracle",
    "Reweight",
    "Unreachable",
    "UpdateBatch",
    "apply_batch",
    "build_distance_oracle",
    "build_reach_oracle",
    "current_det",
    "preprocess",
    "query_adj_entry",
]
