"""Feature functions over mentions, candidates and decided entities."""
from __future__ import annotations

from .aggregation import aggregate_pair_blocks, canonical_order, global_features, joint_dim, joint_features
from .document_view import DocumentFeatureView

__all__ = [
    "DocumentFeatureView",
    "aggregate_pair_blocks",
    "canonical_order",
    "global_features",
    "joint_dim",
    "joint_features",
]
