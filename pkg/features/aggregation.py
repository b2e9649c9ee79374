"""Joint feature composition: local block followed by mean and max of pairwise features."""
from __future__ import annotations

from functools import reduce
from typing import List, Sequence

import numpy as np

from corpus import Document, PairwiseFeatureStore


def joint_dim(d_local: int, d_pair: int) -> int:
    return d_local + 2 * d_pair


def aggregate_pair_blocks(blocks: Sequence[np.ndarray], shape: tuple[int, ...]) -> np.ndarray:
    """Concatenate the elementwise mean and max of ``blocks`` along the last axis.

    Each block has ``shape`` (``(..., D_E)``). The sum is accumulated in the
    given order with plain elementwise adds so a single row and a batched
    block of rows produce identical bits; callers pass blocks in
    :func:`canonical_order`. An empty sequence gives zeros.
    """

    if not blocks:
        return np.zeros(shape[:-1] + (2 * shape[-1],), dtype=np.float64)
    total = reduce(np.add, blocks[1:], np.array(blocks[0], dtype=np.float64))
    mean = total / float(len(blocks))
    maximum = reduce(np.maximum, blocks[1:], blocks[0])
    return np.concatenate([mean, maximum], axis=-1)


def canonical_order(decided: Sequence[str]) -> List[str]:
    """Decided entities sorted by id, duplicates kept.

    Floating-point sums depend on order; every permutation of the same
    multiset must produce the same bits.
    """

    return sorted(decided)


def global_features(candidate: str, decided: Sequence[str], store: PairwiseFeatureStore) -> np.ndarray:
    """Mean and max of phi_E(candidate, d) over decided entities (a multiset)."""

    blocks = [store.lookup(candidate, entity) for entity in canonical_order(decided)]
    return aggregate_pair_blocks(blocks, (store.d_pair,))


def joint_features(
    doc: Document,
    t: int,
    candidate_index: int,
    decided: Sequence[str],
    store: PairwiseFeatureStore,
) -> np.ndarray:
    if not 0 <= t < doc.T:
        raise IndexError(f"position {t} out of range for document {doc.doc_id!r} (T={doc.T})")
    candidates = doc.mentions[t].candidates
    if not 0 <= candidate_index < len(candidates):
        raise IndexError(
            f"candidate {candidate_index} out of range for mention "
            f"{doc.mentions[t].mention_id!r} ({len(candidates)} candidates)"
        )
    candidate = candidates[candidate_index]
    return np.concatenate(
        [candidate.local_features, global_features(candidate.entity_id, decided, store)]
    )


__all__ = ["aggregate_pair_blocks", "canonical_order", "global_features", "joint_dim", "joint_features"]
