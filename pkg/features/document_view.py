"""Batched feature construction for all candidates of a mention."""
from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

import numpy as np

from corpus import Document, PairwiseFeatureStore
from features.aggregation import aggregate_pair_blocks, canonical_order, joint_dim


class DocumentFeatureView:
    """Per-document feature builder.

    Rows match :func:`features.aggregation.joint_features` bit for bit; the
    pairwise block of every (position, decided entity) is looked up once.
    """

    def __init__(self, doc: Document, store: PairwiseFeatureStore) -> None:
        self.doc = doc
        self.store = store
        self.d_local = doc.mentions[0].candidates[0].local_features.shape[0]
        self.d_pair = store.d_pair
        self.dim = joint_dim(self.d_local, self.d_pair)
        self._local: List[np.ndarray] = [
            np.stack([candidate.local_features for candidate in mention.candidates])
            for mention in doc.mentions
        ]
        self._entities: List[Tuple[str, ...]] = [mention.entity_ids for mention in doc.mentions]
        self._pair_blocks: Dict[Tuple[int, str], np.ndarray] = {}

    def local_block(self, t: int) -> np.ndarray:
        return self._local[t]

    def pair_block(self, t: int, entity: str) -> np.ndarray:
        key = (t, entity)
        block = self._pair_blocks.get(key)
        if block is None:
            block = np.stack([self.store.lookup(candidate, entity) for candidate in self._entities[t]])
            block.setflags(write=False)
            self._pair_blocks[key] = block
        return block

    def global_block(self, t: int, decided: Sequence[str]) -> np.ndarray:
        blocks = [self.pair_block(t, entity) for entity in canonical_order(decided)]
        return aggregate_pair_blocks(blocks, (len(self._entities[t]), self.d_pair))

    def joint_block(self, t: int, decided: Sequence[str]) -> np.ndarray:
        """Feature matrix (K_t x D) for every candidate at ``t`` given ``decided``."""

        return np.concatenate([self._local[t], self.global_block(t, decided)], axis=1)

    def joint_row(self, t: int, candidate_index: int, decided: Sequence[str]) -> np.ndarray:
        return self.joint_block(t, decided)[candidate_index]


__all__ = ["DocumentFeatureView"]
