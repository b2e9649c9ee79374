"""Corpus representation for collective entity disambiguation.

A :class:`Dataset` is a list of documents, each a sequence of mentions with
ordered candidate lists, plus a symmetric store of entity-entity features.
All objects are immutable once validated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, Mapping, Optional, Sequence, Tuple

import numpy as np

from utils.validation import ensure_finite_vector, validate_identifier


class CorpusValidationError(ValueError):
    """Raised when a corpus violates a structural invariant."""


PairKey = Tuple[str, str]


def pair_key(a: str, b: str) -> PairKey:
    """Unordered key for an entity pair."""

    return (a, b) if a <= b else (b, a)


@dataclass(frozen=True, eq=False)
class Candidate:
    entity_id: str
    local_features: np.ndarray

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Candidate):
            return NotImplemented
        return self.entity_id == other.entity_id and np.array_equal(
            self.local_features, other.local_features
        )

    def __hash__(self) -> int:
        return hash((self.entity_id, self.local_features.tobytes()))


@dataclass(frozen=True)
class Mention:
    mention_id: str
    gold_index: int
    candidates: Tuple[Candidate, ...]

    @property
    def gold(self) -> Candidate:
        return self.candidates[self.gold_index]

    @property
    def entity_ids(self) -> Tuple[str, ...]:
        return tuple(candidate.entity_id for candidate in self.candidates)

    def __len__(self) -> int:
        return len(self.candidates)


@dataclass(frozen=True)
class Document:
    doc_id: str
    mentions: Tuple[Mention, ...]

    @property
    def T(self) -> int:
        return len(self.mentions)

    @property
    def gold_sequence(self) -> Tuple[int, ...]:
        return tuple(mention.gold_index for mention in self.mentions)

    @property
    def candidate_counts(self) -> Tuple[int, ...]:
        return tuple(len(mention.candidates) for mention in self.mentions)

    @property
    def sequence_count(self) -> int:
        """Size of the full assignment space (product of candidate counts)."""

        return math.prod(self.candidate_counts)

    def entity(self, t: int, candidate_index: int) -> str:
        return self.mentions[t].candidates[candidate_index].entity_id

    def entities_of(self, positions: Sequence[int], choices: Sequence[int]) -> Tuple[str, ...]:
        return tuple(self.entity(t, c) for t, c in zip(positions, choices))


class PairwiseFeatureStore:
    """Symmetric lookup from unordered entity pairs to feature vectors."""

    def __init__(self, d_pair: int, pairs: Optional[Mapping[PairKey, np.ndarray]] = None) -> None:
        if d_pair < 1:
            raise CorpusValidationError(f"d_pair must be >= 1, got {d_pair}")
        self.d_pair = d_pair
        self._pairs: Dict[PairKey, np.ndarray] = {}
        self._zeros = np.zeros(d_pair, dtype=np.float64)
        self._zeros.setflags(write=False)
        for (a, b), vector in (pairs or {}).items():
            self._insert(a, b, vector)

    def _insert(self, a: str, b: str, vector: Iterable[float]) -> None:
        key = pair_key(a, b)
        if key in self._pairs:
            raise CorpusValidationError(f"duplicate pairwise entry for {{{key[0]}, {key[1]}}}")
        values = list(vector)
        if len(values) != self.d_pair:
            raise CorpusValidationError(
                f"pairwise dimension mismatch for {{{a}, {b}}}: "
                f"expected {self.d_pair}, got {len(values)}"
            )
        try:
            self._pairs[key] = ensure_finite_vector(values, self.d_pair, f"pair {{{a}, {b}}}")
        except ValueError as exc:
            raise CorpusValidationError(str(exc)) from exc

    @classmethod
    def from_records(
        cls, d_pair: int, records: Iterable[Tuple[str, str, Iterable[float]]]
    ) -> "PairwiseFeatureStore":
        store = cls(d_pair)
        for a, b, vector in records:
            store._insert(a, b, vector)
        return store

    def lookup(self, a: str, b: str) -> np.ndarray:
        return self._pairs.get(pair_key(a, b), self._zeros)

    def items(self) -> Iterator[Tuple[PairKey, np.ndarray]]:
        for key in sorted(self._pairs):
            yield key, self._pairs[key]

    def __len__(self) -> int:
        return len(self._pairs)

    def __contains__(self, key: object) -> bool:
        if not isinstance(key, tuple) or len(key) != 2:
            return False
        return pair_key(*key) in self._pairs

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PairwiseFeatureStore):
            return NotImplemented
        if self.d_pair != other.d_pair or self._pairs.keys() != other._pairs.keys():
            return False
        return all(np.array_equal(vector, other._pairs[key]) for key, vector in self._pairs.items())

    __hash__ = None  # type: ignore[assignment]


def lookup_pair(store: PairwiseFeatureStore, a: str, b: str) -> np.ndarray:
    """Return phi_E(a, b); absent pairs give the zero vector."""

    return store.lookup(a, b)


@dataclass(frozen=True)
class Dataset:
    documents: Tuple[Document, ...]
    pairwise: PairwiseFeatureStore
    d_local: int
    d_pair: int
    header_extra: Mapping[str, object] = field(default_factory=dict, compare=False)

    @property
    def dims(self) -> Tuple[int, int]:
        return (self.d_local, self.d_pair)

    @property
    def n_mentions(self) -> int:
        return sum(document.T for document in self.documents)

    def __len__(self) -> int:
        return len(self.documents)

    def validate(self) -> "Dataset":
        validate_dataset(self)
        return self


def build_candidate(entity_id: object, features: Sequence[float], d_local: int, where: str) -> Candidate:
    entity = validate_identifier(entity_id, "entity id")
    if not isinstance(features, (list, tuple, np.ndarray)):
        raise CorpusValidationError(f"{where}: local features of {entity!r} must be a list")
    if len(features) != d_local:
        raise CorpusValidationError(
            f"{where}: local dimension mismatch for {entity!r} (expected {d_local}, got {len(features)})"
        )
    try:
        vector = ensure_finite_vector(features, d_local, where)
    except ValueError as exc:
        raise CorpusValidationError(str(exc)) from exc
    return Candidate(entity, vector)


def validate_document(document: Document, d_local: int) -> None:
    if not document.mentions:
        raise CorpusValidationError(f"doc {document.doc_id!r}: empty document (no mentions)")
    seen_mentions: set[str] = set()
    for mention in document.mentions:
        where = f"doc {document.doc_id!r} mention {mention.mention_id!r}"
        if mention.mention_id in seen_mentions:
            raise CorpusValidationError(f"{where}: duplicate mention id")
        seen_mentions.add(mention.mention_id)
        if not mention.candidates:
            raise CorpusValidationError(f"{where}: mention has no candidates")
        if not 0 <= mention.gold_index < len(mention.candidates):
            raise CorpusValidationError(
                f"{where}: gold index out of range ({mention.gold_index} with "
                f"{len(mention.candidates)} candidates)"
            )
        entity_ids = mention.entity_ids
        if len(set(entity_ids)) != len(entity_ids):
            raise CorpusValidationError(f"{where}: duplicate candidate entity ids")
        for candidate in mention.candidates:
            features = candidate.local_features
            if features.shape != (d_local,):
                raise CorpusValidationError(
                    f"{where}: local dimension mismatch for {candidate.entity_id!r} "
                    f"(expected {d_local}, got {features.shape[0] if features.ndim else 0})"
                )
            if not np.all(np.isfinite(features)):
                raise CorpusValidationError(
                    f"{where}: non-finite local features for {candidate.entity_id!r}"
                )


def validate_dataset(dataset: Dataset) -> None:
    if dataset.d_local < 1 or dataset.d_pair < 1:
        raise CorpusValidationError(
            f"dimensions must be positive, got d_local={dataset.d_local}, d_pair={dataset.d_pair}"
        )
    if dataset.pairwise.d_pair != dataset.d_pair:
        raise CorpusValidationError(
            f"pairwise dimension mismatch: store has {dataset.pairwise.d_pair}, "
            f"corpus declares {dataset.d_pair}"
        )
    seen_docs: set[str] = set()
    for document in dataset.documents:
        if document.doc_id in seen_docs:
            raise CorpusValidationError(f"doc {document.doc_id!r}: duplicate document id")
        seen_docs.add(document.doc_id)
        validate_document(document, dataset.d_local)


__all__ = [
    "Candidate",
    "CorpusValidationError",
    "Dataset",
    "Document",
    "Mention",
    "PairwiseFeatureStore",
    "build_candidate",
    "lookup_pair",
    "pair_key",
    "validate_dataset",
    "validate_document",
]
