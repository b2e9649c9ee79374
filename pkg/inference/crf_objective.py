"""Joint scores, normalised probabilities, the NLL loss and functional gradients.

Probabilities are computed in log space. ``exact_enumerate`` is the brute-force
oracle over every candidate sequence of a document.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

from boosting.ensemble import BoostedEnsemble
from config import DEFAULT_EXACT_MAX_SEQUENCES, SearchConfig
from corpus import Document, PairwiseFeatureStore
from features.document_view import DocumentFeatureView

from .partial import Direction, GradientPoint, PartialAssignment

Prefix = Tuple[int, ...]


class DuplicatePathError(ValueError):
    """Raised when a normalisation set holds the same assignment twice."""


class GoldPathMissingError(ValueError):
    """Raised when gradients are requested over paths without the gold path."""


class ExactInferenceCapError(ValueError):
    """Raised when a document has more sequences than the enumeration cap."""


class ZSource(str, Enum):
    BEAM = "beam"
    EXACT = "exact"


def _view_for(doc: Document, store: PairwiseFeatureStore, view: Optional[DocumentFeatureView]) -> DocumentFeatureView:
    if view is not None and view.doc is doc:
        return view
    return DocumentFeatureView(doc, store)


def joint_score(
    ens: BoostedEnsemble,
    partial: PartialAssignment,
    store: PairwiseFeatureStore,
    view: Optional[DocumentFeatureView] = None,
) -> float:
    """Recompute S of ``partial`` from scratch in its own decision order."""

    view = _view_for(partial.doc, store, view)
    total = 0.0
    for step, choice in enumerate(partial.choices):
        position = partial.position_of(step)
        history = partial.doc.entities_of(partial.positions[:step], partial.choices[:step])
        row = view.joint_row(position, choice, history)
        total = total + float(ens.predict(row[None, :])[0])
    return total


def score_assignment(
    ens: BoostedEnsemble,
    doc: Document,
    assignment: Sequence[int],
    store: PairwiseFeatureStore,
    view: Optional[DocumentFeatureView] = None,
) -> float:
    """Forward-decomposition score of a full assignment given in position order."""

    partial = PartialAssignment(doc, Direction.FORWARD, tuple(int(c) for c in assignment))
    return joint_score(ens, partial, store, view)


def _check_paths(paths: Sequence[PartialAssignment]) -> None:
    if not paths:
        raise ValueError("cannot normalise over an empty set of paths")
    if len(set(paths)) != len(paths):
        raise DuplicatePathError("normalisation set contains duplicate assignments")
    first = paths[0]
    if any(p.direction is not first.direction or len(p) != len(first) for p in paths):
        raise ValueError("all paths must cover the same decided range")


def beam_log_distribution(paths: Sequence[PartialAssignment]) -> np.ndarray:
    _check_paths(paths)
    scores = np.asarray([path.score for path in paths], dtype=np.float64)
    return scores - logsumexp(scores)


def beam_distribution(paths: Sequence[PartialAssignment]) -> np.ndarray:
    """Softmax of path scores, normalised over exactly these paths."""

    return np.exp(beam_log_distribution(paths))


def functional_gradients(
    paths: Sequence[PartialAssignment],
    store: Optional[PairwiseFeatureStore] = None,
    view: Optional[DocumentFeatureView] = None,
) -> List[GradientPoint]:
    """One point per path at its latest position: residual = 1[gold] - p(path)."""

    if not any(path.is_gold for path in paths):
        raise GoldPathMissingError("gold path is not among the normalisation set")
    probabilities = beam_distribution(paths)
    points: List[GradientPoint] = []
    for path, probability in zip(paths, probabilities):
        features = path.last_features
        if features is None:
            if store is None and view is None:
                raise ValueError("paths carry no cached features; pass the pairwise store")
            doc_view = view if view is not None else DocumentFeatureView(path.doc, store)  # type: ignore[arg-type]
            features = doc_view.joint_row(path.last_position, path.choices[-1], path.entities[:-1])
        residual = (1.0 if path.is_gold else 0.0) - float(probability)
        points.append(
            GradientPoint(
                features=features,
                residual=residual,
                position=path.last_position,
                direction=path.direction,
                doc_id=path.doc.doc_id,
            )
        )
    return points


def beam_nll(paths: Sequence[PartialAssignment]) -> float:
    """log-sum-exp of the path scores minus the gold path's score."""

    gold = [path for path in paths if path.is_gold]
    if not gold:
        raise GoldPathMissingError("gold path is not among the normalisation set")
    _check_paths(paths)
    scores = np.asarray([path.score for path in paths], dtype=np.float64)
    return float(logsumexp(scores) - gold[0].score)


@dataclass(frozen=True)
class ExactResult:
    log_z: float
    argmax: Prefix
    argmax_score: float
    gold_score: float
    sequence_log_probs: np.ndarray = field(repr=False)
    prefix_marginals: Dict[Prefix, float] = field(repr=False)

    @property
    def nll(self) -> float:
        return self.log_z - self.gold_score

    def probability(self, assignment: Sequence[int]) -> float:
        return float(np.exp(self.sequence_log_probs[tuple(assignment)]))


def exact_enumerate(
    ens: BoostedEnsemble,
    doc: Document,
    store: PairwiseFeatureStore,
    max_sequences: int = DEFAULT_EXACT_MAX_SEQUENCES,
    offsets: Optional[Mapping[Prefix, float]] = None,
    view: Optional[DocumentFeatureView] = None,
) -> ExactResult:
    """Enumerate every sequence; ``offsets`` adds a constant to the factor ending a prefix."""

    counts = doc.candidate_counts
    if doc.sequence_count > max_sequences:
        raise ExactInferenceCapError(
            f"doc {doc.doc_id!r} has {doc.sequence_count} sequences, above the cap of {max_sequences}"
        )
    view = _view_for(doc, store, view)
    offsets = offsets or {}

    scores = np.zeros((), dtype=np.float64)
    for t in range(doc.T):
        prefix_shape = counts[:t]
        blocks = []
        for prefix in itertools.product(*(range(k) for k in prefix_shape)):
            history = doc.entities_of(range(t), prefix)
            blocks.append(view.joint_block(t, history))
        factors = ens.predict(np.concatenate(blocks, axis=0)).reshape(counts[: t + 1])
        if offsets:
            factors = factors.copy()
            for prefix, delta in offsets.items():
                if len(prefix) == t + 1:
                    factors[tuple(prefix)] += delta
        scores = scores[..., None] + factors

    log_z = float(logsumexp(scores))
    sequence_log_probs = scores - log_z
    flat_best = int(np.argmax(scores))
    best = tuple(int(i) for i in np.unravel_index(flat_best, counts))
    gold = doc.gold_sequence

    marginals: Dict[Prefix, float] = {}
    for length in range(1, doc.T + 1):
        trailing = tuple(range(length, doc.T))
        level = logsumexp(sequence_log_probs, axis=trailing) if trailing else sequence_log_probs
        for prefix in np.ndindex(*counts[:length]):
            marginals[tuple(int(i) for i in prefix)] = float(np.exp(level[prefix]))

    return ExactResult(
        log_z=log_z,
        argmax=best,
        argmax_score=float(scores[best]),
        gold_score=float(scores[gold]),
        sequence_log_probs=sequence_log_probs,
        prefix_marginals=marginals,
    )


def exact_gradients(
    ens: BoostedEnsemble,
    doc: Document,
    store: PairwiseFeatureStore,
    max_sequences: int = DEFAULT_EXACT_MAX_SEQUENCES,
    result: Optional[ExactResult] = None,
) -> Dict[Prefix, float]:
    """Gradient p(prefix | x) - 1[prefix is gold] for every prefix."""

    result = result or exact_enumerate(ens, doc, store, max_sequences=max_sequences)
    gold = doc.gold_sequence
    return {
        prefix: probability - (1.0 if prefix == gold[: len(prefix)] else 0.0)
        for prefix, probability in result.prefix_marginals.items()
    }


def nll_loss(
    ens: BoostedEnsemble,
    doc: Document,
    store: PairwiseFeatureStore,
    z_source: ZSource | str = ZSource.EXACT,
    beam_paths: Optional[Sequence[PartialAssignment]] = None,
    search: Optional[SearchConfig] = None,
    max_sequences: int = DEFAULT_EXACT_MAX_SEQUENCES,
) -> float:
    """log Z - S(gold), with Z exact or summed over a final beam.

    Without ``beam_paths`` the beam comes from a forward search that keeps
    the gold path.
    """

    source = ZSource(z_source)
    if source is ZSource.EXACT:
        return exact_enumerate(ens, doc, store, max_sequences=max_sequences).nll
    if beam_paths is None:
        from .beam_search import final_gold_beam

        beam_paths = final_gold_beam(ens, doc, store, search or SearchConfig()).paths
    paths = list(beam_paths)
    if not any(path.is_gold for path in paths):
        gold = PartialAssignment(doc, Direction.FORWARD, doc.gold_sequence)
        paths.append(
            PartialAssignment(
                doc,
                Direction.FORWARD,
                doc.gold_sequence,
                score=joint_score(ens, gold, store),
                is_gold=True,
            )
        )
    return beam_nll(paths)


__all__ = [
    "DuplicatePathError",
    "ExactInferenceCapError",
    "ExactResult",
    "GoldPathMissingError",
    "ZSource",
    "beam_distribution",
    "beam_log_distribution",
    "beam_nll",
    "exact_enumerate",
    "exact_gradients",
    "functional_gradients",
    "joint_score",
    "nll_loss",
    "score_assignment",
]
