"""Local gradient tree boosting: every mention is decided on its own.

Features keep the full joint width with an all-zero global block, so local
and structured models share one ensemble and model file format.
"""
from __future__ import annotations

from typing import List, Optional, Tuple

import numpy as np
from scipy.special import logsumexp

from boosting.ensemble import BoostedEnsemble
from corpus import Document, PairwiseFeatureStore
from features.document_view import DocumentFeatureView

from .beam_search import CollectionResult, DecodeResult
from .partial import Direction, GradientPoint


def _local_scores(ens: BoostedEnsemble, view: DocumentFeatureView, t: int) -> Tuple[np.ndarray, np.ndarray]:
    features = view.joint_block(t, ())
    return features, ens.predict(features)


def collect_gradients_local(
    ens: BoostedEnsemble,
    doc: Document,
    store: PairwiseFeatureStore,
    view: Optional[DocumentFeatureView] = None,
) -> CollectionResult:
    """One point per candidate: residual = 1[gold] - softmax over the mention's candidates."""

    view = view if view is not None and view.doc is doc else DocumentFeatureView(doc, store)
    points: List[GradientPoint] = []
    nll = 0.0
    for t, mention in enumerate(doc.mentions):
        features, scores = _local_scores(ens, view, t)
        log_norm = float(logsumexp(scores))
        probabilities = np.exp(scores - log_norm)
        nll += log_norm - float(scores[mention.gold_index])
        for c in range(len(mention.candidates)):
            indicator = 1.0 if c == mention.gold_index else 0.0
            points.append(
                GradientPoint(
                    features=features[c],
                    residual=indicator - float(probabilities[c]),
                    position=t,
                    direction=Direction.FORWARD,
                    doc_id=doc.doc_id,
                )
            )
    return CollectionResult(tuple(points), nll)


def decode_local_detailed(
    ens: BoostedEnsemble,
    doc: Document,
    store: PairwiseFeatureStore,
    view: Optional[DocumentFeatureView] = None,
) -> DecodeResult:
    view = view if view is not None and view.doc is doc else DocumentFeatureView(doc, store)
    assignment: List[int] = []
    log_probability = 0.0
    for t in range(doc.T):
        _, scores = _local_scores(ens, view, t)
        # np.argmax returns the lowest index among ties
        best = int(np.argmax(scores))
        assignment.append(best)
        log_probability += float(scores[best] - logsumexp(scores))
    return DecodeResult(tuple(assignment), float(np.exp(log_probability)), Direction.FORWARD)


def decode_local(
    ens: BoostedEnsemble,
    doc: Document,
    store: PairwiseFeatureStore,
    view: Optional[DocumentFeatureView] = None,
) -> Tuple[int, ...]:
    return decode_local_detailed(ens, doc, store, view).assignment


__all__ = ["collect_gradients_local", "decode_local", "decode_local_detailed"]
