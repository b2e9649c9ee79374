"""Inference: partial assignments, CRF objective, beam search and the local baseline."""
from __future__ import annotations

from .beam_search import (
    Beam,
    CollectionResult,
    DecodeResult,
    collect_gradients,
    collect_gradients_bibsg,
    collect_gradients_bsg,
    collect_gradients_early_update,
    decode,
    decode_detailed,
    expand_step,
)
from .crf_objective import (
    DuplicatePathError,
    ExactInferenceCapError,
    ExactResult,
    GoldPathMissingError,
    ZSource,
    beam_distribution,
    exact_enumerate,
    exact_gradients,
    functional_gradients,
    joint_score,
    nll_loss,
)
from .local_model import collect_gradients_local, decode_local
from .partial import Direction, GradientPoint, PartialAssignment

__all__ = [
    "Beam",
    "CollectionResult",
    "DecodeResult",
    "Direction",
    "DuplicatePathError",
    "ExactInferenceCapError",
    "ExactResult",
    "GoldPathMissingError",
    "GradientPoint",
    "PartialAssignment",
    "ZSource",
    "beam_distribution",
    "collect_gradients",
    "collect_gradients_bibsg",
    "collect_gradients_bsg",
    "collect_gradients_early_update",
    "collect_gradients_local",
    "decode",
    "decode_detailed",
    "decode_local",
    "exact_enumerate",
    "exact_gradients",
    "expand_step",
    "functional_gradients",
    "joint_score",
    "nll_loss",
]
