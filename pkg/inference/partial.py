"""Partial assignments explored by the search and the gradient points they emit."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Tuple

import numpy as np

from corpus import Document


class Direction(str, Enum):
    FORWARD = "forward"
    BACKWARD = "backward"

    @property
    def opposite(self) -> "Direction":
        return Direction.BACKWARD if self is Direction.FORWARD else Direction.FORWARD


@dataclass(frozen=True)
class PartialAssignment:
    """A prefix (forward) or suffix (backward) of candidate choices.

    ``choices`` is kept in decision order: forward ``choices[i]`` decides
    position ``i``, backward ``choices[i]`` decides position ``T - 1 - i``.
    ``score`` is the joint score of the decided range; ``last_features`` holds
    the joint feature row of the most recent decision when the search built it.
    """

    doc: Document = field(compare=False, repr=False)
    direction: Direction
    choices: Tuple[int, ...]
    score: float = field(default=0.0, compare=False)
    is_gold: Optional[bool] = field(default=None, compare=False)
    entities: Tuple[str, ...] = field(default=(), compare=False, repr=False)
    last_features: Optional[np.ndarray] = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        # hand-built paths derive gold status and entities from the document
        if self.is_gold is None:
            gold = gold_assignment(self.doc, self.direction, len(self.choices))
            object.__setattr__(self, "is_gold", self.choices == gold)
        if len(self.entities) != len(self.choices):
            object.__setattr__(self, "entities", self.doc.entities_of(self.positions, self.choices))

    @classmethod
    def empty(cls, doc: Document, direction: Direction) -> "PartialAssignment":
        return cls(doc, direction, (), is_gold=True)

    def __len__(self) -> int:
        return len(self.choices)

    def position_of(self, step: int) -> int:
        if self.direction is Direction.FORWARD:
            return step
        return self.doc.T - 1 - step

    @property
    def positions(self) -> Tuple[int, ...]:
        return tuple(self.position_of(step) for step in range(len(self.choices)))

    @property
    def next_position(self) -> int:
        return self.position_of(len(self.choices))

    @property
    def last_position(self) -> int:
        if not self.choices:
            raise ValueError("empty assignment has no decided position")
        return self.position_of(len(self.choices) - 1)

    @property
    def is_complete(self) -> bool:
        return len(self.choices) == self.doc.T

    @property
    def assignment(self) -> Tuple[int, ...]:
        """Choices in position order."""

        if self.direction is Direction.FORWARD:
            return self.choices
        return self.choices[::-1]

    def sort_key(self, selection_score: Optional[float] = None) -> Tuple[float, Tuple[int, ...]]:
        value = self.score if selection_score is None else selection_score
        return (-value, self.assignment)

    def extend(self, candidate_index: int, factor: float, features: Optional[np.ndarray] = None) -> "PartialAssignment":
        position = self.next_position
        mention = self.doc.mentions[position]
        return PartialAssignment(
            doc=self.doc,
            direction=self.direction,
            choices=self.choices + (candidate_index,),
            score=self.score + factor,
            is_gold=self.is_gold and candidate_index == mention.gold_index,
            entities=self.entities + (mention.candidates[candidate_index].entity_id,),
            last_features=features,
        )


def gold_assignment(doc: Document, direction: Direction, length: int) -> Tuple[int, ...]:
    """Gold choices, in decision order, for the first ``length`` decisions."""

    gold = doc.gold_sequence
    if direction is Direction.FORWARD:
        return gold[:length]
    return tuple(reversed(gold))[:length]


@dataclass(frozen=True)
class GradientPoint:
    """Regression target for one (path, position): residual = -gradient."""

    features: np.ndarray = field(repr=False)
    residual: float
    position: int = -1
    direction: Direction = Direction.FORWARD
    doc_id: str = ""


__all__ = ["Direction", "GradientPoint", "PartialAssignment", "gold_assignment"]
