"""Beam search for decoding and for collecting functional-gradient points.

Training strategies:

* ``bs-early``: forward beam; stop at the first step where the gold prefix
  falls out of the top-B and emit gradients over that step's beam plus gold.
* ``bsg``: forward beam that always keeps the gold prefix; gradients at
  every step.
* ``bibsg``: alternating forward and backward gold-keeping passes where each
  direction's selection adds the best join with the opposite direction's
  beam from the previous pass.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.special import logsumexp

from boosting.ensemble import BoostedEnsemble
from config import SearchConfig, Strategy
from corpus import Document, PairwiseFeatureStore
from features.document_view import DocumentFeatureView

from .crf_objective import beam_distribution, beam_nll, functional_gradients, score_assignment
from .partial import Direction, GradientPoint, PartialAssignment

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Beam:
    """Paths covering the same decided range, best selection score first."""

    paths: Tuple[PartialAssignment, ...]
    width: int
    direction: Direction

    @classmethod
    def initial(cls, doc: Document, width: int, direction: Direction) -> "Beam":
        return cls((PartialAssignment.empty(doc, direction),), width, direction)

    @property
    def best(self) -> PartialAssignment:
        return self.paths[0]

    @property
    def gold(self) -> Optional[PartialAssignment]:
        for path in self.paths:
            if path.is_gold:
                return path
        return None

    @property
    def has_gold(self) -> bool:
        return self.gold is not None

    @property
    def depth(self) -> int:
        return len(self.paths[0])

    def __len__(self) -> int:
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)


@dataclass(frozen=True)
class StepResult:
    beam: Beam
    selection: Tuple[float, ...]
    gold_extension: Optional[PartialAssignment]
    gold_fell_out: bool


@dataclass(frozen=True)
class DecodeResult:
    assignment: Tuple[int, ...]
    probability: float
    direction: Direction


@dataclass(frozen=True)
class CollectionResult:
    points: Tuple[GradientPoint, ...]
    beam_nll: float

    def __len__(self) -> int:
        return len(self.points)


def _view(doc: Document, store: PairwiseFeatureStore, view: Optional[DocumentFeatureView]) -> DocumentFeatureView:
    if view is not None and view.doc is doc:
        return view
    return DocumentFeatureView(doc, store)


def join_bonus(
    ens: BoostedEnsemble,
    view: DocumentFeatureView,
    t: int,
    opposing: Sequence[PartialAssignment],
) -> np.ndarray:
    """Best join of each candidate at ``t`` with an opposing partial assignment.

    ``bonus[c] = max_s [score(s) + F(c | entities of s)]`` over ``opposing``,
    which must not cover ``t``. An empty ``opposing`` set is treated as the
    single empty assignment.
    """

    if not opposing:
        opposing = (PartialAssignment.empty(view.doc, Direction.FORWARD),)
    blocks = [view.joint_block(t, path.entities) for path in opposing]
    factors = ens.predict(np.concatenate(blocks, axis=0)).reshape(len(opposing), -1)
    base = np.asarray([path.score for path in opposing], dtype=np.float64)
    return (factors + base[:, None]).max(axis=0)


def expand_step(
    ens: BoostedEnsemble,
    view: DocumentFeatureView,
    beam: Beam,
    t: int,
    bonus: Optional[np.ndarray] = None,
    keep_gold: bool = False,
) -> StepResult:
    """Extend every path by every candidate at ``t`` and keep the top ``beam.width``.

    Selection uses ``score + bonus[c]``; cached scores never include the
    bonus. Ties go to the lexicographically smaller assignment. With
    ``keep_gold`` the gold extension is re-inserted when pruned.
    """

    expected = beam.paths[0].next_position
    if t != expected:
        raise ValueError(f"beam covers up to position {expected}, cannot expand {t}")
    blocks = [view.joint_block(t, path.entities) for path in beam.paths]
    stacked = np.concatenate(blocks, axis=0)
    factors = ens.predict(stacked)
    k = blocks[0].shape[0]
    parents = np.repeat(np.arange(len(beam.paths)), k)
    candidates = np.tile(np.arange(k), len(beam.paths))
    scores = np.asarray([path.score for path in beam.paths], dtype=np.float64)[parents] + factors
    selection = scores if bonus is None else scores + np.asarray(bonus, dtype=np.float64)[candidates]

    # Assignment matrix in position order, for lexicographic tie-breaking.
    prior = np.asarray([path.assignment for path in beam.paths], dtype=np.int64).reshape(len(beam.paths), -1)
    if beam.direction is Direction.FORWARD:
        assignments = np.column_stack([prior[parents], candidates])
    else:
        assignments = np.column_stack([candidates, prior[parents]])
    keys = [assignments[:, column] for column in range(assignments.shape[1] - 1, -1, -1)]
    order = np.lexsort(keys + [-selection])

    gold_row: Optional[int] = None
    gold_parent = next((i for i, path in enumerate(beam.paths) if path.is_gold), None)
    if gold_parent is not None:
        gold_row = gold_parent * k + beam.paths[0].doc.mentions[t].gold_index

    kept_rows = [int(row) for row in order[: beam.width]]
    fell_out = gold_row is not None and gold_row not in kept_rows
    if keep_gold and fell_out:
        rank = {int(row): position for position, row in enumerate(order)}
        kept_rows = sorted(kept_rows + [gold_row], key=rank.__getitem__)

    def _build(row: int) -> PartialAssignment:
        parent = beam.paths[int(parents[row])]
        return parent.extend(int(candidates[row]), float(factors[row]), stacked[row])

    kept = tuple(_build(row) for row in kept_rows)
    gold_extension: Optional[PartialAssignment] = None
    if gold_row is not None:
        gold_extension = next((path for path in kept if path.is_gold), None)
        if gold_extension is None:
            gold_extension = _build(gold_row)
    return StepResult(
        beam=Beam(kept, beam.width, beam.direction),
        selection=tuple(float(selection[row]) for row in kept_rows),
        gold_extension=gold_extension,
        gold_fell_out=fell_out,
    )


def _positions(doc: Document, direction: Direction) -> range:
    if direction is Direction.FORWARD:
        return range(doc.T)
    return range(doc.T - 1, -1, -1)


@dataclass(frozen=True)
class _Pass:
    """Beams of one directional pass, indexed by how many positions they cover."""

    beams: Tuple[Beam, ...]
    points: Tuple[GradientPoint, ...]

    @property
    def final(self) -> Beam:
        return self.beams[-1]


def _opposing_paths(previous: Optional[_Pass], doc: Document, direction: Direction, t: int) -> Optional[Tuple[PartialAssignment, ...]]:
    """Opposing-direction paths covering the far side of ``t``; ``None`` when no pass exists yet."""

    if previous is None:
        return None
    if direction is Direction.FORWARD:
        covered = doc.T - 1 - t
    else:
        covered = t
    return previous.beams[covered].paths


def _run_pass(
    ens: BoostedEnsemble,
    view: DocumentFeatureView,
    direction: Direction,
    width: int,
    keep_gold: bool,
    emit: bool,
    opposing: Optional[_Pass] = None,
) -> _Pass:
    doc = view.doc
    beam = Beam.initial(doc, width, direction)
    beams = [beam]
    points: List[GradientPoint] = []
    for t in _positions(doc, direction):
        paths = _opposing_paths(opposing, doc, direction, t)
        bonus = join_bonus(ens, view, t, paths) if paths is not None else None
        beam = expand_step(ens, view, beam, t, bonus=bonus, keep_gold=keep_gold).beam
        beams.append(beam)
        if emit:
            points.extend(functional_gradients(beam.paths))
    return _Pass(tuple(beams), tuple(points))


def collect_gradients_early_update(
    ens: BoostedEnsemble,
    doc: Document,
    store: PairwiseFeatureStore,
    beam_width: int,
    view: Optional[DocumentFeatureView] = None,
) -> CollectionResult:
    view = _view(doc, store, view)
    beam = Beam.initial(doc, beam_width, Direction.FORWARD)
    for t in range(doc.T):
        step = expand_step(ens, view, beam, t)
        if step.gold_fell_out:
            emission = list(step.beam.paths) + [step.gold_extension]
            return CollectionResult(tuple(functional_gradients(emission)), beam_nll(emission))
        beam = step.beam
    paths = list(beam.paths)
    return CollectionResult(tuple(functional_gradients(paths)), beam_nll(paths))


def collect_gradients_bsg(
    ens: BoostedEnsemble,
    doc: Document,
    store: PairwiseFeatureStore,
    beam_width: int,
    view: Optional[DocumentFeatureView] = None,
) -> CollectionResult:
    view = _view(doc, store, view)
    run = _run_pass(ens, view, Direction.FORWARD, beam_width, keep_gold=True, emit=True)
    return CollectionResult(run.points, beam_nll(run.final.paths))


def collect_gradients_bibsg(
    ens: BoostedEnsemble,
    doc: Document,
    store: PairwiseFeatureStore,
    config: SearchConfig,
    view: Optional[DocumentFeatureView] = None,
) -> CollectionResult:
    view = _view(doc, store, view)
    points: List[GradientPoint] = []
    backward: Optional[_Pass] = None
    forward: Optional[_Pass] = None
    for _ in range(config.bibsg_rounds):
        forward = _run_pass(
            ens, view, Direction.FORWARD, config.beam_width, keep_gold=True, emit=True, opposing=backward
        )
        points.extend(forward.points)
        backward = _run_pass(
            ens, view, Direction.BACKWARD, config.beam_width, keep_gold=True, emit=True, opposing=forward
        )
        points.extend(backward.points)
    assert forward is not None
    return CollectionResult(tuple(points), beam_nll(forward.final.paths))


def collect_gradients(
    ens: BoostedEnsemble,
    doc: Document,
    store: PairwiseFeatureStore,
    config: SearchConfig,
    view: Optional[DocumentFeatureView] = None,
) -> CollectionResult:
    strategy = config.strategy
    if strategy is Strategy.EARLY_UPDATE:
        return collect_gradients_early_update(ens, doc, store, config.beam_width, view)
    if strategy is Strategy.BSG:
        return collect_gradients_bsg(ens, doc, store, config.beam_width, view)
    if strategy is Strategy.BIBSG:
        return collect_gradients_bibsg(ens, doc, store, config, view)
    from .local_model import collect_gradients_local

    return collect_gradients_local(ens, doc, store, view)


def final_gold_beam(
    ens: BoostedEnsemble,
    doc: Document,
    store: PairwiseFeatureStore,
    config: SearchConfig,
) -> Beam:
    """Final forward beam of a gold-keeping search (the beam used for beam NLL)."""

    view = DocumentFeatureView(doc, store)
    return _run_pass(ens, view, Direction.FORWARD, config.beam_width, keep_gold=True, emit=False).final


def _best_by_score(beam: Beam) -> PartialAssignment:
    # beam order includes the join bonus
    return min(beam.paths, key=lambda path: (-path.score, path.assignment))


def _best_of_directions(
    ens: BoostedEnsemble,
    view: DocumentFeatureView,
    forward: Beam,
    backward: Beam,
) -> DecodeResult:
    doc = view.doc
    rescored: Dict[Tuple[int, ...], float] = {}
    for path in list(forward.paths) + list(backward.paths):
        if path.assignment not in rescored:
            rescored[path.assignment] = score_assignment(ens, doc, path.assignment, view.store, view)
    log_z = float(logsumexp(np.asarray(list(rescored.values()), dtype=np.float64)))
    contenders = [
        (_best_by_score(forward).assignment, Direction.FORWARD),
        (_best_by_score(backward).assignment, Direction.BACKWARD),
    ]
    assignment, direction = min(contenders, key=lambda item: (-rescored[item[0]], item[0]))
    return DecodeResult(assignment, float(np.exp(rescored[assignment] - log_z)), direction)


def decode_detailed(
    ens: BoostedEnsemble,
    doc: Document,
    store: PairwiseFeatureStore,
    config: SearchConfig,
    view: Optional[DocumentFeatureView] = None,
) -> DecodeResult:
    view = _view(doc, store, view)
    strategy = config.strategy
    if strategy is Strategy.LOCAL:
        from .local_model import decode_local_detailed

        return decode_local_detailed(ens, doc, store, view)
    if strategy is not Strategy.BIBSG:
        final = _run_pass(ens, view, Direction.FORWARD, config.beam_width, keep_gold=False, emit=False).final
        probability = float(beam_distribution(final.paths)[0])
        return DecodeResult(final.best.assignment, probability, Direction.FORWARD)

    backward: Optional[_Pass] = None
    forward: Optional[_Pass] = None
    for _ in range(config.bibsg_rounds):
        forward = _run_pass(
            ens, view, Direction.FORWARD, config.beam_width, keep_gold=False, emit=False, opposing=backward
        )
        backward = _run_pass(
            ens, view, Direction.BACKWARD, config.beam_width, keep_gold=False, emit=False, opposing=forward
        )
    assert forward is not None and backward is not None
    return _best_of_directions(ens, view, forward.final, backward.final)


def decode(
    ens: BoostedEnsemble,
    doc: Document,
    store: PairwiseFeatureStore,
    config: SearchConfig,
    view: Optional[DocumentFeatureView] = None,
) -> Tuple[int, ...]:
    """Predicted candidate index for every mention, in position order."""

    return decode_detailed(ens, doc, store, config, view).assignment


__all__ = [
    "Beam",
    "CollectionResult",
    "DecodeResult",
    "StepResult",
    "collect_gradients",
    "collect_gradients_bibsg",
    "collect_gradients_bsg",
    "collect_gradients_early_update",
    "decode",
    "decode_detailed",
    "expand_step",
    "final_gold_beam",
    "join_bonus",
]
