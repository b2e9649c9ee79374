import numpy as np
import pytest

from boosting.ensemble import BoostedEnsemble
from boosting.regression_tree import stump
from config import SearchConfig, Strategy
from corpus import PairwiseFeatureStore
from features.document_view import DocumentFeatureView
from inference.beam_search import (
    Beam,
    collect_gradients,
    collect_gradients_bibsg,
    collect_gradients_bsg,
    collect_gradients_early_update,
    decode,
    decode_detailed,
    expand_step,
    join_bonus,
    _run_pass,
)
from inference.crf_objective import exact_enumerate, joint_score
from inference.partial import Direction, PartialAssignment
from tests.conftest import make_document, random_document, random_ensemble, random_instance, random_store


def _two_by_two():
    return make_document("d", [[[0.0], [1.0]], [[0.0], [1.0]]], [1, 0])


def _run_forward(ens, doc, store, width, keep_gold=False):
    view = DocumentFeatureView(doc, store)
    beam = Beam.initial(doc, width, Direction.FORWARD)
    steps = []
    for t in range(doc.T):
        step = expand_step(ens, view, beam, t, keep_gold=keep_gold)
        steps.append(step)
        beam = step.beam
    return steps


def test_unbounded_beam_holds_all_sequences():
    doc = _two_by_two()
    steps = _run_forward(BoostedEnsemble.empty(1, 1), doc, PairwiseFeatureStore(1), width=10)
    assert sorted(path.assignment for path in steps[-1].beam) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_width_one_ties_keep_lexicographically_first():
    doc = _two_by_two()
    steps = _run_forward(BoostedEnsemble.empty(1, 1), doc, PairwiseFeatureStore(1), width=1)
    assert steps[0].beam.best.assignment == (0,)
    assert steps[-1].beam.best.assignment == (0, 0)


def test_width_one_follows_strictly_best_candidate():
    doc = make_document("d", [[[0.0], [0.0], [1.0]]], [0])
    ens = BoostedEnsemble.empty(1, 1).add_stage(stump(0, 0.5, 0.0, 1.0, 3))
    steps = _run_forward(ens, doc, PairwiseFeatureStore(1), width=1)
    assert steps[0].beam.best.assignment == (2,)


def test_keep_gold_reinserts_gold_in_rank_order():
    doc = _two_by_two()
    steps = _run_forward(BoostedEnsemble.empty(1, 1), doc, PairwiseFeatureStore(1), width=1, keep_gold=True)
    first = steps[0]
    assert first.gold_fell_out
    assert [path.assignment for path in first.beam] == [(0,), (1,)]
    assert len(first.beam) == 2


def test_expand_step_rejects_wrong_position():
    doc = _two_by_two()
    view = DocumentFeatureView(doc, PairwiseFeatureStore(1))
    with pytest.raises(ValueError):
        expand_step(BoostedEnsemble.empty(1, 1), view, Beam.initial(doc, 2, Direction.FORWARD), 1)


def test_bonus_changes_selection_not_scores():
    doc = _two_by_two()
    view = DocumentFeatureView(doc, PairwiseFeatureStore(1))
    ens = BoostedEnsemble.empty(1, 1)
    step = expand_step(ens, view, Beam.initial(doc, 1, Direction.FORWARD), 0, bonus=np.array([0.0, 2.0]))
    assert step.beam.best.assignment == (1,)
    assert step.beam.best.score == 0.0
    assert step.selection == (2.0,)


def test_join_bonus_with_empty_opposing_is_empty_history_factor(tiny_doc, tiny_store, rng):
    ens = random_ensemble(rng, 2, 2)
    view = DocumentFeatureView(tiny_doc, tiny_store)
    bonus = join_bonus(ens, view, 0, [PartialAssignment.empty(tiny_doc, Direction.BACKWARD)])
    np.testing.assert_array_equal(bonus, ens.predict(view.joint_block(0, ())))


def test_decode_single_mention_is_argmax():
    doc = make_document("d", [[[0.0], [1.0], [0.5]]], [0])
    ens = BoostedEnsemble.empty(1, 1).add_stage(stump(0, 0.75, 0.0, 1.0, 3))
    for strategy in Strategy:
        assert decode(ens, doc, PairwiseFeatureStore(1), SearchConfig(strategy=strategy)) == (1,)


def test_decode_all_ties_gives_first_assignment():
    doc = make_document("d", [[[0.0], [1.0]]] * 3, [1, 1, 1])
    for strategy in Strategy:
        config = SearchConfig(strategy=strategy, beam_width=2)
        assert decode(BoostedEnsemble.empty(1, 1), doc, PairwiseFeatureStore(1), config) == (0, 0, 0)


@pytest.mark.parametrize("seed", range(10))
def test_wide_beam_decode_matches_exact_argmax(seed):
    ens, doc, store = random_instance(seed)
    exact = exact_enumerate(ens, doc, store)
    for strategy in (Strategy.EARLY_UPDATE, Strategy.BSG, Strategy.BIBSG):
        config = SearchConfig(strategy=strategy, beam_width=256)
        result = decode_detailed(ens, doc, store, config)
        assert result.assignment == exact.argmax
        assert result.probability == pytest.approx(exact.probability(exact.argmax), rel=1e-9)


def test_early_update_with_full_beam_emits_at_last_step():
    ens, doc, store = random_instance(2)
    result = collect_gradients_early_update(ens, doc, store, beam_width=doc.sequence_count)
    assert len(result.points) == doc.sequence_count
    assert {point.position for point in result.points} == {doc.T - 1}
    assert sum(point.residual for point in result.points) == pytest.approx(0.0, abs=1e-12)


def test_early_update_stops_when_gold_falls_out():
    doc = _two_by_two()
    result = collect_gradients_early_update(BoostedEnsemble.empty(1, 1), doc, PairwiseFeatureStore(1), 1)
    # (0,) is kept, gold (1,) fell out at the first position
    assert len(result.points) == 2
    assert {point.position for point in result.points} == {0}
    assert sorted(point.residual for point in result.points) == pytest.approx([-0.5, 0.5])


def test_bsg_point_count_on_full_space():
    doc = _two_by_two()
    result = collect_gradients_bsg(BoostedEnsemble.empty(1, 1), doc, PairwiseFeatureStore(1), 4)
    assert len(result.points) == 6


@pytest.mark.parametrize("width", [1, 2, 3])
def test_bsg_per_step_accounting(width, rng):
    doc = random_document(rng, "d", [3, 4, 2, 3], 2)
    store = random_store(rng, [doc], 2)
    ens = random_ensemble(rng, 2, 2)
    result = collect_gradients_bsg(ens, doc, store, width)
    by_position = {}
    for point in result.points:
        by_position.setdefault(point.position, []).append(point.residual)
    assert sorted(by_position) == list(range(doc.T))
    for residuals in by_position.values():
        assert len(residuals) <= width + 1
        assert sum(residuals) == pytest.approx(0.0, abs=1e-12)
        assert sum(1 for r in residuals if r <= 0) >= len(residuals) - 1


def test_bibsg_single_round_forward_equals_bsg(rng):
    doc = random_document(rng, "d", [3, 3, 3], 2)
    store = random_store(rng, [doc], 2)
    ens = random_ensemble(rng, 2, 2)
    bsg = collect_gradients_bsg(ens, doc, store, 2)
    bibsg = collect_gradients_bibsg(ens, doc, store, SearchConfig(Strategy.BIBSG, 2, 1))
    forward = [p for p in bibsg.points if p.direction is Direction.FORWARD]
    assert len(forward) == len(bsg.points)
    for a, b in zip(forward, bsg.points):
        assert a.residual == b.residual
        assert np.array_equal(a.features, b.features)


def test_bibsg_single_mention_directions_agree(rng):
    doc = random_document(rng, "d", [4], 2)
    store = PairwiseFeatureStore(2)
    ens = random_ensemble(rng, 2, 2)
    result = collect_gradients_bibsg(ens, doc, store, SearchConfig(Strategy.BIBSG, 2, 1))
    forward = sorted((p.residual, p.features.tobytes()) for p in result.points if p.direction is Direction.FORWARD)
    backward = sorted((p.residual, p.features.tobytes()) for p in result.points if p.direction is Direction.BACKWARD)
    assert forward == backward


def test_bibsg_empty_pairwise_store_gives_zero_global_block(rng):
    doc = random_document(rng, "d", [3, 3, 3], 2)
    ens = random_ensemble(rng, 2, 2)
    result = collect_gradients_bibsg(ens, doc, PairwiseFeatureStore(2), SearchConfig(Strategy.BIBSG, 2, 2))
    for point in result.points:
        assert not point.features[2:].any()


def test_collect_gradients_dispatch(rng):
    ens, doc, store = random_instance(8)
    for strategy in Strategy:
        result = collect_gradients(ens, doc, store, SearchConfig(strategy=strategy, beam_width=2))
        assert len(result) > 0
        assert np.isfinite(result.beam_nll)


@pytest.mark.parametrize("seed", range(12))
def test_cached_path_scores_match_recomputed_scores(seed):
    ens, doc, store = random_instance(seed, max_T=4, max_k=3)
    view = DocumentFeatureView(doc, store)
    passes = []
    backward = None
    for _ in range(2):
        forward = _run_pass(ens, view, Direction.FORWARD, 2, keep_gold=True, emit=False, opposing=backward)
        backward = _run_pass(ens, view, Direction.BACKWARD, 2, keep_gold=True, emit=False, opposing=forward)
        passes.extend([forward, backward])
    passes.append(_run_pass(ens, view, Direction.FORWARD, 1, keep_gold=False, emit=False))

    checked = 0
    for run in passes:
        for beam in run.beams:
            for path in beam.paths:
                assert path.score == pytest.approx(joint_score(ens, path, store), rel=1e-9, abs=1e-12)
                checked += 1
    assert checked > len(passes)
