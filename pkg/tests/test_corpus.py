import numpy as np
import pytest

from corpus import (
    CorpusValidationError,
    Dataset,
    PairwiseFeatureStore,
    lookup_pair,
    pair_key,
    validate_dataset,
    validate_document,
)
from tests.conftest import make_document


def test_lookup_pair_is_symmetric(tiny_store):
    assert np.array_equal(lookup_pair(tiny_store, "A", "C"), lookup_pair(tiny_store, "C", "A"))
    assert lookup_pair(tiny_store, "B", "D").tolist() == [3.0, -1.0]


def test_lookup_pair_absent_is_zero_and_read_only(tiny_store):
    vector = lookup_pair(tiny_store, "A", "D")
    assert vector.tolist() == [0.0, 0.0]
    with pytest.raises(ValueError):
        vector[0] = 1.0


def test_store_rejects_duplicate_unordered_pair():
    with pytest.raises(CorpusValidationError, match="duplicate pairwise entry"):
        PairwiseFeatureStore.from_records(1, [("x", "y", [1.0]), ("y", "x", [2.0])])


def test_store_rejects_wrong_width():
    with pytest.raises(CorpusValidationError, match="expected 2, got 3"):
        PairwiseFeatureStore.from_records(2, [("x", "y", [1.0, 2.0, 3.0])])


def test_store_items_are_sorted_and_keys_unordered(tiny_store):
    keys = [key for key, _ in tiny_store.items()]
    assert keys == sorted(keys)
    assert ("C", "A") in tiny_store
    assert pair_key("C", "A") == ("A", "C")
    assert len(tiny_store) == 3


def test_document_properties(tiny_doc):
    assert tiny_doc.T == 2
    assert tiny_doc.gold_sequence == (1, 0)
    assert tiny_doc.candidate_counts == (2, 2)
    assert tiny_doc.sequence_count == 4
    assert tiny_doc.entities_of([0, 1], [1, 1]) == ("B", "D")


def test_validate_document_gold_out_of_range():
    doc = make_document("bad", [[[0.0], [1.0]]], [5])
    with pytest.raises(CorpusValidationError, match="gold index out of range"):
        validate_document(doc, 1)


def test_validate_document_reports_ids():
    doc = make_document("doc-x", [[[0.0], [1.0]]], [0], [["E", "E"]])
    with pytest.raises(CorpusValidationError) as info:
        validate_document(doc, 1)
    assert "doc-x" in str(info.value)
    assert "m0" in str(info.value)


@pytest.mark.parametrize(
    "local, golds, message",
    [
        ([], [], "empty document"),
        ([[]], [0], "no candidates"),
        ([[[0.0, 1.0]]], [0], "local dimension mismatch"),
        ([[[float("nan")]]], [0], "non-finite"),
    ],
)
def test_validate_document_errors(local, golds, message):
    doc = make_document("d", local, golds)
    with pytest.raises(CorpusValidationError, match=message):
        validate_document(doc, 1)


def test_validate_dataset_rejects_duplicate_documents(tiny_doc, tiny_store):
    dataset = Dataset((tiny_doc, tiny_doc), tiny_store, 2, 2)
    with pytest.raises(CorpusValidationError, match="duplicate document id"):
        validate_dataset(dataset)


def test_validate_dataset_checks_store_width(tiny_doc):
    dataset = Dataset((tiny_doc,), PairwiseFeatureStore(3), 2, 2)
    with pytest.raises(CorpusValidationError, match="pairwise dimension mismatch"):
        dataset.validate()


def test_dataset_counts(tiny_dataset):
    assert tiny_dataset.dims == (2, 2)
    assert tiny_dataset.n_mentions == 2
    assert len(tiny_dataset) == 1
