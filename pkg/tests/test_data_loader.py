import json

import numpy as np
import pytest

from corpus import CorpusValidationError, Dataset
from data_loader import (
    CorpusLoader,
    DatasetFormatError,
    dump_dataset,
    load_dataset,
    load_pairwise,
    read_corpus_header,
)
from utils.cache import InMemoryCache


def _write_lines(path, records):
    path.write_text("".join(json.dumps(record) + "\n" for record in records), encoding="utf-8")
    return path


HEADER = {"format_version": 1, "d_local": 2, "d_pair": 2}
DOC = {
    "doc_id": "d1",
    "mentions": [
        {
            "mention_id": "m0",
            "gold": 1,
            "candidates": [{"entity": "A", "f": [0.0, 1.0]}, {"entity": "B", "f": [1.0, 0.0]}],
        }
    ],
}


def test_dump_and_load_preserve_dataset(tmp_path, tiny_dataset):
    corpus_path = tmp_path / "corpus.jsonl"
    pairwise_path = tmp_path / "pairwise.jsonl"
    dump_dataset(tiny_dataset, corpus_path, pairwise_path)
    loaded = load_dataset(corpus_path, pairwise_path)
    assert loaded == tiny_dataset
    assert loaded.pairwise == tiny_dataset.pairwise


def test_header_extra_is_kept(tmp_path, tiny_dataset):
    corpus_path = tmp_path / "corpus.jsonl"
    dump_dataset(tiny_dataset, corpus_path, header_extra={"split": "dev"})
    _, _, extra = read_corpus_header(corpus_path)
    assert extra == {"split": "dev"}
    assert load_dataset(corpus_path).header_extra["split"] == "dev"


def test_missing_pairwise_path_gives_empty_store(tmp_path):
    corpus_path = _write_lines(tmp_path / "c.jsonl", [HEADER, DOC])
    dataset = load_dataset(corpus_path)
    assert len(dataset.pairwise) == 0
    assert dataset.pairwise.d_pair == 2


def test_invalid_json_reports_line(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text(json.dumps(HEADER) + "\n{not json\n", encoding="utf-8")
    with pytest.raises(DatasetFormatError) as info:
        load_dataset(path)
    assert info.value.line == 2
    assert str(path) in str(info.value)


def test_bad_header_is_rejected(tmp_path):
    path = _write_lines(tmp_path / "c.jsonl", [{"format_version": 2, "d_local": 2, "d_pair": 2}])
    with pytest.raises(DatasetFormatError, match="format_version"):
        load_dataset(path)


def test_missing_field_is_malformed(tmp_path):
    broken = {"doc_id": "d1", "mentions": [{"mention_id": "m0", "candidates": []}]}
    path = _write_lines(tmp_path / "c.jsonl", [HEADER, broken])
    with pytest.raises(DatasetFormatError, match="malformed record"):
        load_dataset(path)


def test_gold_out_of_range_names_location(tmp_path):
    record = json.loads(json.dumps(DOC))
    record["mentions"][0]["gold"] = 7
    path = _write_lines(tmp_path / "c.jsonl", [HEADER, record])
    with pytest.raises(CorpusValidationError) as info:
        load_dataset(path)
    message = str(info.value)
    assert f"{path}:2" in message
    assert "gold index out of range" in message


def test_pairwise_width_inferred_and_checked(tmp_path):
    path = _write_lines(
        tmp_path / "p.jsonl",
        [{"a": "A", "b": "B", "f": [1.0, 2.0]}, {"a": "A", "b": "C", "f": [1.0]}],
    )
    with pytest.raises(CorpusValidationError, match="pairwise dimension mismatch"):
        load_pairwise(path)


def test_pairwise_duplicate_unordered_pair(tmp_path):
    path = _write_lines(
        tmp_path / "p.jsonl",
        [{"a": "A", "b": "B", "f": [1.0]}, {"a": "B", "b": "A", "f": [2.0]}],
    )
    with pytest.raises(CorpusValidationError, match="duplicate"):
        load_pairwise(path)


def test_missing_file_raises(tmp_path):
    with pytest.raises(FileNotFoundError):
        load_dataset(tmp_path / "absent.jsonl")


def test_corpus_loader_parses_shared_pairwise_once(tmp_path, tiny_dataset):
    corpus_a = tmp_path / "a.jsonl"
    corpus_b = tmp_path / "b.jsonl"
    pairwise_path = tmp_path / "pairwise.jsonl"
    dump_dataset(tiny_dataset, corpus_a, pairwise_path)
    dump_dataset(tiny_dataset, corpus_b)
    cache = InMemoryCache()
    loader = CorpusLoader(cache)
    assert loader.cache is cache
    first = loader.load(corpus_a, pairwise_path)
    second = loader.load(corpus_b, pairwise_path)
    assert first.pairwise is second.pairwise
    assert cache.stats.hits == 1
    assert cache.stats.hit_rate == 0.5


def test_corpus_loader_accepts_empty_pairwise_file(tmp_path, tiny_doc):
    from corpus import PairwiseFeatureStore

    dataset = Dataset((tiny_doc,), PairwiseFeatureStore(2), 2, 2)
    corpus_path = tmp_path / "c.jsonl"
    pairwise_path = tmp_path / "p.jsonl"
    dump_dataset(dataset, corpus_path, pairwise_path)
    loaded = CorpusLoader().load(corpus_path, pairwise_path)
    assert len(loaded.pairwise) == 0
    assert np.array_equal(loaded.pairwise.lookup("A", "C"), np.zeros(2))
