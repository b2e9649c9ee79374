"""JSONL corpus and pairwise-feature loading for entity disambiguation datasets."""
from __future__ import annotations

import json
import logging
from pathlib import Path
from typing import Any, Dict, Iterator, Mapping, Optional, Tuple

from config import FORMAT_VERSION
from corpus import (
    Candidate,
    CorpusValidationError,
    Dataset,
    Document,
    Mention,
    PairwiseFeatureStore,
    build_candidate,
    validate_dataset,
    validate_document,
)
from utils.cache import CacheBackend, InMemoryCache
from utils.validation import validate_identifier

logger = logging.getLogger(__name__)

_HEADER_KEYS = ("format_version", "d_local", "d_pair")


class DatasetFormatError(ValueError):
    """Raised for malformed corpus or pairwise files (path and 1-based line number)."""

    def __init__(self, path: Path | str, line: int, message: str) -> None:
        super().__init__(f"{path}:{line}: {message}")
        self.path = str(path)
        self.line = line


def _iter_json_lines(path: Path) -> Iterator[Tuple[int, Any]]:
    if not path.exists():
        raise FileNotFoundError(f"No such file: {path}")
    with path.open("r", encoding="utf-8") as handle:
        for line_number, raw in enumerate(handle, start=1):
            if not raw.strip():
                continue
            try:
                yield line_number, json.loads(raw)
            except json.JSONDecodeError as exc:
                raise DatasetFormatError(path, line_number, f"invalid JSON ({exc.msg})") from exc


def _positive_int(value: Any, name: str, path: Path, line: int) -> int:
    if isinstance(value, bool) or not isinstance(value, int) or value < 1:
        raise DatasetFormatError(path, line, f"{name} must be a positive integer, got {value!r}")
    return value


def _parse_header(record: Any, path: Path, line: int) -> Tuple[int, int, Dict[str, Any]]:
    if not isinstance(record, dict) or any(key not in record for key in _HEADER_KEYS):
        raise DatasetFormatError(
            path, line, 'header must be {"format_version":1,"d_local":int,"d_pair":int}'
        )
    if record["format_version"] != FORMAT_VERSION:
        raise DatasetFormatError(
            path, line, f"unsupported format_version {record['format_version']!r}"
        )
    d_local = _positive_int(record["d_local"], "d_local", path, line)
    d_pair = _positive_int(record["d_pair"], "d_pair", path, line)
    extra = {key: value for key, value in record.items() if key not in _HEADER_KEYS}
    return d_local, d_pair, extra


def read_corpus_header(corpus_path: Path | str) -> Tuple[int, int, Dict[str, Any]]:
    """Return ``(d_local, d_pair, extra)`` from a corpus file's header line."""

    path = Path(corpus_path)
    for line_number, record in _iter_json_lines(path):
        return _parse_header(record, path, line_number)
    raise DatasetFormatError(path, 1, "missing header record")


def _parse_document(record: Any, d_local: int, path: Path, line: int) -> Document:
    if not isinstance(record, dict):
        raise DatasetFormatError(path, line, "document record must be a JSON object")
    try:
        doc_id = validate_identifier(record["doc_id"], "doc_id")
        raw_mentions = record["mentions"]
        if not isinstance(raw_mentions, list):
            raise DatasetFormatError(path, line, f"doc {doc_id!r}: mentions must be a list")
        mentions = []
        for raw_mention in raw_mentions:
            mention_id = validate_identifier(raw_mention["mention_id"], "mention_id")
            gold = raw_mention["gold"]
            if isinstance(gold, bool) or not isinstance(gold, int):
                raise DatasetFormatError(
                    path, line, f"doc {doc_id!r} mention {mention_id!r}: gold must be an integer"
                )
            candidates: list[Candidate] = []
            for raw_candidate in raw_mention["candidates"]:
                where = f"doc {doc_id!r} mention {mention_id!r}"
                candidates.append(
                    build_candidate(raw_candidate["entity"], raw_candidate["f"], d_local, where)
                )
            mentions.append(Mention(mention_id, gold, tuple(candidates)))
        document = Document(doc_id, tuple(mentions))
        validate_document(document, d_local)
    except DatasetFormatError:
        raise
    except CorpusValidationError as exc:
        raise CorpusValidationError(f"{path}:{line}: {exc}") from exc
    except (KeyError, TypeError, ValueError) as exc:
        detail = f"missing field {exc}" if isinstance(exc, KeyError) else str(exc)
        raise DatasetFormatError(path, line, f"malformed record: {detail}") from exc
    return document


def load_pairwise(pairwise_path: Path | str, d_pair: Optional[int] = None) -> PairwiseFeatureStore:
    """Parse a pairwise JSONL file; ``d_pair`` defaults to the first record's width."""

    path = Path(pairwise_path)
    store: Optional[PairwiseFeatureStore] = PairwiseFeatureStore(d_pair) if d_pair else None
    for line_number, record in _iter_json_lines(path):
        if not isinstance(record, dict) or not {"a", "b", "f"} <= record.keys():
            raise DatasetFormatError(path, line_number, 'pairwise record must be {"a","b","f"}')
        vector = record["f"]
        if not isinstance(vector, list) or not vector:
            raise DatasetFormatError(path, line_number, "pairwise vector must be a non-empty list")
        if store is None:
            store = PairwiseFeatureStore(len(vector))
        try:
            a = validate_identifier(record["a"], "entity id")
            b = validate_identifier(record["b"], "entity id")
            store._insert(a, b, vector)
        except CorpusValidationError as exc:
            raise CorpusValidationError(f"{path}:{line_number}: {exc}") from exc
        except (TypeError, ValueError) as exc:
            raise DatasetFormatError(path, line_number, str(exc)) from exc
    if store is None:
        raise DatasetFormatError(path, 1, "empty pairwise file with unknown d_pair")
    return store


def load_dataset(
    corpus_path: Path | str,
    pairwise_path: Optional[Path | str] = None,
    *,
    pairwise: Optional[PairwiseFeatureStore] = None,
) -> Dataset:
    """Load and validate a corpus plus its pairwise features.

    A missing ``pairwise_path`` yields an empty store of the declared width.
    An already parsed ``pairwise`` store may be passed instead of a path.
    """

    path = Path(corpus_path)
    header: Optional[Tuple[int, int, Dict[str, Any]]] = None
    documents: list[Document] = []
    for line_number, record in _iter_json_lines(path):
        if header is None:
            header = _parse_header(record, path, line_number)
            continue
        documents.append(_parse_document(record, header[0], path, line_number))
    if header is None:
        raise DatasetFormatError(path, 1, "missing header record")
    d_local, d_pair, extra = header

    if pairwise is None:
        if pairwise_path is not None:
            pairwise = load_pairwise(pairwise_path, d_pair)
        else:
            pairwise = PairwiseFeatureStore(d_pair)
    dataset = Dataset(tuple(documents), pairwise, d_local, d_pair, header_extra=extra)
    try:
        validate_dataset(dataset)
    except CorpusValidationError as exc:
        raise CorpusValidationError(f"{path}: {exc}") from exc
    logger.debug("载入语料 %s: %d 篇文档, %d 个指称", path, len(dataset), dataset.n_mentions)
    return dataset


def document_record(document: Document) -> Dict[str, Any]:
    return {
        "doc_id": document.doc_id,
        "mentions": [
            {
                "mention_id": mention.mention_id,
                "gold": mention.gold_index,
                "candidates": [
                    {"entity": c.entity_id, "f": [float(v) for v in c.local_features]}
                    for c in mention.candidates
                ],
            }
            for mention in document.mentions
        ],
    }


def _dumps(record: Mapping[str, Any]) -> str:
    return json.dumps(record, ensure_ascii=False, separators=(",", ":"))


def dump_dataset(
    dataset: Dataset,
    corpus_path: Path | str,
    pairwise_path: Optional[Path | str] = None,
    header_extra: Optional[Mapping[str, Any]] = None,
) -> None:
    """Write ``dataset`` in the corpus (and optionally pairwise) JSONL formats."""

    header: Dict[str, Any] = {
        "format_version": FORMAT_VERSION,
        "d_local": dataset.d_local,
        "d_pair": dataset.d_pair,
    }
    header.update(dict(dataset.header_extra))
    header.update(dict(header_extra or {}))
    corpus_file = Path(corpus_path)
    corpus_file.parent.mkdir(parents=True, exist_ok=True)
    with corpus_file.open("w", encoding="utf-8", newline="\n") as handle:
        handle.write(_dumps(header) + "\n")
        for document in dataset.documents:
            handle.write(_dumps(document_record(document)) + "\n")
    if pairwise_path is not None:
        dump_pairwise(dataset.pairwise, pairwise_path)


def dump_pairwise(store: PairwiseFeatureStore, pairwise_path: Path | str) -> None:
    path = Path(pairwise_path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        for (a, b), vector in store.items():
            handle.write(_dumps({"a": a, "b": b, "f": [float(v) for v in vector]}) + "\n")


class CorpusLoader:
    """Load corpora, parsing each pairwise file once per (path, size, mtime)."""

    def __init__(self, cache_backend: Optional[CacheBackend] = None) -> None:
        self.cache = cache_backend if cache_backend is not None else InMemoryCache(max_entries=8)

    def load(self, corpus_path: Path | str, pairwise_path: Optional[Path | str] = None) -> Dataset:
        if pairwise_path is None:
            return load_dataset(corpus_path)
        _, d_pair, _ = read_corpus_header(corpus_path)
        store = self.load_pairwise(pairwise_path, d_pair)
        return load_dataset(corpus_path, pairwise=store)

    def load_pairwise(self, pairwise_path: Path | str, d_pair: int) -> PairwiseFeatureStore:
        path = Path(pairwise_path).expanduser()
        if not path.exists():
            raise FileNotFoundError(f"No such file: {path}")
        stat = path.stat()
        cache_key = (str(path.resolve()), stat.st_size, stat.st_mtime_ns, d_pair)

        def parse() -> PairwiseFeatureStore:
            store = load_pairwise(path, d_pair)
            logger.info("解析实体对特征文件 %s: %d 条记录", path, len(store))
            return store

        store = self.cache.get_or_compute(cache_key, parse)
        stats = self.cache.stats
        logger.debug("实体对缓存命中率 %.2f (%d/%d)", stats.hit_rate, stats.hits, stats.hits + stats.misses)
        return store

    def clear_cache(self) -> None:
        self.cache.clear()


__all__ = [
    "CorpusLoader",
    "DatasetFormatError",
    "document_record",
    "dump_dataset",
    "dump_pairwise",
    "load_dataset",
    "load_pairwise",
    "read_corpus_header",
]
