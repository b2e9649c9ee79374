"""Shared builders for small corpora, pairwise stores and ensembles."""
from __future__ import annotations

import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import pytest

REPO_ROOT = Path(__file__).resolve().parents[1]
if str(REPO_ROOT) not in sys.path:
    sys.path.insert(0, str(REPO_ROOT))

from boosting.ensemble import BoostedEnsemble  # noqa: E402
from boosting.regression_tree import fit_arrays  # noqa: E402
from corpus import Candidate, Dataset, Document, Mention, PairwiseFeatureStore  # noqa: E402
from features.aggregation import joint_dim  # noqa: E402


def make_document(
    doc_id: str,
    local: Sequence[Sequence[Sequence[float]]],
    golds: Sequence[int],
    entity_ids: Optional[Sequence[Sequence[str]]] = None,
) -> Document:
    """Document from nested local feature lists: ``local[t][c]`` is one vector."""

    mentions = []
    for t, rows in enumerate(local):
        ids = entity_ids[t] if entity_ids is not None else [f"{doc_id}/m{t}/e{c}" for c in range(len(rows))]
        candidates = tuple(
            Candidate(ids[c], np.asarray(row, dtype=np.float64)) for c, row in enumerate(rows)
        )
        mentions.append(Mention(f"m{t}", int(golds[t]), candidates))
    return Document(doc_id, tuple(mentions))


def random_document(
    rng: np.random.Generator,
    doc_id: str,
    counts: Sequence[int],
    d_local: int,
) -> Document:
    local = [rng.normal(size=(k, d_local)).tolist() for k in counts]
    golds = [int(rng.integers(0, k)) for k in counts]
    return make_document(doc_id, local, golds)


def random_store(
    rng: np.random.Generator, docs: Sequence[Document], d_pair: int, density: float = 0.6
) -> PairwiseFeatureStore:
    records = []
    for doc in docs:
        entities = [entity for mention in doc.mentions for entity in mention.entity_ids]
        for i, a in enumerate(entities):
            for b in entities[i + 1 :]:
                if rng.random() < density:
                    records.append((a, b, rng.normal(size=d_pair)))
    return PairwiseFeatureStore.from_records(d_pair, records)


def random_ensemble(
    rng: np.random.Generator, d_local: int, d_pair: int, n_stages: int = 3, max_depth: int = 3
) -> BoostedEnsemble:
    """Ensemble of trees fit to random targets, so scores vary across inputs."""

    dim = joint_dim(d_local, d_pair)
    ens = BoostedEnsemble.empty(d_local, d_pair)
    for _ in range(n_stages):
        X = rng.normal(size=(40, dim))
        y = rng.normal(size=40)
        ens = ens.add_stage(fit_arrays(X, y, max_depth=max_depth), float(rng.uniform(0.5, 1.5)))
    return ens


def random_instance(seed: int, max_T: int = 4, max_k: int = 4, d_local: int = 2, d_pair: int = 2):
    rng = np.random.default_rng(seed)
    T = int(rng.integers(1, max_T + 1))
    counts = [int(rng.integers(1, max_k + 1)) for _ in range(T)]
    doc = random_document(rng, f"doc{seed}", counts, d_local)
    store = random_store(rng, [doc], d_pair)
    ens = random_ensemble(rng, d_local, d_pair)
    return ens, doc, store


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_doc() -> Document:
    """Two mentions with two candidates each; gold is (1, 0)."""

    return make_document(
        "tiny",
        [[[0.0, 1.0], [1.0, 0.0]], [[0.5, 0.5], [0.2, 0.8]]],
        [1, 0],
        [["A", "B"], ["C", "D"]],
    )


@pytest.fixture
def tiny_store() -> PairwiseFeatureStore:
    return PairwiseFeatureStore.from_records(
        2, [("A", "C", [1.0, 0.0]), ("B", "C", [0.0, 2.0]), ("B", "D", [3.0, -1.0])]
    )


@pytest.fixture
def tiny_dataset(tiny_doc: Document, tiny_store: PairwiseFeatureStore) -> Dataset:
    return Dataset((tiny_doc,), tiny_store, d_local=2, d_pair=2)


def small_corpus(seed: int, n_docs: int, counts: Sequence[int] = (3, 3, 3), d_local: int = 2, d_pair: int = 2) -> Dataset:
    rng = np.random.default_rng(seed)
    docs: List[Document] = [random_document(rng, f"d{seed}-{i}", counts, d_local) for i in range(n_docs)]
    store = random_store(rng, docs, d_pair)
    return Dataset(tuple(docs), store, d_local, d_pair)
