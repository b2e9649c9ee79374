"""Synthetic disambiguation corpora with known ground truth."""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np

from config import SynthConfig
from corpus import Candidate, Dataset, Document, Mention, PairwiseFeatureStore, validate_dataset
from data_loader import dump_dataset, dump_pairwise

logger = logging.getLogger(__name__)

PRNG_NAME = "numpy.PCG64"
GENERATOR_VERSION = 1
SPLITS = ("train", "dev", "test")

_PairRecord = Tuple[str, str, np.ndarray]


def generator_header(config: SynthConfig) -> Dict[str, object]:
    return {"generator": {"prng": PRNG_NAME, "version": GENERATOR_VERSION, "seed": config.seed}}


def _is_informative(config: SynthConfig, t: int, draw: float) -> bool:
    if config.future_informative and t < config.T // 2:
        return False
    return draw < config.local_signal


def _document(
    config: SynthConfig,
    rng: np.random.Generator,
    split: str,
    index: int,
    pairs: List[_PairRecord],
) -> Document:
    doc_id = f"{split}-{index:05d}"
    k = config.candidates_per_mention
    golds = rng.integers(0, k, size=config.T)
    entity_ids = [[f"{doc_id}/m{t}/e{c}" for c in range(k)] for t in range(config.T)]

    mentions = []
    for t in range(config.T):
        features = rng.random((k, config.d_local))
        if _is_informative(config, t, float(rng.random())):
            features[golds[t], 0] += 1.0
        candidates = []
        for c in range(k):
            row = features[c].copy()
            row.setflags(write=False)
            candidates.append(Candidate(entity_ids[t][c], row))
        mentions.append(Mention(f"m{t}", int(golds[t]), tuple(candidates)))

    for t in range(config.T):
        for u in range(t + 1, config.T):
            selected = rng.random((k, k)) < config.noise_pairs
            noise = rng.random((k, k, config.d_pair)) * 0.1
            coherence = config.coherence_strength * (0.75 + 0.25 * rng.random(config.d_pair))
            for a in range(k):
                for b in range(k):
                    if a == golds[t] and b == golds[u]:
                        if config.coherence_strength > 0:
                            pairs.append((entity_ids[t][a], entity_ids[u][b], coherence))
                    elif selected[a, b]:
                        pairs.append((entity_ids[t][a], entity_ids[u][b], noise[a, b]))
    return Document(doc_id, tuple(mentions))


def generate(config: SynthConfig) -> Tuple[Dataset, Dataset, Dataset]:
    """Build train, dev and test splits sharing one pairwise store.

    Local noise is uniform on [0, 1); an informative mention adds 1.0 to the
    gold candidate's first local feature. Gold-gold pairs in a document carry
    ``coherence_strength * (0.75 + 0.25 u)`` and a ``noise_pairs`` fraction of
    the other cross-mention pairs carry ``0.1 u``.
    """

    rng = np.random.Generator(np.random.PCG64(config.seed))
    pairs: List[_PairRecord] = []
    documents: Dict[str, Tuple[Document, ...]] = {}
    for split, size in zip(SPLITS, (config.n_docs, config.n_dev, config.n_test)):
        documents[split] = tuple(_document(config, rng, split, i, pairs) for i in range(size))
    store = PairwiseFeatureStore.from_records(config.d_pair, pairs)
    extra = generator_header(config)
    datasets = tuple(
        Dataset(documents[split], store, config.d_local, config.d_pair, header_extra={**extra, "split": split})
        for split in SPLITS
    )
    for dataset in datasets:
        validate_dataset(dataset)
    logger.info(
        "生成合成语料: 训练 %d / 验证 %d / 测试 %d 篇文档, 实体对 %d 条",
        config.n_docs,
        config.n_dev,
        config.n_test,
        len(store),
    )
    return datasets  # type: ignore[return-value]


def write_synthetic(config: SynthConfig, out_dir: Path | str) -> Dict[str, Path]:
    """Write ``train.jsonl``, ``dev.jsonl``, ``test.jsonl`` and ``pairwise.jsonl``."""

    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    paths: Dict[str, Path] = {}
    for split, dataset in zip(SPLITS, generate(config)):
        paths[split] = directory / f"{split}.jsonl"
        dump_dataset(dataset, paths[split])
    paths["pairwise"] = directory / "pairwise.jsonl"
    dump_pairwise(dataset.pairwise, paths["pairwise"])
    return paths


__all__ = ["GENERATOR_VERSION", "PRNG_NAME", "SPLITS", "generate", "generator_header", "write_synthetic"]
