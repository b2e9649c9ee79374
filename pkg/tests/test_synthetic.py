import numpy as np
import pytest

from config import SynthConfig
from data_loader import load_dataset, read_corpus_header
from synthetic import GENERATOR_VERSION, PRNG_NAME, generate, write_synthetic


def _small(**overrides):
    params = dict(n_docs=4, n_dev=2, n_test=1, T=4, candidates_per_mention=3, d_local=2, d_pair=2, seed=7)
    params.update(overrides)
    return SynthConfig(**params)


def test_split_sizes_and_shapes():
    train, dev, test = generate(_small())
    assert (len(train), len(dev), len(test)) == (4, 2, 1)
    for dataset in (train, dev, test):
        assert dataset.dims == (2, 2)
        for doc in dataset.documents:
            assert doc.candidate_counts == (3, 3, 3, 3)
    assert train.pairwise is dev.pairwise is test.pairwise


def test_generation_is_seeded():
    first = generate(_small())
    second = generate(_small())
    assert first[0] == second[0]
    assert first[0].pairwise == second[0].pairwise
    assert generate(_small(seed=8))[0] != first[0]


def test_full_local_signal_marks_gold():
    train, _, _ = generate(_small(local_signal=1.0))
    for doc in train.documents:
        for mention in doc.mentions:
            first = [candidate.local_features[0] for candidate in mention.candidates]
            assert int(np.argmax(first)) == mention.gold_index
            assert first[mention.gold_index] >= 1.0


def test_future_informative_hides_the_first_half():
    train, _, _ = generate(_small(local_signal=1.0, future_informative=True))
    for doc in train.documents:
        for t, mention in enumerate(doc.mentions):
            gold_value = mention.candidates[mention.gold_index].local_features[0]
            if t < 2:
                assert gold_value < 1.0
            else:
                assert gold_value >= 1.0


def test_coherence_links_gold_entities():
    train, _, _ = generate(_small(coherence_strength=2.0, noise_pairs=0.0))
    store = train.pairwise
    for doc in train.documents:
        golds = [mention.gold.entity_id for mention in doc.mentions]
        for i, a in enumerate(golds):
            for b in golds[i + 1 :]:
                assert store.lookup(a, b).min() >= 1.5
    assert len(store) == (4 + 2 + 1) * 6


def test_no_coherence_and_no_noise_gives_empty_store():
    train, _, _ = generate(_small(coherence_strength=0.0, noise_pairs=0.0))
    assert len(train.pairwise) == 0


def test_write_synthetic_files(tmp_path):
    paths = write_synthetic(_small(), tmp_path / "synth")
    assert sorted(paths) == ["dev", "pairwise", "test", "train"]
    d_local, d_pair, extra = read_corpus_header(paths["train"])
    assert (d_local, d_pair) == (2, 2)
    assert extra["generator"] == {"prng": PRNG_NAME, "version": GENERATOR_VERSION, "seed": 7}
    assert extra["split"] == "train"
    loaded = load_dataset(paths["dev"], paths["pairwise"])
    assert loaded == generate(_small())[1]


def test_invalid_parameters_rejected():
    with pytest.raises(ValueError):
        _small(local_signal=1.5)
    with pytest.raises(ValueError):
        _small(T=0)
