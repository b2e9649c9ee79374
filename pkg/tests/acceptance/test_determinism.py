"""Identical runs produce identical model files, whatever the worker count."""
from __future__ import annotations

from boosting.ensemble import load_model, save_model
from config import Strategy, SynthConfig, TrainConfig
from synthetic import generate
from training.trainer import predict_dataset, train


def _corpus():
    return generate(
        SynthConfig(
            n_docs=16, n_dev=4, n_test=4, T=4, candidates_per_mention=3, local_signal=0.7, coherence_strength=1.0, seed=9
        )
    )


def test_model_files_are_byte_identical_across_workers(tmp_path):
    train_set, dev_set, _ = _corpus()
    files = []
    for run, workers in enumerate((1, 8, 1)):
        config = TrainConfig(max_epochs=3, eval_every=1, strategy=Strategy.BIBSG, beam_width=2, workers=workers, seed=4)
        ensemble, _ = train(train_set, dev_set, config)
        files.append(save_model(ensemble, tmp_path / f"run{run}.json", config.search).read_bytes())
    assert files[0] == files[1] == files[2]


def test_round_trip_preserves_predictions(tmp_path):
    train_set, dev_set, test_set = _corpus()
    config = TrainConfig(max_epochs=3, eval_every=1, strategy=Strategy.BSG, beam_width=2)
    ensemble, _ = train(train_set, dev_set, config)
    restored, search = load_model(save_model(ensemble, tmp_path / "model.json", config.search))
    assert search == config.search
    assert predict_dataset(restored, test_set, search) == predict_dataset(ensemble, test_set, config.search)
