"""End-to-end smoke tests for the ``sgtb`` command line."""
from __future__ import annotations

import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from boosting.ensemble import BoostedEnsemble, save_model
from data_loader import dump_dataset
from main import main

REPO_ROOT = Path(__file__).resolve().parents[2]


def _sgtb(*argv: str) -> subprocess.CompletedProcess:
    env = {key: value for key, value in os.environ.items() if not key.startswith("SGTB_")}
    return subprocess.run(
        [sys.executable, "-m", "main", *argv],
        cwd=REPO_ROOT,
        env=env,
        stdout=subprocess.PIPE,
        stderr=subprocess.PIPE,
        text=True,
        check=False,
    )


@pytest.mark.slow
def test_cli_runs_full_workflow(tmp_path: Path) -> None:
    corpus = tmp_path / "corpus"
    generated = _sgtb(
        "gen", "--out-dir", str(corpus), "--n-docs", "20", "--n-dev", "5", "--n-test", "5",
        "--mentions", "4", "--candidates", "3", "--coherence", "1.0", "--seed", "3",
    )
    assert generated.returncode == 0, generated.stderr
    assert f"train: {corpus / 'train.jsonl'}" in generated.stdout

    model = tmp_path / "model.json"
    report = tmp_path / "report.jsonl"
    trained = _sgtb(
        "train", "--train", str(corpus / "train.jsonl"), "--dev", str(corpus / "dev.jsonl"),
        "--pairwise", str(corpus / "pairwise.jsonl"), "--strategy", "bibsg", "--beam", "2",
        "--epochs", "6", "--eval-every", "2", "--model-out", str(model), "--report-out", str(report),
    )
    assert trained.returncode == 0, trained.stderr
    assert trained.stdout.splitlines() == [f"model: {model}", f"report: {report}"]
    header = json.loads(report.read_text(encoding="utf-8").splitlines()[0])
    assert header["record"] == "header"
    assert header["strategy"] == "bibsg"

    predictions = tmp_path / "pred.jsonl"
    predicted = _sgtb(
        "predict", "--model", str(model), "--input", str(corpus / "test.jsonl"),
        "--pairwise", str(corpus / "pairwise.jsonl"), "--output", str(predictions),
    )
    assert predicted.returncode == 0, predicted.stderr
    records = [json.loads(line) for line in predictions.read_text(encoding="utf-8").splitlines()]
    assert len(records) == 5 * 4
    assert [r["doc_id"] for r in records[:4]] == ["test-00000"] * 4

    evaluated = _sgtb("eval", "--predictions", str(predictions))
    assert evaluated.returncode == 0, evaluated.stderr
    summary = json.loads(evaluated.stdout)
    correct = sum(1 for r in records if r["correct"])
    assert summary == {"accuracy": correct / 20, "n_mentions": 20, "n_correct": correct}

    dev_predictions = tmp_path / "dev_pred.jsonl"
    assert _sgtb(
        "predict", "--model", str(model), "--input", str(corpus / "dev.jsonl"),
        "--pairwise", str(corpus / "pairwise.jsonl"), "--output", str(dev_predictions),
    ).returncode == 0
    dev_summary = json.loads(_sgtb("eval", "--predictions", str(dev_predictions)).stdout)
    assert dev_summary["accuracy"] == header["best_dev_accuracy"]


def test_usage_error_exits_one(capsys) -> None:
    assert main(["train", "--train", "x.jsonl"]) == 1
    assert "error:" in capsys.readouterr().err


def test_missing_prediction_file_exits_one(tmp_path: Path, capsys) -> None:
    assert main(["eval", "--predictions", str(tmp_path / "missing.jsonl")]) == 1
    assert "No such prediction file" in capsys.readouterr().err


def test_dimension_mismatch_exits_one(tmp_path: Path, tiny_dataset, capsys) -> None:
    corpus = tmp_path / "c.jsonl"
    dump_dataset(tiny_dataset, corpus)
    model = save_model(BoostedEnsemble.empty(3, 2), tmp_path / "m.json")
    code = main(["predict", "--model", str(model), "--input", str(corpus), "--output", str(tmp_path / "p.jsonl")])
    assert code == 1
    assert "error:" in capsys.readouterr().err


def test_invalid_beam_exits_one(tmp_path: Path, capsys) -> None:
    code = main(["train", "--train", "a", "--dev", "b", "--beam", "0"])
    assert code == 1
    assert "search.beam_width" in capsys.readouterr().err
