"""Application services behind the ``sgtb`` commands."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, Iterator, List, Optional, Tuple

import pandas as pd

from boosting.ensemble import BoostedEnsemble, load_model, save_model
from config import SearchConfig
from corpus import Dataset, Document
from features.document_view import DocumentFeatureView
from inference.beam_search import decode
from inference.crf_objective import exact_enumerate
from synthetic import write_synthetic
from training.report import TrainReport
from utils.metrics import AccuracySummary, summarize_predictions, tally

from .configuration import AppSettings
from .container import ServiceContainer

DEFAULT_MODEL_PATH = Path("model.json")
DEFAULT_REPORT_PATH = Path("train_report.jsonl")


@dataclass(frozen=True)
class PredictionRecord:
    doc_id: str
    mention_id: str
    predicted: str
    gold: str
    correct: bool


@dataclass
class TrainOutcome:
    model_path: Path
    report_path: Path
    report: TrainReport


@dataclass
class PredictOutcome:
    output_path: Path
    summary: AccuracySummary
    search: SearchConfig


def prediction_records(doc: Document, assignment: Tuple[int, ...]) -> Iterator[PredictionRecord]:
    for mention, index in zip(doc.mentions, assignment):
        predicted = mention.candidates[index].entity_id
        gold = mention.gold.entity_id
        yield PredictionRecord(doc.doc_id, mention.mention_id, predicted, gold, predicted == gold)


def _require(path: Optional[Path], flag: str) -> Path:
    if path is None:
        raise ValueError(f"missing required option {flag}")
    return path


class SGTBWorkflow:
    """Run one command end to end: load inputs, do the work, write outputs."""

    def __init__(self, settings: AppSettings, container: ServiceContainer) -> None:
        self.settings = settings
        self.container = container
        self.logger = container.logger()

    # ------------------------------------------------------------------
    def generate(self) -> Dict[str, Path]:
        out_dir = _require(self.settings.path("out_dir"), "--out-dir")
        paths = write_synthetic(self.settings.synth, out_dir)
        self.logger.info("合成语料已写入 %s", out_dir)
        return paths

    # ------------------------------------------------------------------
    def train(self) -> TrainOutcome:
        settings = self.settings
        train_path = _require(settings.path("train"), "--train")
        dev_path = _require(settings.path("dev"), "--dev")
        pairwise_path = settings.path("pairwise")
        train_set = self.container.load_corpus(train_path, pairwise_path)
        dev_set = self.container.load_corpus(dev_path, pairwise_path)

        ensemble, report = self.container.trainer().train(train_set, dev_set)

        model_path = settings.path("model_out") or DEFAULT_MODEL_PATH
        report_path = settings.path("report_out") or DEFAULT_REPORT_PATH
        save_model(ensemble, model_path, settings.search)
        header = {
            "strategy": settings.search.strategy.value,
            "config": settings.train.to_dict(),
            "train": str(train_path),
            "dev": str(dev_path),
            "pairwise": str(pairwise_path) if pairwise_path else None,
            "n_stages": ensemble.n_stages,
        }
        report.write_jsonl(report_path, header)
        self.logger.info(
            "训练完成: 最佳轮次 %d, 验证准确率 %s, 报告 %s",
            report.best_epoch,
            "n/a" if report.best_dev_accuracy is None else f"{report.best_dev_accuracy:.4f}",
            report_path,
        )
        return TrainOutcome(model_path, report_path, report)

    # ------------------------------------------------------------------
    def _decode_all(
        self, ensemble: BoostedEnsemble, dataset: Dataset, search: SearchConfig
    ) -> List[Tuple[int, ...]]:
        ensemble.check_dataset(dataset)
        assignments = []
        for doc in dataset.documents:
            view = DocumentFeatureView(doc, dataset.pairwise)
            if self.settings.exact_decode:
                result = exact_enumerate(
                    ensemble, doc, dataset.pairwise, self.settings.exact_max_sequences, view=view
                )
                assignments.append(result.argmax)
            else:
                assignments.append(decode(ensemble, doc, dataset.pairwise, search, view))
        return assignments

    def predict(self) -> PredictOutcome:
        settings = self.settings
        model_path = _require(settings.path("model"), "--model")
        input_path = _require(settings.path("input"), "--input")
        output_path = _require(settings.path("output"), "--output")
        ensemble, model_search = load_model(model_path)
        search = settings.search_for_model(model_search)
        dataset = self.container.load_corpus(input_path, settings.path("pairwise"))

        assignments = self._decode_all(ensemble, dataset, search)
        output_path.parent.mkdir(parents=True, exist_ok=True)
        with output_path.open("w", encoding="utf-8", newline="\n") as handle:
            for doc, assignment in zip(dataset.documents, assignments):
                for record in prediction_records(doc, assignment):
                    handle.write(json.dumps(asdict(record), ensure_ascii=False) + "\n")
        summary = tally(zip(assignments, (doc.gold_sequence for doc in dataset.documents)))
        self.logger.info(
            "预测完成: %d 篇文档, %d 个指称, 策略=%s, 束宽=%d%s",
            len(dataset),
            summary.n_mentions,
            search.strategy.value,
            search.beam_width,
            " (精确枚举)" if settings.exact_decode else "",
        )
        return PredictOutcome(output_path, summary, search)

    # ------------------------------------------------------------------
    def evaluate(self) -> AccuracySummary:
        predictions_path = _require(self.settings.path("predictions"), "--predictions")
        if not predictions_path.exists():
            raise FileNotFoundError(f"No such prediction file: {predictions_path}")
        text = predictions_path.read_text(encoding="utf-8")
        if not text.strip():
            raise ValueError("empty prediction file")
        frame = pd.read_json(predictions_path, lines=True, dtype=False)
        summary = summarize_predictions(frame)
        self.logger.info("评估完成: %d / %d 正确", summary.n_correct, summary.n_mentions)
        return summary


__all__ = [
    "DEFAULT_MODEL_PATH",
    "DEFAULT_REPORT_PATH",
    "PredictOutcome",
    "PredictionRecord",
    "SGTBWorkflow",
    "TrainOutcome",
    "prediction_records",
]
