"""Boosting loop, parallel gradient collection and training reports."""
from __future__ import annotations

from .parallel_collector import DocumentGradients, ParallelGradientCollector
from .report import EpochRecord, TrainReport, read_report
from .trainer import SGTBTrainer, accuracy_summary, evaluate, predict_dataset, train

__all__ = [
    "DocumentGradients",
    "EpochRecord",
    "ParallelGradientCollector",
    "SGTBTrainer",
    "TrainReport",
    "accuracy_summary",
    "evaluate",
    "predict_dataset",
    "read_report",
    "train",
]
