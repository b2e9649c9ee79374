"""Outer boosting loop: one regression tree per epoch on pooled gradient points."""
from __future__ import annotations

import logging
import time
from typing import List, Optional, Tuple

import numpy as np

from boosting.ensemble import BoostedEnsemble, DimensionMismatchError
from boosting.regression_tree import fit_arrays
from config import SearchConfig, TrainConfig
from corpus import Dataset
from features.document_view import DocumentFeatureView
from inference.beam_search import decode
from utils.metrics import AccuracySummary, tally

from .parallel_collector import ParallelGradientCollector
from .report import EpochRecord, TrainReport

_logger = logging.getLogger(__name__)


def predict_dataset(ens: BoostedEnsemble, data: Dataset, search: SearchConfig) -> List[Tuple[int, ...]]:
    """Decoded assignment of every document, in corpus order."""

    ens.check_dataset(data)
    return [
        decode(ens, doc, data.pairwise, search, DocumentFeatureView(doc, data.pairwise))
        for doc in data.documents
    ]


def accuracy_summary(ens: BoostedEnsemble, data: Dataset, search: SearchConfig) -> AccuracySummary:
    predictions = predict_dataset(ens, data, search)
    return tally(zip(predictions, (doc.gold_sequence for doc in data.documents)))


def evaluate(ens: BoostedEnsemble, data: Dataset, search: SearchConfig) -> float:
    """Micro accuracy over all mentions of ``data``."""

    return accuracy_summary(ens, data, search).accuracy


def epoch_chunks(n_docs: int, seed: int, epoch: int, workers: int) -> List[np.ndarray]:
    """Shuffled document indices for ``epoch`` split into ``workers`` chunks."""

    rng = np.random.default_rng((seed, epoch))
    order = rng.permutation(n_docs)
    return [chunk for chunk in np.array_split(order, workers)]


class SGTBTrainer:
    """Structured gradient tree boosting with dev-set early stopping."""

    def __init__(self, config: Optional[TrainConfig] = None, logger: Optional[logging.Logger] = None) -> None:
        self.config = config or TrainConfig()
        self.logger = logger or _logger

    def _check_inputs(self, train: Dataset, dev: Dataset) -> None:
        if len(train) == 0:
            raise ValueError("training set is empty")
        if len(dev) == 0:
            raise ValueError("development set is empty")
        if train.dims != dev.dims:
            raise DimensionMismatchError(
                f"train dims {train.dims} differ from dev dims {dev.dims}"
            )

    def train(self, train: Dataset, dev: Dataset) -> Tuple[BoostedEnsemble, TrainReport]:
        self._check_inputs(train, dev)
        config = self.config
        search = config.search
        ensemble = BoostedEnsemble.for_dataset(train)
        report = TrainReport()
        if config.max_epochs == 0:
            self.logger.info("max_epochs=0, 返回空模型")
            return ensemble, report

        best_accuracy: Optional[float] = None
        best_epoch = 0
        stale_evaluations = 0
        self.logger.info(
            "开始训练: 策略=%s, 束宽=%d, 文档=%d, 最大轮数=%d, 进程数=%d",
            search.strategy.value,
            search.beam_width,
            len(train),
            config.max_epochs,
            config.workers,
        )
        with ParallelGradientCollector(
            train,
            search,
            workers=config.workers,
            memory_limit_mb=config.memory_limit_mb,
            logger=self.logger,
        ) as collector:
            for epoch in range(1, config.max_epochs + 1):
                started = time.perf_counter()
                chunks = epoch_chunks(len(train), config.seed, epoch, config.workers)
                gradients = collector.collect(ensemble, chunks)
                features = np.concatenate([item.features for item in gradients], axis=0)
                residuals = np.concatenate([item.residuals for item in gradients])
                train_nll = float(np.mean([item.beam_nll for item in gradients]))

                tree = fit_arrays(features, residuals, max_depth=config.max_depth, min_leaf=config.min_leaf)
                ensemble = ensemble.add_stage(tree, config.eta)

                dev_accuracy: Optional[float] = None
                if epoch % config.eval_every == 0 or epoch == config.max_epochs:
                    dev_accuracy = evaluate(ensemble, dev, search)
                    if best_accuracy is None or dev_accuracy > best_accuracy:
                        best_accuracy = dev_accuracy
                        best_epoch = epoch
                        stale_evaluations = 0
                    else:
                        stale_evaluations += 1
                    self.logger.info(
                        "第 %d 轮验证准确率 %.4f (最佳 %.4f @ 第 %d 轮)",
                        epoch,
                        dev_accuracy,
                        best_accuracy,
                        best_epoch,
                    )

                wall_time = time.perf_counter() - started
                report.epochs.append(
                    EpochRecord(epoch, train_nll, dev_accuracy, int(residuals.shape[0]), wall_time)
                )
                self.logger.info(
                    "第 %d 轮: 梯度点=%d, 训练NLL=%.6f, 树叶=%d, 用时=%.2fs",
                    epoch,
                    residuals.shape[0],
                    train_nll,
                    tree.n_leaves,
                    wall_time,
                )
                if config.patience is not None and stale_evaluations >= config.patience:
                    self.logger.info("连续 %d 次验证无提升, 提前停止", stale_evaluations)
                    break

        report.best_epoch = best_epoch
        report.best_dev_accuracy = best_accuracy
        return ensemble.truncate(best_epoch), report


def train(
    train_set: Dataset,
    dev_set: Dataset,
    config: Optional[TrainConfig] = None,
    logger: Optional[logging.Logger] = None,
) -> Tuple[BoostedEnsemble, TrainReport]:
    return SGTBTrainer(config, logger).train(train_set, dev_set)


__all__ = [
    "SGTBTrainer",
    "accuracy_summary",
    "epoch_chunks",
    "evaluate",
    "predict_dataset",
    "train",
]
