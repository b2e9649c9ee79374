"""Per-document gradient collection across a process pool."""
from __future__ import annotations

import logging
import os
from concurrent.futures import Executor, ProcessPoolExecutor, as_completed
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np
import psutil

from boosting.ensemble import BoostedEnsemble
from config import SearchConfig
from corpus import Dataset
from features.document_view import DocumentFeatureView
from inference.beam_search import collect_gradients

_logger = logging.getLogger(__name__)

# Set in each worker process by the pool initializer.
_WORKER_STATE: Dict[str, object] = {}


@dataclass(frozen=True)
class DocumentGradients:
    """Gradient points of one document packed as arrays."""

    doc_index: int
    features: np.ndarray
    residuals: np.ndarray
    beam_nll: float

    @property
    def n_points(self) -> int:
        return int(self.residuals.shape[0])


def _current_memory_mb() -> float:
    return psutil.Process(os.getpid()).memory_info().rss / (1024 * 1024)


def collect_document(
    ens: BoostedEnsemble, dataset: Dataset, search: SearchConfig, doc_index: int
) -> DocumentGradients:
    doc = dataset.documents[doc_index]
    view = DocumentFeatureView(doc, dataset.pairwise)
    result = collect_gradients(ens, doc, dataset.pairwise, search, view)
    if result.points:
        features = np.stack([point.features for point in result.points])
    else:
        features = np.zeros((0, ens.dim), dtype=np.float64)
    residuals = np.asarray([point.residual for point in result.points], dtype=np.float64)
    return DocumentGradients(doc_index, features, residuals, float(result.beam_nll))


def _init_worker(dataset: Dataset, search: SearchConfig) -> None:
    _WORKER_STATE["dataset"] = dataset
    _WORKER_STATE["search"] = search


def _worker_chunk(ens: BoostedEnsemble, doc_indices: Sequence[int]) -> List[DocumentGradients]:
    dataset = _WORKER_STATE["dataset"]
    search = _WORKER_STATE["search"]
    return [collect_document(ens, dataset, search, int(i)) for i in doc_indices]  # type: ignore[arg-type]


class ParallelGradientCollector:
    """Collect gradient points for chunks of documents in a :class:`ProcessPoolExecutor`.

    Results are returned in the order of the requested document indices, so
    the merged point set does not depend on worker scheduling. Use as a
    context manager to keep one pool alive across epochs.
    """

    def __init__(
        self,
        dataset: Dataset,
        search: SearchConfig,
        workers: int = 1,
        memory_limit_mb: Optional[int] = None,
        logger: Optional[logging.Logger] = None,
    ) -> None:
        if workers < 1:
            raise ValueError(f"workers must be >= 1, got {workers}")
        self.dataset = dataset
        self.search = search
        self.workers = workers
        self.memory_limit_mb = memory_limit_mb
        self.logger = logger or _logger
        self._executor: Optional[Executor] = None
        self._process_pool_supported = workers > 1
        self._progress_logged = 0

    # ------------------------------------------------------------------
    def __enter__(self) -> "ParallelGradientCollector":
        return self

    def __exit__(self, *exc_info: object) -> None:
        self.close()

    def close(self) -> None:
        if self._executor is not None:
            self._executor.shutdown(wait=True)
            self._executor = None

    @property
    def process_pool_available(self) -> bool:
        return self._process_pool_supported

    def _ensure_executor(self) -> Executor:
        if self._executor is None:
            self._executor = ProcessPoolExecutor(
                max_workers=self.workers,
                initializer=_init_worker,
                initargs=(self.dataset, self.search),
            )
        return self._executor

    def _log_progress(self, completed: int, total: int) -> None:
        if total <= 0 or completed == self._progress_logged:
            return
        self._progress_logged = completed
        self.logger.debug("梯度收集进度 %s/%s (%.1f%%)", completed, total, completed / total * 100)

    def _check_memory(self) -> None:
        if not self.memory_limit_mb:
            return
        usage = _current_memory_mb()
        if usage > self.memory_limit_mb:
            self.logger.warning("内存使用 %.1fMB 超过限制 %.1fMB", usage, float(self.memory_limit_mb))

    def _compute_locally(self, ens: BoostedEnsemble, doc_indices: Sequence[int]) -> List[DocumentGradients]:
        return [collect_document(ens, self.dataset, self.search, int(i)) for i in doc_indices]

    # ------------------------------------------------------------------
    def collect(self, ens: BoostedEnsemble, chunks: Sequence[Sequence[int]]) -> List[DocumentGradients]:
        """Gradients for every document in ``chunks``, flattened in chunk order."""

        self._progress_logged = 0
        order = [int(i) for chunk in chunks for i in chunk]
        if not self._process_pool_supported:
            return self._execute_sequential(ens, chunks, order)

        results: Dict[int, DocumentGradients] = {}
        total = len(chunks)
        completed = 0
        try:
            executor = self._ensure_executor()
            future_map = {
                executor.submit(_worker_chunk, ens, list(chunk)): list(chunk) for chunk in chunks if len(chunk)
            }
            for future in as_completed(future_map):
                chunk = future_map[future]
                try:
                    chunk_results = future.result()
                except (NotImplementedError, PermissionError, OSError):
                    raise
                except Exception as exc:
                    self.logger.error("并行任务失败 (%d 篇文档): %s", len(chunk), exc)
                    chunk_results = self._compute_locally(ens, chunk)
                for item in chunk_results:
                    results[item.doc_index] = item
                completed += 1
                self._log_progress(completed, total)
                self._check_memory()
        except (NotImplementedError, PermissionError, OSError) as exc:
            self._process_pool_supported = False
            self.close()
            self.logger.warning("进程池不可用，回退到单进程执行: %s", exc)
            return self._execute_sequential(ens, chunks, order)
        return [results[i] for i in order]

    def _execute_sequential(
        self, ens: BoostedEnsemble, chunks: Sequence[Sequence[int]], order: List[int]
    ) -> List[DocumentGradients]:
        results: Dict[int, DocumentGradients] = {}
        total = len(chunks)
        for completed, chunk in enumerate(chunks, start=1):
            for item in self._compute_locally(ens, chunk):
                results[item.doc_index] = item
            self._log_progress(completed, total)
        self._check_memory()
        return [results[i] for i in order]


__all__ = ["DocumentGradients", "ParallelGradientCollector", "collect_document"]
