"""Accuracy bookkeeping for disambiguation predictions."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterable, Sequence, Tuple

import numpy as np
import pandas as pd


@dataclass(frozen=True)
class AccuracySummary:
    n_mentions: int
    n_correct: int

    @property
    def accuracy(self) -> float:
        if self.n_mentions == 0:
            raise ValueError("accuracy is undefined for zero mentions")
        return self.n_correct / self.n_mentions

    def to_dict(self) -> Dict[str, float | int]:
        return {"accuracy": self.accuracy, "n_mentions": self.n_mentions, "n_correct": self.n_correct}


def tally(pairs: Iterable[Tuple[Sequence[int], Sequence[int]]]) -> AccuracySummary:
    """Micro accuracy over (predicted, gold) assignment pairs, one pair per document."""

    n_mentions = 0
    n_correct = 0
    for predicted, gold in pairs:
        predicted_arr = np.asarray(predicted)
        gold_arr = np.asarray(gold)
        if predicted_arr.shape != gold_arr.shape:
            raise ValueError(f"prediction length {predicted_arr.shape} differs from gold {gold_arr.shape}")
        n_mentions += int(gold_arr.size)
        n_correct += int(np.count_nonzero(predicted_arr == gold_arr))
    return AccuracySummary(n_mentions, n_correct)


def summarize_predictions(frame: pd.DataFrame) -> AccuracySummary:
    """Accuracy of a prediction table with ``predicted`` and ``gold`` columns."""

    if frame.empty:
        raise ValueError("empty prediction file")
    if "gold" not in frame.columns or frame["gold"].isna().any():
        raise ValueError("prediction file is missing gold entities")
    if "predicted" not in frame.columns:
        raise ValueError("prediction file has no 'predicted' column")
    correct = frame["predicted"].astype(str) == frame["gold"].astype(str)
    return AccuracySummary(int(len(frame)), int(correct.sum()))


__all__ = ["AccuracySummary", "summarize_predictions", "tally"]
