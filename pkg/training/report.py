"""Training history records and their JSONL / DataFrame views."""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple

import pandas as pd

EPOCH_COLUMNS = ["epoch", "train_nll", "dev_accuracy", "point_count", "wall_time"]


@dataclass(frozen=True)
class EpochRecord:
    epoch: int
    train_nll: float
    dev_accuracy: Optional[float]
    point_count: int
    wall_time: float


@dataclass
class TrainReport:
    epochs: List[EpochRecord] = field(default_factory=list)
    best_epoch: int = 0
    best_dev_accuracy: Optional[float] = None

    @property
    def evaluated(self) -> List[EpochRecord]:
        return [record for record in self.epochs if record.dev_accuracy is not None]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame([asdict(record) for record in self.epochs], columns=EPOCH_COLUMNS)
        return frame.set_index("epoch", drop=False)

    def to_records(self) -> List[Dict[str, Any]]:
        return [{"record": "epoch", **asdict(record)} for record in self.epochs]

    def write_jsonl(self, path: Path | str, header: Optional[Mapping[str, Any]] = None) -> Path:
        target = Path(path)
        target.parent.mkdir(parents=True, exist_ok=True)
        head = {"record": "header", **dict(header or {})}
        head.setdefault("best_epoch", self.best_epoch)
        head.setdefault("best_dev_accuracy", self.best_dev_accuracy)
        with target.open("w", encoding="utf-8", newline="\n") as handle:
            handle.write(json.dumps(head, ensure_ascii=False) + "\n")
            for record in self.to_records():
                handle.write(json.dumps(record, ensure_ascii=False) + "\n")
        return target


def read_report(path: Path | str) -> Tuple[Dict[str, Any], pd.DataFrame]:
    """Return the header record and an epoch DataFrame from a report file."""

    source = Path(path)
    with source.open("r", encoding="utf-8") as handle:
        header = json.loads(handle.readline() or "{}")
    if header.get("record") != "header":
        raise ValueError(f"{source}: report has no header record")
    frame = pd.read_json(source, lines=True, dtype=False)
    epochs = frame[frame["record"] == "epoch"].reindex(columns=EPOCH_COLUMNS).reset_index(drop=True)
    return header, epochs


__all__ = ["EpochRecord", "TrainReport", "read_report"]
