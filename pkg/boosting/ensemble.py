"""Additive tree ensemble realising the factor scoring function."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np

from config import DEFAULT_ETA, FORMAT_VERSION, SearchConfig
from corpus import Dataset, Document, PairwiseFeatureStore
from features.aggregation import joint_dim, joint_features

from .regression_tree import RegressionTree

logger = logging.getLogger(__name__)

Stage = Tuple[RegressionTree, float]


class DimensionMismatchError(ValueError):
    """Raised when trees, corpora or model files disagree on feature dimensions."""


@dataclass(frozen=True)
class _PackedForest:
    roots: np.ndarray
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    etas: np.ndarray


@dataclass(frozen=True, eq=False)
class BoostedEnsemble:
    """``F(x) = sum_m eta_m * h_m(x)``; an empty ensemble scores everything 0."""

    d_local: int
    d_pair: int
    stages: Tuple[Stage, ...] = ()

    @classmethod
    def empty(cls, d_local: int, d_pair: int) -> "BoostedEnsemble":
        return cls(d_local, d_pair, ())

    @classmethod
    def for_dataset(cls, dataset: Dataset) -> "BoostedEnsemble":
        return cls.empty(dataset.d_local, dataset.d_pair)

    @property
    def dim(self) -> int:
        return joint_dim(self.d_local, self.d_pair)

    @property
    def n_stages(self) -> int:
        return len(self.stages)

    @property
    def etas(self) -> Tuple[float, ...]:
        return tuple(eta for _, eta in self.stages)

    def __len__(self) -> int:
        return len(self.stages)

    def add_stage(self, tree: RegressionTree, eta: float = DEFAULT_ETA) -> "BoostedEnsemble":
        if tree.n_features != self.dim:
            raise DimensionMismatchError(
                f"tree has {tree.n_features} features, ensemble expects {self.dim}"
            )
        if not eta > 0:
            raise ValueError(f"eta must be > 0, got {eta}")
        return BoostedEnsemble(self.d_local, self.d_pair, self.stages + ((tree, float(eta)),))

    def truncate(self, n_stages: int) -> "BoostedEnsemble":
        if not 0 <= n_stages <= self.n_stages:
            raise ValueError(f"cannot truncate {self.n_stages} stages to {n_stages}")
        return BoostedEnsemble(self.d_local, self.d_pair, self.stages[:n_stages])

    def check_dataset(self, dataset: Dataset) -> None:
        if dataset.dims != (self.d_local, self.d_pair):
            raise DimensionMismatchError(
                f"model dims (d_local={self.d_local}, d_pair={self.d_pair}) do not match "
                f"corpus dims (d_local={dataset.d_local}, d_pair={dataset.d_pair})"
            )

    @cached_property
    def _packed(self) -> _PackedForest:
        roots, features, thresholds, lefts, rights, values = [], [], [], [], [], []
        offset = 0
        for tree, _ in self.stages:
            roots.append(offset)
            internal = tree.feature >= 0
            features.append(tree.feature)
            thresholds.append(tree.threshold)
            lefts.append(np.where(internal, tree.left + offset, -1))
            rights.append(np.where(internal, tree.right + offset, -1))
            values.append(tree.value)
            offset += tree.n_nodes

        def _cat(parts: Sequence[np.ndarray], dtype: type) -> np.ndarray:
            return np.concatenate(parts).astype(dtype) if parts else np.zeros(0, dtype=dtype)

        return _PackedForest(
            roots=np.asarray(roots, dtype=np.int64),
            feature=_cat(features, np.int64),
            threshold=_cat(thresholds, np.float64),
            left=_cat(lefts, np.int64),
            right=_cat(rights, np.int64),
            value=_cat(values, np.float64),
            etas=np.asarray(self.etas, dtype=np.float64),
        )

    def stage_contributions(self, X: np.ndarray) -> np.ndarray:
        """``eta_m * h_m(x)`` for every row (axis 0) and stage (axis 1)."""

        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X[None, :]
        if X.shape[1] != self.dim:
            raise DimensionMismatchError(f"expected {self.dim} features, got {X.shape[1]}")
        packed = self._packed
        n_rows = X.shape[0]
        if not self.stages:
            return np.zeros((n_rows, 0), dtype=np.float64)
        nodes = np.broadcast_to(packed.roots, (n_rows, self.n_stages)).copy()
        rows = np.broadcast_to(np.arange(n_rows)[:, None], nodes.shape)
        active = packed.feature[nodes] >= 0
        while active.any():
            current = nodes[active]
            go_left = X[rows[active], packed.feature[current]] <= packed.threshold[current]
            nodes[active] = np.where(go_left, packed.left[current], packed.right[current])
            active = packed.feature[nodes] >= 0
        return packed.value[nodes] * packed.etas[None, :]

    def predict(self, X: np.ndarray) -> np.ndarray:
        """Ensemble score of every row of ``X``.

        Stage terms are accumulated left to right, so the score of ``m``
        stages equals the score of ``m - 1`` stages plus the last term exactly.
        """

        contributions = self.stage_contributions(X)
        if contributions.shape[1] == 0:
            return np.zeros(contributions.shape[0], dtype=np.float64)
        return np.cumsum(contributions, axis=1)[:, -1]

    def score(self, features: np.ndarray) -> float:
        return float(self.predict(np.asarray(features, dtype=np.float64)[None, :])[0])

    # ------------------------------------------------------------------
    def to_dict(self, search: Optional[SearchConfig] = None) -> Dict[str, Any]:
        return {
            "format_version": FORMAT_VERSION,
            "header": {
                "d_local": self.d_local,
                "d_pair": self.d_pair,
                "n_stages": self.n_stages,
                "etas": list(self.etas),
                "search": search.to_dict() if search is not None else None,
            },
            "stages": [{"eta": eta, "tree": tree.to_dict()} for tree, eta in self.stages],
        }

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> Tuple["BoostedEnsemble", Optional[SearchConfig]]:
        if payload.get("format_version") != FORMAT_VERSION:
            raise ValueError(f"unsupported model format_version {payload.get('format_version')!r}")
        header = payload["header"]
        ensemble = cls.empty(int(header["d_local"]), int(header["d_pair"]))
        for record in payload["stages"]:
            tree = RegressionTree.from_dict(record["tree"])
            ensemble = ensemble.add_stage(tree, float(record["eta"]))
        if ensemble.n_stages != int(header["n_stages"]):
            raise ValueError(
                f"model header declares {header['n_stages']} stages, file holds {ensemble.n_stages}"
            )
        search_payload = header.get("search")
        search = SearchConfig.from_dict(search_payload) if search_payload else None
        return ensemble, search


def factor_score(
    ens: BoostedEnsemble,
    doc: Document,
    t: int,
    candidate_index: int,
    decided: Sequence[str],
    store: PairwiseFeatureStore,
) -> float:
    """F(x, y_t = candidate, decided) for one candidate."""

    return ens.score(joint_features(doc, t, candidate_index, decided, store))


def add_stage(ens: BoostedEnsemble, tree: RegressionTree, eta: float = DEFAULT_ETA) -> BoostedEnsemble:
    return ens.add_stage(tree, eta)


def save_model(
    ens: BoostedEnsemble, path: Path | str, search: Optional[SearchConfig] = None
) -> Path:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    text = json.dumps(ens.to_dict(search), ensure_ascii=False, separators=(",", ":"))
    target.write_text(text + "\n", encoding="utf-8")
    logger.info("模型已保存: %s (%d 棵树)", target, ens.n_stages)
    return target


def load_model(path: Path | str) -> Tuple[BoostedEnsemble, Optional[SearchConfig]]:
    source = Path(path)
    if not source.exists():
        raise FileNotFoundError(f"No such model file: {source}")
    try:
        payload = json.loads(source.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ValueError(f"{source}: invalid model JSON ({exc.msg})") from exc
    try:
        return BoostedEnsemble.from_dict(payload)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"{source}: malformed model file ({exc})") from exc


__all__ = [
    "BoostedEnsemble",
    "DimensionMismatchError",
    "add_stage",
    "factor_score",
    "load_model",
    "save_model",
]
