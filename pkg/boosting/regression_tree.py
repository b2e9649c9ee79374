"""Least-squares regression trees fit to functional-gradient residuals."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

_LEAF = -1
# Gains below this fraction of the node SSE are rounding noise.
_RELATIVE_GAIN_TOL = 1e-12


class TreeFitError(ValueError):
    """Raised for invalid tree inputs or hyper-parameters."""


@dataclass(frozen=True)
class TrainingPoint:
    features: np.ndarray
    target: float


@dataclass(frozen=True, eq=False)
class RegressionTree:
    """Axis-aligned binary tree stored as parallel arrays in pre-order.

    ``feature[i] == -1`` marks a leaf; internal nodes route ``x[feature] <=
    threshold`` to ``left[i]`` and everything else to ``right[i]``.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_features: int

    @property
    def n_nodes(self) -> int:
        return int(self.feature.shape[0])

    @property
    def n_leaves(self) -> int:
        return int(np.count_nonzero(self.feature == _LEAF))

    @property
    def depth(self) -> int:
        depths = np.zeros(self.n_nodes, dtype=np.int64)
        for node in range(self.n_nodes):
            if self.feature[node] != _LEAF:
                depths[self.left[node]] = depths[node] + 1
                depths[self.right[node]] = depths[node] + 1
        return int(depths.max())

    def predict(self, features: np.ndarray) -> float:
        row = np.asarray(features, dtype=np.float64)
        if row.shape != (self.n_features,):
            raise ValueError(
                f"feature dimension mismatch: tree expects {self.n_features}, got {row.shape}"
            )
        node = 0
        while self.feature[node] != _LEAF:
            if row[self.feature[node]] <= self.threshold[node]:
                node = self.left[node]
            else:
                node = self.right[node]
        return float(self.value[node])

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by every row of ``X``."""

        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ValueError(
                f"feature dimension mismatch: tree expects {self.n_features}, got {X.shape}"
            )
        nodes = np.zeros(X.shape[0], dtype=np.int64)
        rows = np.arange(X.shape[0])
        active = self.feature[nodes] != _LEAF
        while active.any():
            current = nodes[active]
            go_left = X[rows[active], self.feature[current]] <= self.threshold[current]
            nodes[active] = np.where(go_left, self.left[current], self.right[current])
            active = self.feature[nodes] != _LEAF
        return nodes

    def predict_batch(self, X: np.ndarray) -> np.ndarray:
        return self.value[self.apply(X)]

    def to_dict(self) -> Dict[str, Any]:
        nodes: List[Dict[str, Any]] = []
        for node in range(self.n_nodes):
            if self.feature[node] == _LEAF:
                nodes.append({"leaf": float(self.value[node]).hex()})
            else:
                nodes.append({"split": [int(self.feature[node]), float(self.threshold[node]).hex()]})
        return {"n_features": self.n_features, "nodes": nodes}

    @classmethod
    def from_dict(cls, payload: Dict[str, Any]) -> "RegressionTree":
        n_features = int(payload["n_features"])
        records = payload["nodes"]
        builder = _TreeBuilder(n_features)
        # (parent, is_right) for the node that the next record will create
        pending: List[Tuple[int, bool]] = [(-1, False)]
        for record in records:
            if not pending:
                raise ValueError("tree record has trailing nodes")
            parent, is_right = pending.pop()
            if "leaf" in record:
                index = builder.add_leaf(_parse_float(record["leaf"]))
            else:
                feature, threshold = record["split"]
                if not 0 <= int(feature) < n_features:
                    raise ValueError(f"split feature {feature} out of range for {n_features} features")
                index = builder.add_split(int(feature), _parse_float(threshold))
                pending.append((index, True))
                pending.append((index, False))
            builder.attach(parent, is_right, index)
        if pending or not records:
            raise ValueError("tree record is incomplete")
        return builder.build()


def _parse_float(value: Any) -> float:
    if isinstance(value, str):
        return float.fromhex(value)
    return float(value)


class _TreeBuilder:
    def __init__(self, n_features: int) -> None:
        self.n_features = n_features
        self.feature: List[int] = []
        self.threshold: List[float] = []
        self.left: List[int] = []
        self.right: List[int] = []
        self.value: List[float] = []

    def _add(self, feature: int, threshold: float, value: float) -> int:
        self.feature.append(feature)
        self.threshold.append(threshold)
        self.left.append(_LEAF)
        self.right.append(_LEAF)
        self.value.append(value)
        return len(self.feature) - 1

    def add_leaf(self, value: float) -> int:
        return self._add(_LEAF, 0.0, value)

    def add_split(self, feature: int, threshold: float) -> int:
        return self._add(feature, threshold, 0.0)

    def attach(self, parent: int, is_right: bool, child: int) -> None:
        if parent < 0:
            return
        if is_right:
            self.right[parent] = child
        else:
            self.left[parent] = child

    def build(self) -> RegressionTree:
        arrays = (
            np.asarray(self.feature, dtype=np.int64),
            np.asarray(self.threshold, dtype=np.float64),
            np.asarray(self.left, dtype=np.int64),
            np.asarray(self.right, dtype=np.int64),
            np.asarray(self.value, dtype=np.float64),
        )
        for array in arrays:
            array.setflags(write=False)
        return RegressionTree(*arrays, n_features=self.n_features)


def _midpoint(lower: float, upper: float) -> float:
    mid = lower + (upper - lower) / 2.0
    if not lower <= mid < upper:
        return lower
    return mid


def _best_split(
    X: np.ndarray, y: np.ndarray, min_leaf: int
) -> Optional[Tuple[int, float, float]]:
    """Return ``(feature, threshold, gain)`` of the best SSE-reducing split."""

    n = y.shape[0]
    centered = y - y.mean()
    total = centered.sum()
    parent_term = total * total / n
    parent_sse = float(np.dot(centered, centered))
    n_left = np.arange(1, n, dtype=np.float64)
    n_right = n - n_left
    size_ok = (n_left >= min_leaf) & (n_right >= min_leaf)

    best: Optional[Tuple[int, float, float]] = None
    for feature in range(X.shape[1]):
        order = np.argsort(X[:, feature], kind="stable")
        xs = X[order, feature]
        sums = np.cumsum(centered[order])[:-1]
        valid = size_ok & (xs[:-1] < xs[1:])
        if not valid.any():
            continue
        gains = sums * sums / n_left + (total - sums) ** 2 / n_right - parent_term
        gains = np.where(valid, gains, -np.inf)
        split = int(np.argmax(gains))
        gain = float(gains[split])
        if best is None or gain > best[2]:
            best = (feature, _midpoint(float(xs[split]), float(xs[split + 1])), gain)
    if best is None or not best[2] > _RELATIVE_GAIN_TOL * parent_sse:
        return None
    return best


def fit_arrays(
    X: np.ndarray,
    y: np.ndarray,
    max_depth: Optional[int] = 3,
    min_leaf: int = 1,
) -> RegressionTree:
    """Greedy top-down least-squares tree on a feature matrix and target vector.

    ``max_depth=None`` grows until the other stopping rules apply.
    """

    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise TreeFitError("cannot fit a tree on an empty point list")
    if y.shape != (X.shape[0],):
        raise TreeFitError(f"target shape {y.shape} does not match {X.shape[0]} points")
    if max_depth is not None and max_depth < 1:
        raise TreeFitError(f"max_depth must be >= 1, got {max_depth}")
    if min_leaf < 1:
        raise TreeFitError(f"min_leaf must be >= 1, got {min_leaf}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise TreeFitError("features and targets must be finite")

    builder = _TreeBuilder(X.shape[1])
    # Pre-order: pop left before right.
    stack: List[Tuple[np.ndarray, int, int, bool]] = [(np.arange(X.shape[0]), 0, -1, False)]
    while stack:
        rows, depth, parent, is_right = stack.pop()
        targets = y[rows]
        split = None
        can_split = (
            (max_depth is None or depth < max_depth)
            and rows.shape[0] >= 2 * min_leaf
            and np.ptp(targets) > 0.0
        )
        if can_split:
            split = _best_split(X[rows], targets, min_leaf)
        if split is None:
            index = builder.add_leaf(float(targets.mean()))
            builder.attach(parent, is_right, index)
            continue
        feature, threshold, _ = split
        index = builder.add_split(feature, threshold)
        builder.attach(parent, is_right, index)
        goes_left = X[rows, feature] <= threshold
        stack.append((rows[~goes_left], depth + 1, index, True))
        stack.append((rows[goes_left], depth + 1, index, False))
    return builder.build()


def fit_tree(
    points: Sequence[TrainingPoint],
    max_depth: Optional[int] = 3,
    min_leaf: int = 1,
) -> RegressionTree:
    if not points:
        raise TreeFitError("cannot fit a tree on an empty point list")
    width = np.asarray(points[0].features).shape
    if any(np.asarray(point.features).shape != width for point in points):
        raise TreeFitError("all training points must share one feature dimension")
    X = np.stack([np.asarray(point.features, dtype=np.float64) for point in points])
    y = np.asarray([point.target for point in points], dtype=np.float64)
    return fit_arrays(X, y, max_depth=max_depth, min_leaf=min_leaf)


def predict_tree(tree: RegressionTree, features: np.ndarray) -> float:
    return tree.predict(features)


def constant_tree(value: float, n_features: int) -> RegressionTree:
    builder = _TreeBuilder(n_features)
    builder.add_leaf(float(value))
    return builder.build()


def stump(feature: int, threshold: float, left: float, right: float, n_features: int) -> RegressionTree:
    """Depth-one tree; handy for hand-built models."""

    builder = _TreeBuilder(n_features)
    root = builder.add_split(feature, threshold)
    builder.attach(root, False, builder.add_leaf(left))
    builder.attach(root, True, builder.add_leaf(right))
    return builder.build()


__all__ = [
    "RegressionTree",
    "TrainingPoint",
    "TreeFitError",
    "constant_tree",
    "fit_arrays",
    "fit_tree",
    "predict_tree",
    "stump",
]
