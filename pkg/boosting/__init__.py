"""Regression trees and the additive ensemble built from them."""
from __future__ import annotations

from .ensemble import (
    BoostedEnsemble,
    DimensionMismatchError,
    add_stage,
    factor_score,
    load_model,
    save_model,
)
from .regression_tree import (
    RegressionTree,
    TrainingPoint,
    TreeFitError,
    constant_tree,
    fit_arrays,
    fit_tree,
    predict_tree,
    stump,
)

__all__ = [
    "BoostedEnsemble",
    "DimensionMismatchError",
    "RegressionTree",
    "TrainingPoint",
    "TreeFitError",
    "add_stage",
    "constant_tree",
    "factor_score",
    "fit_arrays",
    "fit_tree",
    "load_model",
    "predict_tree",
    "save_model",
    "stump",
]
