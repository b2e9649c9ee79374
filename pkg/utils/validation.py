"""Validation helpers for user provided input."""
from __future__ import annotations

from typing import Iterable

import numpy as np


def validate_identifier(value: object, kind: str = "identifier") -> str:
    """Validate an opaque string identifier (doc, mention or entity id)."""

    if not isinstance(value, str):
        raise TypeError(f"{kind} must be a string, got {type(value).__name__}")
    if not value or value != value.strip():
        raise ValueError(f"{kind} must be non-empty without surrounding whitespace: {value!r}")
    return value


def ensure_finite_vector(values: Iterable[float], length: int, where: str) -> np.ndarray:
    """Return ``values`` as a read-only float64 vector of exactly ``length`` finite entries."""

    try:
        array = np.asarray(list(values), dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise ValueError(f"{where}: feature vector is not numeric ({exc})") from exc
    if array.ndim != 1:
        raise ValueError(f"{where}: feature vector must be one-dimensional")
    if array.shape[0] != length:
        raise ValueError(f"{where}: expected {length} features, got {array.shape[0]}")
    if not np.all(np.isfinite(array)):
        raise ValueError(f"{where}: feature vector contains non-finite values")
    array.setflags(write=False)
    return array


__all__ = ["ensure_finite_vector", "validate_identifier"]
