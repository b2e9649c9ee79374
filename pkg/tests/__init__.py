"""Top-level test package index."""

__all__ = [
    "acceptance",
    "boosting",
    "e2e",
    "features",
    "inference",
    "training",
]
