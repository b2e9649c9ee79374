"""Shared helpers: logging setup, input validation, caching and accuracy metrics."""

__all__ = []
