"""Dependency container for the SGTB command services."""
from __future__ import annotations

import logging
from pathlib import Path
from typing import TYPE_CHECKING, Callable, Dict, Optional, Type, TypeVar

from data_loader import CorpusLoader
from utils.cache import InMemoryCache
from utils.logging import get_logger

from .configuration import AppSettings

if TYPE_CHECKING:  # pragma: no cover - type hinting only
    from corpus import Dataset
    from training.trainer import SGTBTrainer

T = TypeVar("T")


class ServiceContainer:
    """Simple service locator with lazy initialisation."""

    def __init__(self, settings: AppSettings) -> None:
        self.settings = settings
        self._instances: Dict[str, object] = {}
        self._logger = get_logger("sgtb", settings.log_level)

    def _get(self, key: str, factory: Callable[[], T]) -> T:
        if key not in self._instances:
            self._instances[key] = factory()
        return self._instances[key]  # type: ignore[return-value]

    def resolve(self, typ: Type[T], factory: Callable[[], T]) -> T:
        return self._get(typ.__name__, factory)

    # ------------------------------------------------------------------
    def corpus_loader(self) -> CorpusLoader:
        return self.resolve(CorpusLoader, lambda: CorpusLoader(InMemoryCache(max_entries=8)))

    def load_corpus(self, corpus_path: Path, pairwise_path: Optional[Path] = None) -> "Dataset":
        if not corpus_path.exists():
            raise FileNotFoundError(f"No such corpus file: {corpus_path}")
        return self.corpus_loader().load(corpus_path, pairwise_path)

    def trainer(self) -> "SGTBTrainer":
        from training.trainer import SGTBTrainer

        return self.resolve(SGTBTrainer, lambda: SGTBTrainer(self.settings.train, self._logger))

    def logger(self) -> logging.Logger:
        return self._logger


__all__ = ["ServiceContainer"]
