"""Keyed in-process caches with hit/miss accounting."""
from __future__ import annotations

import threading
import time
from dataclasses import dataclass
from typing import Any, Callable, Dict, Hashable, Optional, Protocol, TypeVar

T = TypeVar("T")


@dataclass
class CacheStats:
    hits: int = 0
    misses: int = 0

    @property
    def hit_rate(self) -> float:
        total = self.hits + self.misses
        return self.hits / total if total else 0.0


class CacheBackend(Protocol):
    """Protocol implemented by cache backends."""

    stats: CacheStats

    def get(self, key: Hashable) -> Any | None:
        ...

    def set(self, key: Hashable, value: Any, ttl: Optional[float] = None) -> None:
        ...

    def get_or_compute(self, key: Hashable, factory: Callable[[], T], ttl: Optional[float] = None) -> T:
        ...

    def clear(self) -> None:
        ...


@dataclass
class _CacheEntry:
    value: Any
    expires_at: float | None


class InMemoryCache(CacheBackend):
    """Thread-safe cache with optional per-entry TTL and a size bound."""

    def __init__(self, max_entries: Optional[int] = None) -> None:
        self._data: Dict[Hashable, _CacheEntry] = {}
        self._lock = threading.Lock()
        self.max_entries = max_entries
        self.stats = CacheStats()

    def get(self, key: Hashable) -> Any | None:
        with self._lock:
            entry = self._data.get(key)
            if entry is None:
                self.stats.misses += 1
                return None
            if entry.expires_at is not None and entry.expires_at < time.monotonic():
                del self._data[key]
                self.stats.misses += 1
                return None
            self.stats.hits += 1
            return entry.value

    def set(self, key: Hashable, value: Any, ttl: Optional[float] = None) -> None:
        expires_at = time.monotonic() + ttl if ttl else None
        with self._lock:
            if self.max_entries is not None and key not in self._data:
                while len(self._data) >= self.max_entries:
                    # 淘汰最早插入的条目
                    del self._data[next(iter(self._data))]
            self._data[key] = _CacheEntry(value=value, expires_at=expires_at)

    def get_or_compute(self, key: Hashable, factory: Callable[[], T], ttl: Optional[float] = None) -> T:
        cached = self.get(key)
        if cached is not None:
            return cached
        value = factory()
        self.set(key, value, ttl=ttl)
        return value

    def clear(self) -> None:
        with self._lock:
            self._data.clear()
            self.stats = CacheStats()

    def __len__(self) -> int:
        with self._lock:
            return len(self._data)


__all__ = ["CacheBackend", "CacheStats", "InMemoryCache"]
