import time

from utils.cache import InMemoryCache


def test_in_memory_cache_store_and_get():
    cache = InMemoryCache()
    cache.set("key", "value", ttl=10)
    assert cache.get("key") == "value"
    assert cache.stats.hits == 1


def test_in_memory_cache_respects_ttl():
    cache = InMemoryCache()
    cache.set("key", "value", ttl=0.05)
    time.sleep(0.1)
    assert cache.get("key") is None
    assert cache.stats.misses == 1


def test_in_memory_cache_clear():
    cache = InMemoryCache()
    cache.set("key", "value")
    cache.clear()
    assert cache.get("key") is None
    assert len(cache) == 0


def test_in_memory_cache_evicts_oldest_entry():
    cache = InMemoryCache(max_entries=2)
    cache.set("a", 1)
    cache.set("b", 2)
    cache.set("c", 3)
    assert cache.get("a") is None
    assert cache.get("c") == 3
    assert len(cache) == 2


def test_get_or_compute_calls_factory_once():
    cache = InMemoryCache()
    calls = []

    def factory():
        calls.append(1)
        return "computed"

    assert cache.get_or_compute("k", factory) == "computed"
    assert cache.get_or_compute("k", factory) == "computed"
    assert len(calls) == 1
    assert cache.stats.hit_rate == 0.5
