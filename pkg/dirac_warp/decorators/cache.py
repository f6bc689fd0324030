import threading
from functools import wraps
from typing import Any, Callable, Hashable

from cachetools import LRUCache


def _default_key(*args, **kwargs) -> Hashable:
    return (args, frozenset(kwargs.items()))


def dynamic_cached(maxsize: int, key: Callable[..., Hashable] | None = None):
    """
    Memoize a pure function in a bounded LRU cache.

    Arguments must be hashable, or ``key`` must map them to something that is.
    The wrapper exposes ``invalidate(*args, **kwargs)``, ``clear()`` and
    ``cache_info()``. Lookups are guarded by a lock so worker threads can share it.
    """
    make_key = key or _default_key

    def decorator(func):
        cache: LRUCache = LRUCache(maxsize=maxsize)
        lock = threading.RLock()
        stats = {"hits": 0, "misses": 0}

        @wraps(func)
        def wrapper(*args, **kwargs) -> Any:
            k = make_key(*args, **kwargs)
            with lock:
                if k in cache:
                    stats["hits"] += 1
                    return cache[k]
                stats["misses"] += 1
            result = func(*args, **kwargs)
            with lock:
                cache[k] = result
            return result

        def cache_info() -> dict:
            with lock:
                return {**stats, "size": len(cache), "maxsize": maxsize}

        def clear() -> None:
            with lock:
                cache.clear()
                stats["hits"] = stats["misses"] = 0

        wrapper.invalidate = lambda *args, **kwargs: cache.pop(make_key(*args, **kwargs), None)
        wrapper.clear = clear
        wrapper.cache_info = cache_info

        return wrapper

    return decorator
