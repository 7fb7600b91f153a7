"""In-memory counters for sampling, simulation and validation work.

Not persistent; intended for short-lived process diagnostics and test assertions.
"""
from __future__ import annotations

import functools
import sys as _sys
import threading
from collections.abc import Callable
from time import perf_counter
from typing import Any, TypeVar

from Shadows.constants import Metric

_lock = threading.Lock()

F = TypeVar('F', bound=Callable[..., Any])

_COUNTERS = tuple(m.value for m in Metric)

class _Metrics:
    def __init__(self) -> None:
        self._counters: dict[str, int] = dict.fromkeys(_COUNTERS, 0)
    def inc(self, name: str, value: int = 1) -> None:
        with _lock:
            self._counters[name] = self._counters.get(name, 0) + value
    def snapshot(self) -> dict[str, int]:
        with _lock:
            return dict(self._counters)
    def reset(self) -> None:  # test helper
        with _lock:
            for k in self._counters:
                self._counters[k] = 0

METRICS = _Metrics()

def timed() -> Callable[[F], F]:
    def _wrap(fn: F) -> F:
        @functools.wraps(fn)
        def inner(*a: Any, **kw: Any) -> Any:
            start = perf_counter()
            try:
                return fn(*a, **kw)
            finally:
                duration_ms = (perf_counter() - start) * 1000
                METRICS.inc(Metric.FUNCTION_CALLS.value)
                METRICS.inc(Metric.FUNCTION_TIME_MS_TOTAL.value, int(duration_ms))
        return inner  # type: ignore[return-value]
    return _wrap

__all__ = ['METRICS', 'timed']

# ---- Import Path Guard & Alias Coalescing ----------------------------------
_current = _sys.modules.get(__name__)
for _alias in ('core.metrics', 'Shadows.core.metrics'):
    _existing = _sys.modules.get(_alias)
    if _existing and _existing is not _current:
        raise RuntimeError(f"Duplicate metrics module load detected (alias={_alias})")
    _sys.modules[_alias] = _current  # type: ignore[assignment]
