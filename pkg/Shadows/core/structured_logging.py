"""Structured JSON event log (append-only JSONL) for planning and estimation runs.

Every record carries the run coordinates of the shadow experiment it belongs
to (run_id, ensemble, mapping, n, k, seed). They are bound once with
``run_context`` and merged into each event emitted inside the block; explicit
keyword fields win over the bound ones.

SHADOWS_JSON_LOG overrides the default path and is read at call time so tests
can redirect it with monkeypatch. Non-fatal on I/O errors.
"""
from __future__ import annotations

import datetime
import json
import os
import threading
import traceback
from collections.abc import Iterator
from contextlib import contextmanager
from contextvars import ContextVar
from typing import Any

from Shadows.config import LOGGING_CONFIG

_lock = threading.Lock()

RUN_FIELDS = ('run_id', 'ensemble', 'mapping', 'n', 'k', 'seed')
_run: ContextVar[dict[str, Any] | None] = ContextVar('shadows_run', default=None)

DEFAULT_JSON_LOG = os.path.abspath(os.path.join(os.path.dirname(__file__), '..', 'logs', 'shadows_events.jsonl'))


@contextmanager
def run_context(**fields: Any) -> Iterator[dict[str, Any]]:
    """Bind run coordinates for every event logged inside the block (nests)."""
    unknown = set(fields) - set(RUN_FIELDS)
    if unknown:
        raise ValueError(f"unknown run fields: {sorted(unknown)}")
    bound = {**current_run(), **{k: v for k, v in fields.items() if v is not None}}
    token = _run.set(bound)
    try:
        yield bound
    finally:
        _run.reset(token)


def current_run() -> dict[str, Any]:
    return dict(_run.get() or {})


def describe_run(run: dict[str, Any] | None = None) -> str:
    """Compact 'fgu/jw n=4 k=2 seed=7' label; '-' outside any run."""
    r = current_run() if run is None else run
    parts = ['/'.join(str(r[key]) for key in ('ensemble', 'mapping') if key in r)]
    parts += [f"{key}={r[key]}" for key in ('n', 'k', 'seed') if key in r]
    label = ' '.join(p for p in parts if p)
    return label or '-'


def _log_path() -> str:
    return os.environ.get('SHADOWS_JSON_LOG', DEFAULT_JSON_LOG)


def _rotate_if_needed(path: str) -> None:
    max_bytes = int(os.environ.get('SHADOWS_JSON_LOG_MAX', LOGGING_CONFIG['json_max_bytes']))
    keep = int(os.environ.get('SHADOWS_JSON_LOG_KEEP', LOGGING_CONFIG['json_keep']))
    if max_bytes <= 0:
        return
    try:
        if os.path.isfile(path) and os.path.getsize(path) > max_bytes:
            ts = datetime.datetime.now().strftime('%Y%m%d%H%M%S%f')
            try:
                os.replace(path, f"{path}.{ts}")
            except Exception:
                return
            prefix = os.path.basename(path) + '.'
            parent = os.path.dirname(path)
            rotated = sorted([f for f in os.listdir(parent) if f.startswith(prefix)], reverse=True)
            for f in rotated[keep:]:
                try:
                    os.remove(os.path.join(parent, f))
                except Exception:
                    pass
    except Exception:
        pass


def build_record(event: str, level: str = 'INFO', **fields: Any) -> dict[str, Any]:
    """Record layout: ts, event, level, run coordinates, then event fields."""
    record: dict[str, Any] = {
        'ts': datetime.datetime.now(datetime.UTC).isoformat(),
        'event': event,
        'level': level,
    }
    run = current_run()
    for key in RUN_FIELDS:
        value = fields.pop(key, None)
        if value is None:
            value = run.get(key)
        record[key] = value
    for k, v in fields.items():
        if k not in record:
            record[k] = v
    return record


def log_event(event: str, *, level: str = 'INFO', **fields: Any) -> None:
    line = json.dumps(build_record(event, level, **fields), ensure_ascii=False, default=str)
    path = _log_path()
    try:
        os.makedirs(os.path.dirname(path), exist_ok=True)
        with _lock:
            _rotate_if_needed(path)
            with open(path, 'a', encoding='utf-8') as f:
                f.write(line + '\n')
    except Exception:
        # structured logging must not break the numerical flow
        pass


def log_exception(event: str, *, exc: BaseException | None = None, **fields: Any) -> None:
    exc_info = None
    if exc is not None:
        exc_info = {
            'type': type(exc).__name__,
            'message': str(exc),
            'traceback': traceback.format_exc(limit=5),
        }
    log_event(event, level='ERROR', exception=exc_info, **fields)


__all__ = [
    'log_event', 'log_exception', 'build_record', 'run_context', 'current_run', 'describe_run', 'RUN_FIELDS',
    'DEFAULT_JSON_LOG',
]
