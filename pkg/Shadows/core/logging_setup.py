"""Console plus rotating-file logging, configured from LOGGING_CONFIG.

Each line is tagged with the run bound by structured_logging.run_context, so
plain log lines and JSONL events of one estimation share the same label.
"""
import logging
import os
from logging.handlers import RotatingFileHandler

from Shadows.config import LOGGING_CONFIG, PROJECT_ROOT
from Shadows.core.structured_logging import describe_run

LOG_PATH = os.path.join(PROJECT_ROOT, LOGGING_CONFIG['file_path'])
_initialized = False


class RunLabelFilter(logging.Filter):
    """Sets record.run to the active run label."""

    def filter(self, record: logging.LogRecord) -> bool:
        record.run = describe_run()
        return True


def init_logging(level: str | None = None, *, log_dir: str | None = None) -> None:
    global _initialized
    if _initialized:
        return
    path = os.path.join(log_dir, os.path.basename(LOG_PATH)) if log_dir else LOG_PATH
    os.makedirs(os.path.dirname(path), exist_ok=True)
    root = logging.getLogger()
    root.setLevel((level or LOGGING_CONFIG['level']).upper())
    root.handlers.clear()
    fmt = logging.Formatter(LOGGING_CONFIG['format'])
    handlers: list[logging.Handler] = [
        logging.StreamHandler(),
        RotatingFileHandler(path, maxBytes=LOGGING_CONFIG['file_max_bytes'], backupCount=LOGGING_CONFIG['file_backups'], encoding='utf-8'),
    ]
    for h in handlers:
        h.setFormatter(fmt)
        h.addFilter(RunLabelFilter())
        root.addHandler(h)
    _initialized = True


def reset_logging() -> None:  # test helper
    global _initialized
    root = logging.getLogger()
    for h in list(root.handlers):
        h.close()
        root.removeHandler(h)
    _initialized = False


__all__ = ['init_logging', 'reset_logging', 'RunLabelFilter', 'LOG_PATH']
