"""Result writer for plans, RDMs, counts and reports.

Role:
    Write tabular results as CSV with a JSON mirror, and document-style
    results (plans, reports) as JSON. Every file carries the run config as a
    header: a leading ``# config: {...}`` line in CSVs and a ``header`` key in JSON.

Public Entry Points:
    ResultWriter(output_path, header).write_table(rows, fieldnames)
    ResultWriter(output_path, header).write_document(payload)

Outputs / Side Effects:
    - ``<stem>.csv`` and ``<stem>.json`` next to each other for tables.
    - Increments METRICS['result_files_written'] and emits shadows.io.written.

Failure Handling:
    - OSError / serialization failures are logged via log_exception and
      re-raised as ResultWriteError.

Determinism:
    No timestamps in payloads; JSON keys are sorted, so identical inputs give
    byte-identical files.
"""
from __future__ import annotations

import csv
import io
import json
import logging
from collections.abc import Sequence
from pathlib import Path
from typing import Any

from Shadows.constants import Event, Metric, emit
from Shadows.core.metrics import METRICS
from Shadows.core.structured_logging import log_event, log_exception


class ResultWriteError(Exception):
    pass


class ResultWriter:
    def __init__(self, output_path: str | Path, header: dict[str, Any], logger: logging.Logger | None = None) -> None:
        path = Path(output_path)
        self.stem = path.with_suffix('') if path.suffix in ('.csv', '.json') else path
        self.header = header
        self.logger = logger or logging.getLogger(__name__)

    @property
    def csv_path(self) -> Path:
        return self.stem.with_suffix('.csv')

    @property
    def json_path(self) -> Path:
        return self.stem.with_suffix('.json')

    # Public API
    def write_table(self, rows: Sequence[dict[str, Any]], fieldnames: Sequence[str]) -> tuple[Path, Path]:
        try:
            buf = io.StringIO()
            buf.write(f"# config: {json.dumps(self.header, sort_keys=True, default=str)}\n")
            writer = csv.DictWriter(buf, fieldnames=list(fieldnames), lineterminator='\n', extrasaction='ignore')
            writer.writeheader()
            writer.writerows(rows)
            self._write(self.csv_path, buf.getvalue())
            self._write(self.json_path, self._dump({'header': self.header, 'rows': list(rows)}))
        except Exception as e:
            log_exception(str(Event.IO_ERROR), exc=e, path=str(self.stem))
            raise ResultWriteError(f"cannot write results to {self.stem}: {e}") from e
        self.logger.info("wrote %d rows to %s (+ JSON mirror)", len(rows), self.csv_path)
        return self.csv_path, self.json_path

    def write_document(self, payload: dict[str, Any]) -> Path:
        try:
            self._write(self.json_path, self._dump({'header': self.header, **payload}))
        except Exception as e:
            log_exception(str(Event.IO_ERROR), exc=e, path=str(self.json_path))
            raise ResultWriteError(f"cannot write results to {self.json_path}: {e}") from e
        self.logger.info("wrote %s", self.json_path)
        return self.json_path

    # Internal
    @staticmethod
    def _dump(payload: dict[str, Any]) -> str:
        return json.dumps(payload, sort_keys=True, indent=2, default=str) + '\n'

    def _write(self, path: Path, text: str) -> None:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding='utf-8')
        METRICS.inc(Metric.RESULT_FILES_WRITTEN.value)
        emit(Event.RESULT_WRITTEN, log_event, path=str(path), bytes=len(text))


def read_table_header(csv_path: str | Path) -> dict[str, Any]:
    """Config header of a CSV written by ResultWriter."""
    first = Path(csv_path).read_text(encoding='utf-8').splitlines()[0]
    if not first.startswith('# config: '):
        raise ValueError(f"{csv_path} has no config header")
    return json.loads(first[len('# config: '):])


__all__ = ['ResultWriter', 'ResultWriteError', 'read_table_header']
