"""Central enumerations and helpers for structured events & metrics.

Enums keep event names from drifting between the planner, the estimators and
the CLI. emit() accepts an enum or a raw string and never raises.
"""
from collections.abc import Callable
from enum import StrEnum
from typing import Any


class Event(StrEnum):
    PLAN_START = 'shadows.plan.start'
    PLAN_COMPLETE = 'shadows.plan.complete'
    ESTIMATE_START = 'shadows.estimate.start'
    ESTIMATE_COMPLETE = 'shadows.estimate.complete'
    NC_EIGENVALUE = 'shadows.nc.eigenvalue'
    COUNT_COMPLETE = 'shadows.count.complete'
    VARIANCE_COMPLETE = 'shadows.variance.complete'
    VALIDATE_START = 'shadows.validate.start'
    VALIDATE_CHECK = 'shadows.validate.check'
    VALIDATE_FAILURE = 'shadows.validate.failure'
    VALIDATE_COMPLETE = 'shadows.validate.complete'
    RESULT_WRITTEN = 'shadows.io.written'
    IO_ERROR = 'shadows.io.error'
    CLI_ERROR = 'shadows.cli.error'

class Metric(StrEnum):
    SETTINGS_SAMPLED = 'settings_sampled'
    SHOTS_SIMULATED = 'shots_simulated'
    ESTIMATES_FOLDED = 'estimates_folded'
    DENSE_UNITARIES_BUILT = 'dense_unitaries_built'
    NC_EIGENVALUES_COMPUTED = 'nc_eigenvalues_computed'
    NC_EIGENVALUE_CACHE_HITS = 'nc_eigenvalue_cache_hits'
    VALIDATION_CHECKS = 'validation_checks'
    VALIDATION_FAILURES = 'validation_failures'
    RESULT_FILES_WRITTEN = 'result_files_written'
    FUNCTION_CALLS = 'function_calls'
    FUNCTION_TIME_MS_TOTAL = 'function_time_ms_total'

def emit(event: Event | str, logger_func: Callable[..., None], **fields: Any) -> None:
    """Standardize structured log_event usage; accepts an Event or a raw string."""
    try:
        logger_func(str(event), **fields)
    except Exception:
        pass

__all__ = ['Event', 'Metric', 'emit']
