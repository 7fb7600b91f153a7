"""Service registry for estimation and validation helpers.

Each entry is a bound method of a stateless service instance, so callers can
look capabilities up by name.
"""
from __future__ import annotations

from typing import Any

from . import estimation_pipeline, validation_suite

_PIPELINE = estimation_pipeline.EstimationPipeline()
_SUITE = validation_suite.ValidationSuite()

REGISTRY: dict[str, Any] = {
    'estimate.run': _PIPELINE.run,
    'estimate.budgeted': _PIPELINE.run_budgeted,
    'validate.run': _SUITE.run,
}

__all__ = ['REGISTRY']
