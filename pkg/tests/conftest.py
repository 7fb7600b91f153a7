import pathlib
import sys

import numpy as np
import pytest

# Ensure the project root is on sys.path so 'Shadows.*' imports resolve.
ROOT = pathlib.Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

# Lightweight fixtures -------------------------------------------------------

@pytest.fixture()
def metrics_reset():
    from Shadows.core.metrics import METRICS  # type: ignore
    METRICS.reset()
    yield
    METRICS.reset()


@pytest.fixture(autouse=True)
def json_log(tmp_path, monkeypatch):
    """Redirect the structured event log away from Shadows/logs."""
    path = tmp_path / 'events.jsonl'
    monkeypatch.setenv('SHADOWS_JSON_LOG', str(path))
    return path


@pytest.fixture()
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture()
def nc_cache():
    from Shadows.nc_estimator import clear_eigenvalue_cache
    clear_eigenvalue_cache()
    yield
    clear_eigenvalue_cache()
