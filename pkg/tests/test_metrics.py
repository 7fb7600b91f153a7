import json

import numpy as np

from Shadows import metrics_cli
from Shadows.constants import Metric
from Shadows.core.metrics import METRICS, timed
from Shadows.dense_sim import fock_state
from Shadows.ensembles import sample_perm_setting
from Shadows.services.estimation_pipeline import EstimationPipeline


def test_pipeline_counters(metrics_reset):
    state = fock_state([1, 0])
    rng = np.random.default_rng(0)
    settings = [sample_perm_setting(2, rng) for _ in range(3)]
    EstimationPipeline().run(settings, state, 1, shots=4, seed=0)
    snap = METRICS.snapshot()
    assert {'settings_sampled', 'shots_simulated', 'estimates_folded', 'dense_unitaries_built'} <= snap.keys()
    assert snap['settings_sampled'] == 3
    assert snap['shots_simulated'] == 12
    assert snap['function_calls'] >= 1
    assert set(snap) == {m.value for m in Metric}


def test_timed_counts_calls(metrics_reset):
    @timed()
    def double(x):
        return 2 * x

    assert double(3) == 6 and double(4) == 8
    assert METRICS.snapshot()['function_calls'] == 2


def test_metrics_cli_dump(metrics_reset, capsys):
    METRICS.inc('result_files_written', 2)
    assert metrics_cli.main(['--raw']) == 0
    snap = json.loads(capsys.readouterr().out)
    assert snap['result_files_written'] == 2
