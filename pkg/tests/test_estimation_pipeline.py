import numpy as np
import pytest

from Shadows.dense_sim import exact_rdm, fock_state, random_mixed
from Shadows.ensembles import NCSetting, PermSetting
from Shadows.observables import assemble_rdm
from Shadows.planner import coverage_plan
from Shadows.services import REGISTRY
from Shadows.services.estimation_pipeline import EstimationPipeline

EPSILON = 0.2


@pytest.fixture(scope='module')
def budgeted_fock_run():
    state = fock_state([1, 1, 0, 0])
    result = EstimationPipeline().run_budgeted(state, 2, EPSILON, 0.05, seed=2024)
    return state, result


def test_budgeted_run_recovers_the_two_rdm(budgeted_fock_run):
    state, result = budgeted_fock_run
    assert result.budget is not None
    assert result.samples == result.settings == result.budget.M
    assert 5000 < result.budget.M < 5300
    diff = np.max(np.abs(result.rdm.matrix - exact_rdm(state, 2).matrix))
    assert diff <= EPSILON


def test_budgeted_run_one_rdm_from_the_same_estimates(budgeted_fock_run):
    state, result = budgeted_fock_run
    one = assemble_rdm(result.means(), 4, 1)
    # every 1-RDM entry mixes degree-2 estimates with weights summing to at most 1/2 + 1/2
    assert np.max(np.abs(one.matrix - exact_rdm(state, 1).matrix)) <= EPSILON
    assert np.allclose(np.diag(one.matrix).real, [1, 1, 0, 0], atol=EPSILON / 2)


def test_rows_are_sorted_by_degree(budgeted_fock_run):
    _, result = budgeted_fock_run
    rows = result.estimate_rows()
    assert len(rows) == 28 + 70
    assert rows[0]['mu'] == '0 1' and rows[0]['degree'] == 2
    assert rows[-1]['degree'] == 4


def test_run_is_deterministic_across_worker_counts():
    state = random_mixed(2, 3)
    plan = coverage_plan(2, 2, 'fgu', 3, np.random.default_rng(1))
    one = EstimationPipeline(workers=1).run(plan.settings, state, 2, shots=20, seed=5)
    four = EstimationPipeline(workers=4).run(plan.settings, state, 2, shots=20, seed=5)
    assert one.estimates == four.estimates
    assert np.array_equal(one.rdm.matrix, four.rdm.matrix)
    again = EstimationPipeline().run(plan.settings, state, 2, shots=20, seed=6)
    assert again.estimates != one.estimates


def test_nc_plan_runs_end_to_end():
    state = fock_state([1, 0, 0])
    plan = coverage_plan(3, 1, 'nc', 3, np.random.default_rng(2))
    result = EstimationPipeline().run(plan.settings, state, 1, shots=10, seed=4)
    assert result.ensemble == 'nc'
    assert result.samples == 10 * plan.K_r
    assert result.rdm.matrix.shape == (3, 3)
    # every target sits in at least three planned settings
    assert all(count >= 3 for _, count in result.estimates.values())


def test_uncovered_targets_are_reported(caplog):
    state = fock_state([0, 0])
    with caplog.at_level('WARNING'):
        result = EstimationPipeline().run([PermSetting.identity(2)], state, 1, shots=4, seed=0)
    assert result.estimates[(0, 2)] == (0.0, 0)
    assert result.estimates[(0, 1)] == (3.0, 4)
    assert 'never covered' in caplog.text


def test_pipeline_rejects_bad_runs():
    state = fock_state([0, 0])
    pipeline = EstimationPipeline()
    with pytest.raises(ValueError):
        pipeline.run([], state, 1)
    with pytest.raises(ValueError):
        pipeline.run([PermSetting.identity(2), NCSetting(2, (0, 1), 'ZZ')], state, 1)
    with pytest.raises(ValueError):
        pipeline.run([PermSetting.identity(2)], state, 1, shots=0)
    with pytest.raises(ValueError):
        pipeline.run([PermSetting.identity(3)], state, 1)


def test_registry_exposes_pipeline_entry_points():
    assert set(REGISTRY) == {'estimate.run', 'estimate.budgeted', 'validate.run'}
    result = REGISTRY['estimate.run']([PermSetting.identity(1)], fock_state([1]), 1, shots=2, seed=0)
    assert result.estimates[(0, 1)] == (-1.0, 2)
