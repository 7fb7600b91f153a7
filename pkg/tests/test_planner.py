import math

import numpy as np
import pytest

from Shadows import planner
from Shadows.planner import (
    TimeModel,
    all_targets,
    allocation,
    coverage_plan,
    eqot,
    kr_sweep,
    mean_kr_table,
    min_measurement_circuits,
    mt_count,
    naive_count,
    reframed_variance,
    strategy_counts,
    swap1_count,
    swap_circuit_count,
    time_comparison,
    time_model,
)


def test_deterministic_counts():
    assert swap1_count(12) == 25
    assert eqot(4, 8) == 1215
    assert eqot(2, 8) == 27
    assert mt_count(2, 8) == 6833
    assert naive_count(1, 4) == 90
    assert swap_circuit_count(2, 6) == 15
    assert min_measurement_circuits(2, 6) == 15 * 16


def test_eqot_log_base_two():
    # ceil(log2 n) rounds: 8 -> 3, 9 -> 4
    assert eqot(2, 9) == 9 * 4
    assert eqot(3, 2) == 0
    with pytest.raises(ValueError):
        eqot(1, 8)


def test_mt_count_rounds_once_at_the_total():
    def stub(k, n):
        return 1
    # 1 + 4*15 + C(6,2) + C(6,3) * (2/3)^6 = 76 + 1280/729
    assert mt_count(3, 6, stub) == 78
    with pytest.raises(ValueError):
        mt_count(5, 12)
    with pytest.raises(ValueError):
        mt_count(3, 5)


def test_strategy_counts_keys():
    assert strategy_counts(1, 4) == {'swap1': 9, 'swap-k': 4, 'naive': 90}
    counts = strategy_counts(2, 8)
    assert counts['eqot'] == 27 and counts['mt'] == 6833 and counts['swap-k'] == 28
    assert counts['naive'] == 81 * 28 * 29 // 2


def test_time_model():
    det = TimeModel(10, shots=2.5e5, f_samp=5000, t_load=0.1)
    assert time_model(det, deterministic=True) == pytest.approx(501.0)
    rand = TimeModel(10, shots=2.5e5, f_samp=5000, t_load=0.1, r=10)
    assert time_model(rand, deterministic=False) == pytest.approx(10 * (5 + 0.1))
    cmp = time_comparison(10, 10, 10, shots=2.5e5, f_samp=5000, t_load=0.1)
    assert cmp['speedup'] == pytest.approx(501.0 / 51.0)
    with pytest.raises(ValueError):
        TimeModel(0)
    with pytest.raises(ValueError):
        TimeModel(1, t_load=-1)


def test_allocation():
    assert np.allclose(allocation([1, 4]), [1 / 3, 2 / 3])
    assert np.allclose(allocation([2, 2, 2, 2]), 0.25)
    assert np.allclose(allocation([0, 9]), [0, 1])
    with pytest.raises(ValueError):
        allocation([0, 0])
    with pytest.raises(ValueError):
        allocation([-1, 2])


def test_reframed_variance():
    assert reframed_variance([5.0], [1.0], 2.0) == pytest.approx(1.0)
    optimal = reframed_variance([1.0, 4.0], allocation([1.0, 4.0]), 0.0)
    uniform = reframed_variance([1.0, 4.0], [0.5, 0.5], 0.0)
    assert optimal == pytest.approx(9.0)
    assert optimal <= uniform
    with pytest.raises(ValueError):
        reframed_variance([1.0], [0.5, 0.5], 0.0)
    with pytest.raises(ValueError):
        reframed_variance([1.0, 1.0], [1.0, 0.0], 0.0)


def test_allocation_minimizes_reframed_variance():
    rng = np.random.default_rng(610)
    step = 1 / 400
    p1, p2 = np.meshgrid(np.arange(step, 1, step), np.arange(step, 1, step))
    inside = p1 + p2 < 1 - step / 2
    grid = np.stack([p1[inside], p2[inside], 1 - p1[inside] - p2[inside]])
    for _ in range(5):
        moments = rng.uniform(0.5, 5.0, size=3)
        best = reframed_variance(moments, allocation(moments), 1.0)
        grid_min = float(np.min((moments[:, None] / grid).sum(axis=0))) - 1.0
        assert best <= grid_min + 1e-12
        assert grid_min - best < 1e-3 * best
        for p in rng.dirichlet(np.ones(3), size=200):
            assert best <= reframed_variance(moments, p, 1.0) + 1e-12


def test_coverage_plan_small_fgu():
    plan = coverage_plan(2, 1, 'fgu', 1, np.random.default_rng(0))
    assert len(all_targets(2, 1)) == 6
    assert plan.K_r >= 3
    assert plan.min_coverage >= 1
    assert set(plan.coverage) == set(all_targets(2, 1))
    summary = plan.summary()
    assert summary['K_r'] == plan.K_r and summary['targets'] == 6


def test_coverage_plan_is_deterministic():
    a = coverage_plan(3, 2, 'fgu', 2, np.random.default_rng(9))
    b = coverage_plan(3, 2, 'fgu', 2, np.random.default_rng(9))
    assert [s.pi for s in a.settings] == [s.pi for s in b.settings]
    assert a.coverage == b.coverage


def test_coverage_plan_nc():
    plan = coverage_plan(3, 1, 'nc', 2, np.random.default_rng(4))
    assert plan.ensemble == 'nc'
    assert plan.min_coverage >= 2


def test_coverage_plan_rejects_bad_input(monkeypatch):
    with pytest.raises(ValueError):
        coverage_plan(2, 1, 'fgu', 0, np.random.default_rng(0))
    with pytest.raises(ValueError):
        coverage_plan(2, 1, 'clifford', 1, np.random.default_rng(0))
    monkeypatch.setitem(planner.PLANNER_CONFIG, 'max_settings', 2)
    with pytest.raises(RuntimeError):
        coverage_plan(4, 2, 'fgu', 5, np.random.default_rng(0))


def test_kr_over_r_does_not_grow_with_r():
    rows = kr_sweep(8, 2, 'fgu', [1, 10, 50], list(range(10)))
    table = mean_kr_table(rows)
    assert list(table) == [1, 10, 50]
    assert table[1] >= table[10] >= table[50]
    # every setting covers at most C(8,2) degree-4 targets out of C(16,4)
    assert table[50] >= math.comb(16, 4) / math.comb(8, 2)
