import math
from fractions import Fraction

import numpy as np
import pytest

from Shadows.dense_sim import exact_majorana_expectations, outcome_distribution, random_mixed
from Shadows.ensembles import PermSetting, enumerate_settings
from Shadows.fgu_estimator import (
    FoldAccumulator,
    ShadowSample,
    bernstein_samples,
    channel_eigenvalue,
    covered,
    estimate_all,
    estimate_majorana,
    estimate_tally,
    fold_samples,
    parallel_fold,
    rdm_observable_count,
    rdm_sample_budget,
    shadow_norm_observable,
    shadow_norm_sq,
    stirling_norm_sq,
    variance_exact,
)
from Shadows.mappings import get_mapping, int_to_bits
from Shadows.observables import ObservableDecomposition

JW2 = get_mapping('jw', 2)
IDENT2 = PermSetting.identity(2)


def test_channel_eigenvalues():
    assert channel_eigenvalue(2, 1).value == Fraction(1, 3)
    assert channel_eigenvalue(3, 2).value == Fraction(1, 5)
    assert channel_eigenvalue(5, 5).value == 1
    with pytest.raises(ValueError):
        channel_eigenvalue(2, 3)


def test_shadow_norm_values():
    assert shadow_norm_sq(50, 2) == 3201
    assert shadow_norm_sq(2, 1) == 3
    assert abs(stirling_norm_sq(50, 2) / 3201 - 1) < 0.1


def test_estimator_examples():
    assert estimate_majorana(ShadowSample(IDENT2, '00'), (0, 1), JW2) == 3.0
    assert estimate_majorana(ShadowSample(IDENT2, '10'), (0, 1), JW2) == -3.0
    assert estimate_majorana(ShadowSample(IDENT2, '00'), (0, 2), JW2) == 0.0
    assert estimate_tally(ShadowSample(IDENT2, '11'), (), JW2) == 1


def test_estimator_rejects_bad_input():
    with pytest.raises(ValueError):
        ShadowSample(IDENT2, '0')
    with pytest.raises(ValueError):
        estimate_tally(ShadowSample(IDENT2, '00'), (0, 1, 2), JW2)


def test_covered():
    assert covered(IDENT2, (0, 1), JW2)
    assert not covered(IDENT2, (0, 2), JW2)
    # (1 2 0) sends wires 0, 2 to 1, 0
    assert covered(PermSetting(2, (1, 2, 0, 3)), (0, 2), JW2)


def test_bernstein_budget():
    assert bernstein_samples(0.1, 0.01, 100, 10) == math.ceil((1 + 0.1 / 3) * 2 * math.log(20000) / 0.01 * 10)
    assert bernstein_samples(0.1, 0.01, 100, 10) in (20467, 20468)
    small = bernstein_samples(0.1, 0.01, 1, 10)
    large = bernstein_samples(0.1, 0.01, 100, 10)
    assert small / large == pytest.approx(math.log(200) / math.log(20000), rel=1e-3)
    with pytest.raises(ValueError):
        bernstein_samples(1.5, 0.01, 1, 1)
    with pytest.raises(ValueError):
        bernstein_samples(0.1, 0.01, 0, 1)


def test_rdm_sample_budget():
    plan = rdm_sample_budget(4, 2, 0.2, 0.05)
    assert plan.L == rdm_observable_count(4, 2) == 28 + 70
    assert plan.max_norm_sq == pytest.approx(70 / 6)
    assert plan.M == bernstein_samples(0.2, 0.05, 98, 70 / 6)


def test_fold_is_associative(rng):
    samples = [ShadowSample(IDENT2, int_to_bits(int(z), 2)) for z in rng.integers(0, 4, size=40)]
    targets = [(0, 1), (2, 3), (0, 1, 2, 3), (0, 2)]

    def tally(s, mu):
        return estimate_tally(s, mu, JW2)

    whole = fold_samples(samples, targets, tally)
    parts = fold_samples(samples[:13], targets, tally).merge(fold_samples(samples[13:], targets, tally))
    assert whole.sums == parts.sums and whole.nonzero == parts.nonzero and whole.samples == parts.samples
    threaded = parallel_fold(samples, targets, tally, workers=4)
    assert threaded.sums == whole.sums
    with pytest.raises(ValueError):
        FoldAccumulator().means(targets, {mu: Fraction(1) for mu in targets})


def test_estimate_all_degenerate_plan():
    samples = [ShadowSample(IDENT2, '00')] * 10
    out = estimate_all(samples, [(0, 1), (0, 2)], JW2)
    assert out[(0, 1)] == (3.0, 10)
    assert out[(0, 2)] == (0.0, 0)
    with pytest.raises(ValueError):
        estimate_all([], [(0, 1)], JW2)


@pytest.mark.parametrize('seed', [11, 23, 37])
@pytest.mark.parametrize('kind', ['jw', 'bk'])
def test_exact_unbiasedness_over_the_full_group(kind, seed):
    n = 2
    m = get_mapping(kind, n)
    state = random_mixed(n, seed)
    exact = exact_majorana_expectations(state, 2 * n)
    group = list(enumerate_settings(n))
    targets = [mu for mu in exact if mu]
    totals = dict.fromkeys(targets, 0.0)
    for q in group:
        probs = outcome_distribution(state, q, m)
        for z, p in enumerate(probs):
            sample = ShadowSample(q, int_to_bits(z, n))
            for mu in targets:
                totals[mu] += p * estimate_majorana(sample, mu, m)
    for mu in targets:
        assert totals[mu] / len(group) == pytest.approx(exact[mu], abs=1e-10)


def test_single_shot_variance_matches_shadow_norm():
    n = 3
    m = get_mapping('jw', n)
    mu = (0, 1, 2, 5)
    state = random_mixed(n, 23)
    truth = exact_majorana_expectations(state, 4)[mu]
    group = list(enumerate_settings(n))
    probs = [outcome_distribution(state, q, m) for q in group]
    values = np.array([[estimate_majorana(ShadowSample(q, int_to_bits(z, n)), mu, m) for z in range(1 << n)] for q in group])
    rng = np.random.default_rng(2024)
    draws = 100_000
    picks = np.bincount(rng.integers(0, len(group), size=draws), minlength=len(group))
    xs = np.concatenate([values[i, rng.choice(1 << n, size=c, p=probs[i])] for i, c in enumerate(picks) if c])
    dev = (xs - xs.mean()) ** 2
    expected = float(shadow_norm_sq(n, 2)) - truth ** 2
    assert abs(dev.mean() - expected) < 5 * dev.std(ddof=1) / math.sqrt(draws)


def test_observable_norm_and_variance():
    h = ObservableDecomposition(2, {(0, 1): 1.0})
    assert shadow_norm_observable(h) == pytest.approx(3.0)
    assert shadow_norm_observable(ObservableDecomposition(2, {(0, 1): 2.0})) == pytest.approx(12.0)
    two = ObservableDecomposition(2, {(0, 1): 1.0, (0, 1, 2, 3): 1.0})
    assert shadow_norm_observable(two) == pytest.approx(3.0 + 1.0)
    assert variance_exact(h, 0.0) == pytest.approx(3.0)
    assert variance_exact(h, -1.0) == pytest.approx(2.0)
    assert variance_exact(ObservableDecomposition(2), 0.0) == 0.0
