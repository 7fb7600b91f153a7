from collections import Counter
from itertools import combinations, permutations

import numpy as np
import pytest
from scipy.stats import chisquare

from Shadows.ensembles import (
    NCSetting,
    PermSetting,
    SignedPermSetting,
    act_on_tuple,
    compose,
    decompose_transpositions,
    enumerate_alt,
    enumerate_settings,
    enumerate_signed_settings,
    expand_mode_perm,
    inverse,
    mode_perm_image,
    parity,
    replay,
    sample_alt,
    sample_nc_setting,
    sample_perm_setting,
    setting_rng,
    subdeterminant,
)
from Shadows.majorana import MajoranaIndexError, permutation_sign

CYCLE = PermSetting(2, (1, 2, 0, 3))


def _leibniz(matrix):
    size = matrix.shape[0]
    total = 0
    for p in permutations(range(size)):
        term = permutation_sign(p)
        for i, j in enumerate(p):
            term *= int(matrix[i, j])
        total += term
    return total


def test_alt_sizes_and_parity():
    assert len(list(enumerate_alt(4))) == 12
    assert len(list(enumerate_alt(6))) == 360
    assert all(parity(p) == 0 for p in enumerate_alt(5))


def test_sample_alt_small_cases(rng):
    assert sample_alt(1, rng) == (0,)
    assert sample_alt(2, rng) == (0, 1)
    for _ in range(200):
        assert parity(sample_alt(7, rng)) == 0


def test_sample_alt_is_uniform_on_alt4():
    rng = np.random.default_rng(7)
    counts = Counter(sample_alt(4, rng) for _ in range(100_000))
    assert set(counts) == set(enumerate_alt(4))
    _, p_value = chisquare([counts[p] for p in sorted(counts)])
    assert p_value > 0.01


def test_odd_permutations_rejected():
    with pytest.raises(MajoranaIndexError):
        PermSetting(1, (1, 0))
    with pytest.raises(MajoranaIndexError):
        PermSetting(2, (0, 1, 2, 2))
    with pytest.raises(MajoranaIndexError):
        NCSetting(2, (1, 0), 'XX')
    with pytest.raises(MajoranaIndexError):
        NCSetting(1, (0,), 'W')


def test_act_on_tuple_examples():
    ident = PermSetting.identity(2)
    assert act_on_tuple(ident, (0, 3)) == (1, (0, 3))
    assert act_on_tuple(CYCLE, (0, 1)) == (1, (1, 2))
    assert act_on_tuple(CYCLE, (0, 2)) == (-1, (0, 1))


def _settings_up_to_eight_wires():
    yield from enumerate_settings(2)
    yield from enumerate_settings(3)
    rng = np.random.default_rng(8)
    for _ in range(25):
        yield sample_perm_setting(4, rng)


def test_act_on_tuple_is_the_unique_nonzero_minor():
    for q in _settings_up_to_eight_wires():
        d = 2 * q.n
        for k in range(1, 5):
            for tau in combinations(range(d), k):
                sign, sigma = act_on_tuple(q, tau)
                minors = {rows: subdeterminant(q, rows, tau) for rows in combinations(range(d), k)}
                assert minors[sigma] == sign
                assert sum(abs(v) for v in minors.values()) == 1


def test_act_on_tuple_respects_composition():
    rng = np.random.default_rng(12)
    for n in (2, 3, 4):
        for _ in range(20):
            q1, q2 = sample_perm_setting(n, rng), sample_perm_setting(n, rng)
            for k in (1, 2, 3, 4):
                for tau in combinations(range(2 * n), k):
                    s2, mid = act_on_tuple(q2, tau)
                    s1, end = act_on_tuple(q1, mid)
                    assert act_on_tuple(compose(q1, q2), tau) == (s1 * s2, end)


def test_alt_is_closed_under_composition():
    group = {q.pi for q in enumerate_settings(2)}
    for a in group:
        for b in group:
            assert compose(PermSetting(2, a), PermSetting(2, b)).pi in group


def test_signed_group_size_and_determinant():
    group = list(enumerate_signed_settings(2))
    assert len(group) == 2 ** 4 * 24 // 2
    assert all(round(np.linalg.det(q.matrix())) == 1 for q in group[::17])
    with pytest.raises(MajoranaIndexError):
        SignedPermSetting(1, (0, 1), (1, -1))
    with pytest.raises(MajoranaIndexError):
        SignedPermSetting(1, (0, 1), (1, 2))


def test_signed_subdeterminant_agrees_with_leibniz():
    rng = np.random.default_rng(5)
    group = list(enumerate_signed_settings(2))
    for i in rng.integers(0, len(group), size=60):
        q = group[int(i)]
        rows = tuple(sorted(rng.choice(4, size=2, replace=False).tolist()))
        cols = tuple(sorted(rng.choice(4, size=2, replace=False).tolist()))
        assert subdeterminant(q, rows, cols) == _leibniz(q.matrix()[np.ix_(rows, cols)])


def test_subdeterminant_identity():
    ident = PermSetting.identity(3)
    assert subdeterminant(ident, (0, 2, 4), (0, 2, 4)) == 1
    assert subdeterminant(ident, (0, 2, 4), (0, 2, 5)) == 0


def test_subdeterminant_agrees_with_leibniz():
    rng = np.random.default_rng(99)
    for _ in range(100):
        q = sample_perm_setting(3, rng)
        rows = tuple(sorted(rng.choice(6, size=3, replace=False).tolist()))
        cols = tuple(sorted(rng.choice(6, size=3, replace=False).tolist()))
        sub = q.matrix()[np.ix_(rows, cols)]
        assert subdeterminant(q, rows, cols) == _leibniz(sub)


def test_compose_and_inverse():
    q = compose(CYCLE, inverse(CYCLE))
    assert q.pi == PermSetting.identity(2).pi
    assert np.array_equal(compose(CYCLE, CYCLE).matrix(), CYCLE.matrix() @ CYCLE.matrix())


def test_network_identity_has_depth_zero():
    assert decompose_transpositions(PermSetting.identity(3)).depth == 0


def test_network_reversal_replays():
    rev = PermSetting(2, (3, 2, 1, 0))
    net = decompose_transpositions(rev)
    assert net.depth <= 4
    assert replay(net) == rev.pi


def test_network_depth_bound_on_random_settings():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        q = sample_perm_setting(6, rng)
        net = decompose_transpositions(q)
        assert net.depth <= 12
        assert replay(net) == q.pi
        for layer in net.layers:
            # disjoint adjacent swaps
            assert all(b - a >= 2 for a, b in zip(layer, layer[1:]))


def test_nc_setting_single_mode(rng):
    s = sample_nc_setting(1, rng)
    assert s.u == (0,)
    assert s.basis in ('X', 'Y', 'Z')


def test_nc_basis_letters_are_uniform():
    rng = np.random.default_rng(5)
    draws = 100_000
    counts = Counter(sample_nc_setting(1, rng).basis for _ in range(draws))
    sigma = np.sqrt(draws * (1 / 3) * (2 / 3))
    for letter in 'XYZ':
        assert abs(counts[letter] - draws / 3) < 3 * sigma


def test_nc_mode_perm_is_even(rng):
    for _ in range(200):
        assert parity(sample_nc_setting(5, rng).u) == 0


def test_mode_perm_image():
    assert mode_perm_image((0, 1, 2), (0, 3)) == (1, (0, 3))
    assert mode_perm_image((1, 2, 0), (0, 2)) == (1, (2, 4))
    sign, image = mode_perm_image((1, 0, 2), (1, 3))
    assert image == (1, 3)
    assert sign == -1
    assert parity(expand_mode_perm((1, 2, 0))) == 0


def test_setting_rng_streams_are_reproducible():
    a = setting_rng(42, 3).random(4)
    b = setting_rng(42, 3).random(4)
    c = setting_rng(42, 4).random(4)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_sampling_counts_settings(metrics_reset, rng):
    from Shadows.core.metrics import METRICS
    for _ in range(5):
        sample_perm_setting(2, rng)
    assert METRICS.snapshot()['settings_sampled'] == 5
