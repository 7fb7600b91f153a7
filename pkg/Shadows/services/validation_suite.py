"""Exhaustive desk-scale validation suite.

Role:
    Runs the exact identities that tie the combinatorial estimators to the
    dense simulator: channel eigenvalues, character sums of the signed group, exact
    unbiasedness for both ensembles, distribution consistency, network replay,
    mapping images, RDM assembly, NC eigenvalue bounds and the deterministic
    strategy counts.

Inputs:
    quick=True restricts the exhaustive checks to n = 2; the full suite runs n in {2, 3}.

Outputs:
    ValidationReport (list of CheckResult); passed iff every check passed.

Side Effects:
    - Every check emits shadows.validate.check; failures also emit
      shadows.validate.failure and bump METRICS['validation_failures'].

Failure Handling:
    - An exception inside a check is recorded as a failed check with the
      exception text; the suite keeps going.
"""
from __future__ import annotations

import logging
from collections.abc import Callable
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product

import numpy as np

from Shadows.constants import Event, Metric, emit
from Shadows.core.metrics import METRICS
from Shadows.core.structured_logging import log_event
from Shadows.dense_sim import (
    DenseState,
    encoding_unitary,
    exact_majorana_expectations,
    exact_rdm,
    expansion_distribution,
    majorana_dense,
    outcome_distribution,
    pauli_dense,
    random_mixed,
)
from Shadows.ensembles import (
    NCSetting,
    act_on_tuple,
    decompose_transpositions,
    enumerate_alt,
    enumerate_settings,
    enumerate_signed_settings,
    replay,
    sample_perm_setting,
    subdeterminant,
)
from Shadows.fgu_estimator import ShadowSample, channel_eigenvalue, estimate_tally, shadow_norm_sq, stirling_norm_sq
from Shadows.majorana import MajoranaIndex, binomial, colex_combinations, even_indices
from Shadows.mappings import Mapping, MappingKind, diagonal_set, get_mapping, int_to_bits, is_diagonal_index, to_pauli
from Shadows.nc_estimator import (
    candidate_indices,
    estimate_tally_nc,
    hypergeometric_factor,
    max_locality_average_exact,
    nc_eigenvalue,
    nc_upper_bound,
)
from Shadows.observables import assemble_rdm
from Shadows.planner import eqot, mt_count, naive_count, swap1_count

TOL = 1e-10
STATE_SEEDS = (11, 23, 37)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ''


@dataclass
class ValidationReport:
    quick: bool
    results: list[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    @property
    def failures(self) -> list[CheckResult]:
        return [r for r in self.results if not r.passed]

    def rows(self) -> list[dict[str, object]]:
        return [{'check': r.name, 'passed': r.passed, 'detail': r.detail} for r in self.results]


# ------------------- individual checks (return '' on success, a reason otherwise) -------------------

def check_channel_eigenvalues(n: int) -> str:
    group = list(enumerate_settings(n))
    for k in range(1, n + 1):
        expected = channel_eigenvalue(n, k).value
        for tau in colex_combinations(2 * n, 2 * k):
            hits = sum(1 for q in group if is_diagonal_index(act_on_tuple(q, tau)[1]))
            if Fraction(hits, len(group)) != expected:
                return f'n={n} k={k} tau={tau}: {Fraction(hits, len(group))} != {expected}'
    return ''


def character_sums(n: int) -> dict[int, Fraction]:
    """Mean squared character of the degree-k action of Sym+(2, 2n), for 1 <= k <= 2n."""
    d = 2 * n
    subsets = {k: list(colex_combinations(d, k)) for k in range(1, d + 1)}
    totals = dict.fromkeys(subsets, 0)
    size = 0
    for q in enumerate_signed_settings(n):
        size += 1
        for k, mus in subsets.items():
            trace = sum(subdeterminant(q, mu, mu) for mu in mus)
            totals[k] += trace * trace
    return {k: Fraction(t, size) for k, t in totals.items()}


def expected_character_sum(n: int, k: int) -> int:
    # the middle degree splits into two Hodge-dual irreps; every other degree is irreducible
    return 2 if k == n else 1


def check_character_sums(n: int) -> str:
    for k, value in character_sums(n).items():
        if value != expected_character_sum(n, k):
            return f'n={n} k={k}: mean squared character {value}, expected {expected_character_sum(n, k)}'
    return ''


def _fgu_average(n: int, state: DenseState, targets: list[MajoranaIndex], m: Mapping) -> dict[MajoranaIndex, float]:
    group = list(enumerate_settings(n))
    sums = dict.fromkeys(targets, 0.0)
    for q in group:
        probs = outcome_distribution(state, q, m)
        for z, p in enumerate(probs):
            if p < 1e-15:
                continue
            sample = ShadowSample(q, int_to_bits(z, n))
            for mu in targets:
                tally = estimate_tally(sample, mu, m)
                if tally:
                    sums[mu] += p * tally * float(shadow_norm_sq(n, len(mu) // 2))
    return {mu: s / len(group) for mu, s in sums.items()}


def _nc_average(n: int, state: DenseState, targets: list[MajoranaIndex], m: Mapping) -> dict[MajoranaIndex, float]:
    settings = [NCSetting(n, u, ''.join(b)) for u in enumerate_alt(n) for b in product('XYZ', repeat=n)]
    inverse = {mu: float(1 / Fraction(nc_eigenvalue(mu, m).value)) for mu in targets}
    sums = dict.fromkeys(targets, 0.0)
    for s in settings:
        probs = outcome_distribution(state, s, m)
        for z, p in enumerate(probs):
            if p < 1e-15:
                continue
            sample = ShadowSample(s, int_to_bits(z, n))
            for mu in targets:
                tally = estimate_tally_nc(sample, mu, m)
                if tally:
                    sums[mu] += p * tally * inverse[mu]
    return {mu: v / len(settings) for mu, v in sums.items()}


def check_unbiasedness(n: int, ensemble: str) -> str:
    targets = even_indices(n, 2 * n)
    for kind in MappingKind:
        m = get_mapping(kind, n)
        for seed in STATE_SEEDS:
            state = random_mixed(n, seed)
            exact = exact_majorana_expectations(state, 2 * n)
            avg = _fgu_average(n, state, targets, m) if ensemble == 'fgu' else _nc_average(n, state, targets, m)
            worst = max(targets, key=lambda mu: abs(avg[mu] - exact[mu]))
            if abs(avg[worst] - exact[worst]) > TOL:
                return f'{ensemble} {kind} n={n} seed={seed} mu={worst}: {avg[worst]:.12f} vs {exact[worst]:.12f}'
    return ''


def check_distribution_consistency(n: int, draws: int = 5) -> str:
    rng = np.random.default_rng(n)
    for kind in MappingKind:
        m = get_mapping(kind, n)
        state = random_mixed(n, 101 + n)
        g = exact_majorana_expectations(state, 2 * n)
        for _ in range(draws):
            q = sample_perm_setting(n, rng)
            diff = np.max(np.abs(outcome_distribution(state, q, m) - expansion_distribution(g, q, m)))
            if diff > TOL:
                return f'{kind} n={n} pi={q.pi}: max deviation {diff:.3g}'
    return ''


def check_network_replay(n: int, draws: int = 20) -> str:
    rng = np.random.default_rng(1000 + n)
    for _ in range(draws):
        q = sample_perm_setting(n, rng)
        net = decompose_transpositions(q)
        if replay(net) != q.pi:
            return f'replay mismatch for {q.pi}'
        if net.depth > 2 * n:
            return f'depth {net.depth} > {2 * n} for {q.pi}'
    return ''


def check_mapping_images(n: int) -> str:
    for kind in MappingKind:
        m = get_mapping(kind, n)
        e = encoding_unitary(m)
        for mu in even_indices(n, 2 * n):
            expected = e @ majorana_dense(mu, n) @ e.conj().T
            if np.max(np.abs(pauli_dense(to_pauli(mu, m)) - expected)) > TOL:
                return f'{kind} image of {mu} disagrees with the dense operator'
        for k in range(1, n + 1):
            d = diagonal_set(n, k, m)
            if len(d) != binomial(n, k) or any(not to_pauli(mu, m).is_diagonal for mu in d.members):
                return f'{kind} diagonal set n={n} k={k} is wrong'
    return ''


def check_rdm_assembly(n: int) -> str:
    state = random_mixed(n, 7 + n)
    g = exact_majorana_expectations(state, 2 * n)
    for k in range(1, min(n, 2) + 1):
        diff = np.max(np.abs(assemble_rdm(g, n, k).matrix - exact_rdm(state, k).matrix))
        if diff > TOL:
            return f'n={n} k={k}: assembled RDM off by {diff:.3g}'
    return ''


def check_nc_eigenvalues(max_n: int) -> str:
    jw3 = get_mapping('jw', 3)
    if nc_eigenvalue((0, 2), jw3).value != Fraction(7, 81):
        return f'lambda(0,2) at n=3 is {nc_eigenvalue((0, 2), jw3).value}, expected 7/81'
    if max_locality_average_exact(3, 1) != Fraction(7, 81):
        return 'closed-form locality average at (3, 1) is not 7/81'
    for n in range(2, max_n + 1):
        m = get_mapping('jw', n)
        for k in (1, 2):
            if n < 2 * k:
                continue
            bound = nc_upper_bound(n, k)
            factor = hypergeometric_factor(n, k)
            if not 1 <= factor <= Fraction(3, 2) ** k:
                return f'2F1 factor {factor} outside [1, (3/2)^{k}] at n={n}'
            for mu in candidate_indices(n, k):
                inv = 1 / Fraction(nc_eigenvalue(mu, m).value)
                if inv > bound:
                    return f'n={n} mu={mu}: 1/lambda={inv} exceeds bound {bound}'
    return ''


def check_counts() -> str:
    expected = {
        'swap1(12)': (swap1_count(12), 25),
        'eqot(4,8)': (eqot(4, 8), 1215),
        'eqot(2,8)': (eqot(2, 8), 27),
        'MT2(8)': (mt_count(2, 8), 6833),
        'naive(1,4)': (naive_count(1, 4), 90),
        'shadow_norm_sq(50,2)': (shadow_norm_sq(50, 2), 3201),
    }
    for name, (got, want) in expected.items():
        if got != want:
            return f'{name} = {got}, expected {want}'
    ratio = stirling_norm_sq(50, 2) / float(shadow_norm_sq(50, 2))
    if abs(ratio - 1) > 0.1:
        return f'Stirling approximation off by {abs(ratio - 1):.1%} at (50, 2)'
    return ''


# ------------------- suite -------------------

class ValidationSuite:
    def __init__(self, logger: logging.Logger | None = None) -> None:
        self.logger = logger or logging.getLogger(__name__)

    def checks(self, quick: bool) -> list[tuple[str, Callable[[], str]]]:
        sizes = (2,) if quick else (2, 3)
        out: list[tuple[str, Callable[[], str]]] = [('strategy_counts', check_counts)]
        for n in sizes:
            out.extend([
                (f'channel_eigenvalue_n{n}', lambda n=n: check_channel_eigenvalues(n)),
                (f'character_sums_n{n}', lambda n=n: check_character_sums(n)),
                (f'network_replay_n{n}', lambda n=n: check_network_replay(n)),
                (f'mapping_images_n{n}', lambda n=n: check_mapping_images(n)),
                (f'distribution_consistency_n{n}', lambda n=n: check_distribution_consistency(n)),
                (f'unbiasedness_fgu_n{n}', lambda n=n: check_unbiasedness(n, 'fgu')),
                (f'unbiasedness_nc_n{n}', lambda n=n: check_unbiasedness(n, 'nc')),
                (f'rdm_assembly_n{n}', lambda n=n: check_rdm_assembly(n)),
            ])
        out.append(('nc_eigenvalues', lambda: check_nc_eigenvalues(5 if quick else 8)))
        return out

    def run(self, quick: bool = False) -> ValidationReport:
        report = ValidationReport(quick)
        emit(Event.VALIDATE_START, log_event, quick=quick)
        for name, fn in self.checks(quick):
            try:
                reason = fn()
            except Exception as e:  # recorded as a failed check
                reason = f'{type(e).__name__}: {e}'
            result = CheckResult(name, not reason, reason)
            report.results.append(result)
            METRICS.inc(Metric.VALIDATION_CHECKS.value)
            emit(Event.VALIDATE_CHECK, log_event, check=name, passed=result.passed)
            if result.passed:
                self.logger.info('check %s passed', name)
            else:
                METRICS.inc(Metric.VALIDATION_FAILURES.value)
                emit(Event.VALIDATE_FAILURE, log_event, check=name, detail=reason)
                self.logger.error('check %s FAILED: %s', name, reason)
        emit(Event.VALIDATE_COMPLETE, log_event, quick=quick, passed=report.passed, failures=len(report.failures))
        return report


__all__ = [
    'CheckResult', 'ValidationReport', 'ValidationSuite', 'check_channel_eigenvalues', 'character_sums',
    'check_character_sums', 'expected_character_sum',
    'check_unbiasedness', 'check_distribution_consistency', 'check_network_replay', 'check_mapping_images',
    'check_rdm_assembly', 'check_nc_eigenvalues', 'check_counts',
]
