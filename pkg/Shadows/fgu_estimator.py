"""Classical-shadow estimators for the fermionic Gaussian Clifford (FGU) ensemble.

Role:
    Exact channel eigenvalues, per-sample estimators, the coverage predicate,
    shadow norms for single operators and whole observables, and Bernstein
    sample budgeting.

Estimator:
    For a sample (Q, z) and target mu of degree 2k, (sign, sigma) = act_on_tuple(Q, mu)
    and the estimate is lambda_{n,k}^-1 * sign * <z|Gamma_sigma|z>, which is zero
    unless sigma is diagonal. Every estimate is an integer multiple of
    lambda^-1, so folds accumulate exact integer tallies and multiply by the
    rational scale once at the end. Uncovered samples contribute zero to the mean.
"""
from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TYPE_CHECKING, Protocol

from Shadows.constants import Metric
from Shadows.core.metrics import METRICS
from Shadows.ensembles import NCSetting, PermSetting, act_on_tuple
from Shadows.majorana import MajoranaIndex, binomial
from Shadows.mappings import Mapping, diag_matrix_element, is_diagonal_index

if TYPE_CHECKING:
    from Shadows.observables import ObservableDecomposition

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ChannelEigenvalue:
    n: int
    k: int
    value: Fraction


@dataclass(frozen=True)
class ShadowSample:
    """One measurement setting and its outcome bitstring (qubit 0 first)."""
    setting: PermSetting | NCSetting
    outcome: str

    def __post_init__(self) -> None:
        if len(self.outcome) != self.setting.n or any(c not in '01' for c in self.outcome):
            raise ValueError(f"outcome {self.outcome!r} is not a {self.setting.n}-bit string")


@dataclass(frozen=True)
class EstimationPlan:
    epsilon: float
    delta: float
    L: int
    max_norm_sq: float
    M: int


def _check_k(n: int, k: int) -> None:
    if not 1 <= k <= n:
        raise ValueError(f"degree index k must satisfy 1 <= k <= n, got n={n} k={k}")


def channel_eigenvalue(n: int, k: int) -> ChannelEigenvalue:
    _check_k(n, k)
    return ChannelEigenvalue(n, k, Fraction(binomial(n, k), binomial(2 * n, 2 * k)))


def shadow_norm_sq(n: int, k: int) -> Fraction:
    _check_k(n, k)
    return Fraction(binomial(2 * n, 2 * k), binomial(n, k))


def stirling_norm_sq(n: int, k: int) -> float:
    """Large-n approximation C(n,k) sqrt(pi k) of the shadow norm."""
    _check_k(n, k)
    return binomial(n, k) * math.sqrt(math.pi * k)


def pauli_shadow_norm_sq(locality: int) -> int:
    """Shadow norm of a Pauli string under random single-qubit Clifford measurements."""
    if locality < 0:
        raise ValueError("locality must be nonnegative")
    return 3 ** locality


def _inverse_eigenvalue(n: int, degree: int) -> Fraction:
    if degree == 0:
        return Fraction(1)
    return shadow_norm_sq(n, degree // 2)


def estimate_tally(sample: ShadowSample, mu: MajoranaIndex, m: Mapping) -> int:
    """sign * <z|Gamma_sigma|z> in {-1, 0, 1}; the estimate is this times lambda^-1."""
    if not isinstance(sample.setting, PermSetting):
        raise TypeError("FGU estimator requires a PermSetting sample")
    if len(mu) % 2:
        raise ValueError(f"odd-degree target {mu}")
    if not mu:
        return 1
    sign, sigma = act_on_tuple(sample.setting, mu)
    if not is_diagonal_index(sigma):
        return 0
    return sign * diag_matrix_element(sigma, sample.outcome, m)


def estimate_majorana(sample: ShadowSample, mu: MajoranaIndex, m: Mapping) -> float:
    tally = estimate_tally(sample, mu, m)
    if tally == 0:
        return 0.0
    return float(_inverse_eigenvalue(sample.setting.n, len(mu))) * tally


def covered(setting: PermSetting, mu: MajoranaIndex, m: Mapping) -> bool:
    """True iff the sorted image of mu under the setting is diagonal."""
    if setting.n != m.n:
        raise ValueError("setting and mapping disagree on the mode count")
    _, sigma = act_on_tuple(setting, mu)
    return is_diagonal_index(sigma)


def bernstein_samples(epsilon: float, delta: float, L: int, max_norm_sq: float) -> int:
    """ceil((1 + eps/3) * 2 ln(2L/delta) / eps^2 * max_norm_sq)."""
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if L < 1:
        raise ValueError(f"L must be >= 1, got {L}")
    if max_norm_sq <= 0:
        raise ValueError(f"max_norm_sq must be positive, got {max_norm_sq}")
    value = (1 + epsilon / 3) * 2 * math.log(2 * L / delta) / epsilon ** 2 * float(max_norm_sq)
    return max(1, math.ceil(value))


def rdm_observable_count(n: int, k: int) -> int:
    """Number of even-degree Majorana targets of degree 2..2k."""
    _check_k(n, k)
    return sum(binomial(2 * n, 2 * j) for j in range(1, k + 1))


def rdm_sample_budget(n: int, k: int, epsilon: float, delta: float) -> EstimationPlan:
    """Bernstein budget for every Majorana operator of degree <= 2k."""
    L = rdm_observable_count(n, k)
    worst = max(shadow_norm_sq(n, j) for j in range(1, k + 1))
    M = bernstein_samples(epsilon, delta, L, float(worst))
    return EstimationPlan(epsilon, delta, L, float(worst), M)


# ------------------- folding -------------------

class _TallyFn(Protocol):
    def __call__(self, sample: ShadowSample, mu: MajoranaIndex) -> int: ...


@dataclass
class FoldAccumulator:
    """Associative per-target integer tallies of estimator numerators."""
    sums: dict[MajoranaIndex, int] = field(default_factory=dict)
    nonzero: dict[MajoranaIndex, int] = field(default_factory=dict)
    samples: int = 0

    def add(self, mu: MajoranaIndex, tally: int) -> None:
        if tally:
            self.sums[mu] = self.sums.get(mu, 0) + tally
            self.nonzero[mu] = self.nonzero.get(mu, 0) + 1

    def merge(self, other: FoldAccumulator) -> FoldAccumulator:
        out = FoldAccumulator(dict(self.sums), dict(self.nonzero), self.samples + other.samples)
        for mu, s in other.sums.items():
            out.sums[mu] = out.sums.get(mu, 0) + s
        for mu, c in other.nonzero.items():
            out.nonzero[mu] = out.nonzero.get(mu, 0) + c
        return out

    def means(self, targets: Iterable[MajoranaIndex], scale: dict[MajoranaIndex, Fraction]) -> dict[MajoranaIndex, tuple[float, int]]:
        if self.samples == 0:
            raise ValueError("no samples folded")
        return {
            mu: (float(scale[mu] * Fraction(self.sums.get(mu, 0), self.samples)), self.nonzero.get(mu, 0))
            for mu in targets
        }


def fold_samples(samples: Sequence[ShadowSample], targets: Sequence[MajoranaIndex], tally: _TallyFn) -> FoldAccumulator:
    acc = FoldAccumulator()
    for s in samples:
        for mu in targets:
            acc.add(mu, tally(s, mu))
        acc.samples += 1
    METRICS.inc(Metric.ESTIMATES_FOLDED.value, len(samples) * len(targets))
    return acc


def parallel_fold(samples: Sequence[ShadowSample], targets: Sequence[MajoranaIndex], tally: _TallyFn, workers: int = 1) -> FoldAccumulator:
    """Fold contiguous chunks concurrently and merge in chunk order (exact integer sums)."""
    if workers <= 1 or len(samples) < 2 * workers:
        return fold_samples(samples, targets, tally)
    size = math.ceil(len(samples) / workers)
    chunks = [samples[i:i + size] for i in range(0, len(samples), size)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda c: fold_samples(c, targets, tally), chunks))
    out = FoldAccumulator()
    for p in parts:
        out = out.merge(p)
    return out


def estimate_all(samples: Sequence[ShadowSample], targets: Iterable[MajoranaIndex], m: Mapping, *, workers: int = 1) -> dict[MajoranaIndex, tuple[float, int]]:
    """Sample mean and covering-sample count for every target."""
    if not samples:
        raise ValueError("estimate_all requires at least one sample")
    tlist = list(targets)
    n = samples[0].setting.n
    acc = parallel_fold(samples, tlist, lambda s, mu: estimate_tally(s, mu, m), workers)
    scale = {mu: _inverse_eigenvalue(n, len(mu)) for mu in tlist}
    logger.debug("folded %d FGU samples over %d targets", len(samples), len(tlist))
    return acc.means(tlist, scale)


# ------------------- observable norms -------------------

def shadow_norm_observable(h: ObservableDecomposition) -> float:
    """sum_k lambda_{n,k}^-1 sum_{|mu| = 2k} h_mu^2 (identity coefficient ignored)."""
    total = 0.0
    for mu, c in h.coefficients.items():
        if not mu:
            continue
        total += float(_inverse_eigenvalue(h.n, len(mu))) * c * c
    return total


def variance_exact(h: ObservableDecomposition, true_expectation: float) -> float:
    """Single-shot estimator variance of the traceless part of h.

    true_expectation is tr(O rho) of the traceless part; zero observables give 0.
    """
    if not any(mu for mu in h.coefficients):
        return 0.0
    return shadow_norm_observable(h) - true_expectation ** 2


__all__ = [
    'ChannelEigenvalue', 'ShadowSample', 'EstimationPlan', 'FoldAccumulator', 'channel_eigenvalue',
    'shadow_norm_sq', 'stirling_norm_sq', 'pauli_shadow_norm_sq', 'estimate_tally', 'estimate_majorana',
    'covered', 'bernstein_samples', 'rdm_observable_count', 'rdm_sample_budget', 'fold_samples',
    'parallel_fold', 'estimate_all', 'shadow_norm_observable', 'variance_exact',
]
