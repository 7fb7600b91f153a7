"""Number-conserving (NC) ensemble: eigenvalues, estimators and norm bounds.

Role:
    lambda_mu = E_{u in Alt(n)} 3^{-loc(u(mu))} computed exactly (rational) or by
    Monte Carlo, the per-sample estimator for (u, basis, z) samples, the
    closed-form upper bound on the shadow norm and the hypergeometric
    expression for the maximal-locality average.

Exact enumeration:
    When n >= m + 2 (m = number of distinct modes in mu) Alt(n) acts uniformly
    on ordered m-tuples of distinct modes, so the average runs over injections
    of the support; otherwise all of Alt(n) is enumerated. Either way the
    enumeration size must stay under NC_CONFIG['exact_enumeration_limit'].

Side Effects:
    Exact eigenvalues are cached per (mapping, mu); the cache is filled by a
    single writer under a lock and read freely afterwards. Emits
    shadows.nc.eigenvalue events and METRICS counters.
"""
from __future__ import annotations

import logging
import math
import threading
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations, product

import numpy as np

from Shadows.config import NC_CONFIG
from Shadows.constants import Event, Metric, emit
from Shadows.core.metrics import METRICS
from Shadows.core.structured_logging import log_event
from Shadows.ensembles import NCSetting, enumerate_alt, mode_perm_image, sample_alt
from Shadows.fgu_estimator import FoldAccumulator, ShadowSample, parallel_fold
from Shadows.majorana import MajoranaIndex, binomial
from Shadows.mappings import Mapping, MappingError, bits_to_int, locality, qubit_mask_to_index_mask, to_pauli

logger = logging.getLogger(__name__)

EXACT = 'exact'
MONTE_CARLO = 'monte-carlo'


class EnumerationLimitError(ValueError):
    """Exact eigenvalue enumeration would exceed the configured limit."""


class EigenvalueAccuracyError(ValueError):
    """Monte Carlo eigenvalue relative standard error exceeds the configured limit."""


@dataclass(frozen=True)
class NCEigenvalue:
    mu: MajoranaIndex
    mapping: str
    n: int
    value: Fraction | float
    method: str = EXACT
    n_samples: int | None = None
    std_error: float = 0.0

    @property
    def inverse(self) -> float:
        return float(1 / Fraction(self.value)) if isinstance(self.value, Fraction) else 1.0 / self.value


_cache: dict[tuple[Mapping, MajoranaIndex], NCEigenvalue] = {}
_cache_lock = threading.Lock()


def clear_eigenvalue_cache() -> None:  # test helper
    with _cache_lock:
        _cache.clear()


def _support_modes(mu: MajoranaIndex) -> list[int]:
    return sorted({g // 2 for g in mu})


def exact_enumeration_size(n: int, mu: MajoranaIndex) -> int:
    m = len(_support_modes(mu))
    if n >= m + 2:
        return math.perm(n, m)
    return math.factorial(n) // 2 if n >= 2 else 1


def _image(mu: MajoranaIndex, assign: dict[int, int]) -> MajoranaIndex:
    return tuple(sorted(2 * assign[g // 2] + (g & 1) for g in mu))


def _exact_value(mu: MajoranaIndex, m: Mapping) -> Fraction:
    n = m.n
    modes = _support_modes(mu)
    size = exact_enumeration_size(n, mu)
    limit = NC_CONFIG['exact_enumeration_limit']
    if size > limit:
        raise EnumerationLimitError(f"exact enumeration needs {size} terms (limit {limit}); use monte-carlo")
    total = Fraction(0)
    if n >= len(modes) + 2:
        for targets in permutations(range(n), len(modes)):
            total += Fraction(1, 3 ** locality(_image(mu, dict(zip(modes, targets, strict=True))), m))
    else:
        for u in enumerate_alt(n):
            total += Fraction(1, 3 ** locality(_image(mu, {q: u[q] for q in modes}), m))
    return total / size


def _monte_carlo_value(mu: MajoranaIndex, m: Mapping, n_samples: int, rng: np.random.Generator) -> tuple[float, float]:
    modes = _support_modes(mu)
    values = np.empty(n_samples)
    for i in range(n_samples):
        u = sample_alt(m.n, rng)
        values[i] = 3.0 ** -locality(_image(mu, {q: u[q] for q in modes}), m)
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(n_samples)) if n_samples > 1 else math.inf
    return mean, stderr


def nc_eigenvalue(
    mu: MajoranaIndex,
    m: Mapping,
    method: str = EXACT,
    *,
    n_samples: int | None = None,
    rng: np.random.Generator | None = None,
    enforce_accuracy: bool = True,
) -> NCEigenvalue:
    """lambda_mu = E_u[3^{-loc(u(mu))}] over u in Alt(n)."""
    if len(mu) % 2 or not mu:
        raise ValueError(f"NC eigenvalues are defined for nonempty even-degree indices, got {mu}")
    to_pauli(mu, m)  # validates mu against the mapping
    if method == EXACT:
        key = (m, tuple(mu))
        cached = _cache.get(key)
        if cached is not None:
            METRICS.inc(Metric.NC_EIGENVALUE_CACHE_HITS.value)
            return cached
        value = _exact_value(tuple(mu), m)
        result = NCEigenvalue(tuple(mu), str(m.kind), m.n, value, EXACT)
        with _cache_lock:
            _cache.setdefault(key, result)
        METRICS.inc(Metric.NC_EIGENVALUES_COMPUTED.value)
        return result
    if method != MONTE_CARLO:
        raise ValueError(f"unknown eigenvalue method: {method!r}")
    samples = n_samples or NC_CONFIG['mc_samples']
    gen = rng if rng is not None else np.random.default_rng(0)
    mean, stderr = _monte_carlo_value(tuple(mu), m, samples, gen)
    rel = stderr / mean if mean > 0 else math.inf
    if enforce_accuracy and rel > NC_CONFIG['mc_max_rel_stderr']:
        raise EigenvalueAccuracyError(
            f"relative std-error {rel:.4f} exceeds {NC_CONFIG['mc_max_rel_stderr']} for {mu}; raise n_samples"
        )
    METRICS.inc(Metric.NC_EIGENVALUES_COMPUTED.value)
    emit(Event.NC_EIGENVALUE, log_event, mu=list(mu), mapping=str(m.kind), value=mean, std_error=stderr, n_samples=samples)
    return NCEigenvalue(tuple(mu), str(m.kind), m.n, mean, MONTE_CARLO, samples, stderr)


def nc_shadow_norm_sq(mu: MajoranaIndex, m: Mapping, method: str = EXACT, **kwargs: object) -> float:
    return nc_eigenvalue(mu, m, method, **kwargs).inverse  # type: ignore[arg-type]


# ------------------- estimator -------------------

def nc_covered(setting: NCSetting, mu: MajoranaIndex, m: Mapping) -> bool:
    """True iff the basis letters agree with the Pauli image of u(mu) on its support."""
    if setting.n != m.n:
        raise MappingError("setting and mapping disagree on the mode count")
    _, image = mode_perm_image(setting.u, mu)
    letters = to_pauli(image, m).letters
    return all(c == 'I' or c == b for c, b in zip(letters, setting.basis, strict=True))


def estimate_tally_nc(sample: ShadowSample, mu: MajoranaIndex, m: Mapping) -> int:
    """sign * phase * prod (-1)^{z_j} on a basis match, else 0."""
    setting = sample.setting
    if not isinstance(setting, NCSetting):
        raise TypeError("NC estimator requires an NCSetting sample")
    if not mu:
        return 1
    sign, image = mode_perm_image(setting.u, mu)
    p = to_pauli(image, m)
    letters = p.letters
    basis = setting.basis
    for j, c in enumerate(letters):
        if c != 'I' and c != basis[j]:
            return 0
    z = bits_to_int(sample.outcome, m.n)
    parity = (z & qubit_mask_to_index_mask(p.support, m.n)).bit_count() & 1
    e = p.letter_phase_exp
    if e % 2:
        raise MappingError(f"Pauli image of {image} is not Hermitian")
    value = -1 if parity else 1
    return sign * (value if e == 0 else -value)


def estimate_majorana_nc(sample: ShadowSample, mu: MajoranaIndex, m: Mapping, lam: NCEigenvalue) -> float:
    if lam.mapping != str(m.kind) or lam.n != m.n or lam.mu != tuple(mu):
        raise MappingError(f"eigenvalue computed for ({lam.mapping}, {lam.mu}), not ({m.kind}, {mu})")
    tally = estimate_tally_nc(sample, mu, m)
    return lam.inverse * tally if tally else 0.0


def estimate_all_nc(
    samples: Sequence[ShadowSample],
    targets: Iterable[MajoranaIndex],
    m: Mapping,
    eigenvalues: dict[MajoranaIndex, NCEigenvalue],
    *,
    workers: int = 1,
) -> dict[MajoranaIndex, tuple[float, int]]:
    if not samples:
        raise ValueError("estimate_all_nc requires at least one sample")
    tlist = list(targets)
    acc: FoldAccumulator = parallel_fold(samples, tlist, lambda s, mu: estimate_tally_nc(s, mu, m), workers)
    scale: dict[MajoranaIndex, Fraction] = {}
    for mu in tlist:
        if not mu:
            scale[mu] = Fraction(1)
            continue
        lam = eigenvalues.get(mu)
        if lam is None:
            raise MappingError(f"missing NC eigenvalue for {mu}")
        scale[mu] = 1 / Fraction(lam.value)
    return acc.means(tlist, scale)


# ------------------- bounds -------------------

def _check_nk(n: int, k: int) -> None:
    if k < 1 or n < 2 * k:
        raise ValueError(f"requires n >= 2k >= 2, got n={n} k={k}")


def nc_upper_bound(n: int, k: int) -> Fraction:
    """9^k C(n,2k) / C(n-k,k)."""
    _check_nk(n, k)
    return Fraction(9 ** k * binomial(n, 2 * k), binomial(n - k, k))


def _rising(a: int, ell: int) -> int:
    out = 1
    for i in range(ell):
        out *= a + i
    return out


def hypergeometric_factor(n: int, k: int) -> Fraction:
    """Terminating 2F1(k, 2k-n; k-n; 1/3)."""
    _check_nk(n, k)
    total = Fraction(0)
    for ell in range(n - 2 * k + 1):
        num = _rising(k, ell) * _rising(2 * k - n, ell)
        den = _rising(k - n, ell) * math.factorial(ell) * 3 ** ell
        total += Fraction(num, den)
    return total


def max_locality_average_exact(n: int, k: int) -> Fraction:
    _check_nk(n, k)
    return Fraction(binomial(n - k, k), binomial(n, 2 * k) * 9 ** k) * hypergeometric_factor(n, k)


def max_locality_average(n: int, k: int) -> float:
    """E over Sym(n) of 3^{-loc} for a maximally nonlocal degree-2k JW operator."""
    return float(max_locality_average_exact(n, k))


def sym_locality_average(mu: MajoranaIndex, m: Mapping) -> Fraction:
    """Brute-force E over Sym(n) of 3^{-loc(u(mu))} (cross-check for the closed form)."""
    modes = _support_modes(mu)
    total = Fraction(0)
    count = 0
    for u in permutations(range(m.n)):
        total += Fraction(1, 3 ** locality(_image(mu, {q: u[q] for q in modes}), m))
        count += 1
    return total / count


# ------------------- sweeps -------------------

def _type_representatives(n: int, k: int) -> list[MajoranaIndex]:
    """One index per ordered per-mode pattern sequence, on modes 0..m-1."""
    reps: list[MajoranaIndex] = []
    patterns = ((0,), (1,), (0, 1))
    for m_modes in range(k, 2 * k + 1):
        for seq in product(patterns, repeat=m_modes):
            if sum(len(p) for p in seq) != 2 * k:
                continue
            reps.append(tuple(2 * q + x for q, pat in enumerate(seq) for x in pat))
    return reps


def candidate_indices(n: int, k: int) -> list[MajoranaIndex]:
    """Degree-2k indices whose eigenvalues cover every distinct value.

    With n >= 2k + 2 the eigenvalue depends only on the ordered pattern of the
    support, so one representative per pattern suffices.
    """
    if n >= 2 * k + 2:
        return _type_representatives(n, k)
    return list(combinations(range(2 * n), 2 * k))


def max_nc_shadow_norm_sq(n: int, k: int, m: Mapping, method: str = EXACT, **kwargs: object) -> tuple[MajoranaIndex, float]:
    """Largest lambda_mu^-1 over degree-2k operators."""
    if m.n != n:
        raise MappingError(f"mapping built for {m.n} modes, asked for {n}")
    best_mu: MajoranaIndex = ()
    best = -math.inf
    for mu in candidate_indices(n, k):
        value = nc_shadow_norm_sq(mu, m, method, **kwargs)
        if value > best:
            best, best_mu = value, mu
    logger.info("max NC shadow norm^2 n=%d k=%d mapping=%s: %.4f at %s", n, k, m.kind, best, best_mu)
    return best_mu, best


def eigenvalue_table(mus: Iterable[MajoranaIndex], m: Mapping, method: str = EXACT, **kwargs: object) -> list[dict[str, object]]:
    rows = []
    for mu in mus:
        lam = nc_eigenvalue(mu, m, method, **kwargs)  # type: ignore[arg-type]
        rows.append({
            'mu': ' '.join(str(g) for g in mu),
            'mapping': lam.mapping,
            'value': float(lam.value),
            'method': lam.method,
            'std_error': lam.std_error,
        })
    return rows


__all__ = [
    'EXACT', 'MONTE_CARLO', 'EnumerationLimitError', 'EigenvalueAccuracyError', 'NCEigenvalue',
    'clear_eigenvalue_cache', 'exact_enumeration_size', 'nc_eigenvalue', 'nc_shadow_norm_sq',
    'nc_covered', 'estimate_tally_nc', 'estimate_majorana_nc', 'estimate_all_nc', 'nc_upper_bound', 'hypergeometric_factor',
    'max_locality_average_exact', 'max_locality_average', 'sym_locality_average', 'candidate_indices',
    'max_nc_shadow_norm_sq', 'eigenvalue_table',
]
