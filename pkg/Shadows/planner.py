"""Measurement planning: randomized coverage plans, deterministic strategy counts, time model.

Role:
    - coverage_plan samples settings until every even-degree target up to
      degree 2k has been covered at least r times (K_r = number of settings).
    - eqot / strategy_counts / swap_circuit_count give the setting counts of
      the deterministic swap-network strategies and the naive baseline.
    - time_model / time_comparison price both paradigms in wall-clock seconds.
    - allocation / reframed_variance handle Hamiltonian-averaging term weights.

Rounding:
    Fractional (2/3)^{2k} reductions are carried exactly and rounded up once at
    the total. ceil(log2 n) is (n - 1).bit_length().
"""
from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from Shadows.config import PLANNER_CONFIG, TIME_MODEL_DEFAULTS, VALIDATION_RULES
from Shadows.constants import Event, emit
from Shadows.core.metrics import timed
from Shadows.core.structured_logging import log_event
from Shadows.ensembles import NCSetting, PermSetting, act_on_tuple, inverse, sample_nc_setting, sample_perm_setting
from Shadows.majorana import MajoranaIndex, binomial, even_indices
from Shadows.mappings import Mapping, diagonal_set, get_mapping
from Shadows.nc_estimator import nc_covered

logger = logging.getLogger(__name__)

FGU = 'fgu'
NC = 'nc'


@dataclass
class CoveragePlan:
    ensemble: str
    n: int
    k: int
    r: int
    mapping: str
    settings: list[PermSetting | NCSetting] = field(default_factory=list)
    coverage: dict[MajoranaIndex, int] = field(default_factory=dict)

    @property
    def K_r(self) -> int:  # noqa: N802
        return len(self.settings)

    @property
    def min_coverage(self) -> int:
        return min(self.coverage.values()) if self.coverage else 0

    @property
    def mean_coverage(self) -> float:
        return sum(self.coverage.values()) / len(self.coverage) if self.coverage else 0.0

    def summary(self) -> dict[str, object]:
        return {
            'ensemble': self.ensemble,
            'n': self.n,
            'k': self.k,
            'r': self.r,
            'mapping': self.mapping,
            'K_r': self.K_r,
            'targets': len(self.coverage),
            'min_coverage': self.min_coverage,
            'mean_coverage': round(self.mean_coverage, 6),
        }


def all_targets(n: int, k: int) -> list[MajoranaIndex]:
    """Every even-degree Majorana index of degree 2..2k."""
    if not 1 <= k <= n:
        raise ValueError(f"requires 1 <= k <= n, got n={n} k={k}")
    return even_indices(n, 2 * k)


def _fgu_covered_targets(setting: PermSetting, diagonals: Sequence[MajoranaIndex]) -> list[MajoranaIndex]:
    inv = inverse(setting)
    return [act_on_tuple(inv, sigma)[1] for sigma in diagonals]


@timed()
def coverage_plan(
    n: int,
    k: int,
    ensemble: str,
    r: int,
    rng: np.random.Generator,
    mapping: Mapping | None = None,
) -> CoveragePlan:
    """Sample settings until each target is covered at least r times."""
    if r < 1:
        raise ValueError(f"coverage target r must be >= 1, got {r}")
    if ensemble not in VALIDATION_RULES['ensembles']:
        raise ValueError(f"unknown ensemble: {ensemble!r}")
    m = mapping or get_mapping('jw', n)
    targets = all_targets(n, k)
    counts = dict.fromkeys(targets, 0)
    below = len(targets)
    plan = CoveragePlan(ensemble, n, k, r, str(m.kind))
    emit(Event.PLAN_START, log_event, ensemble=ensemble, n=n, k=k, r=r, targets=len(targets))
    diagonals = [mu for j in range(1, k + 1) for mu in sorted(diagonal_set(n, j, m).members)]
    cap = int(PLANNER_CONFIG['max_settings'])
    while below:
        if plan.K_r >= cap:
            raise RuntimeError(f"coverage plan exceeded {cap} settings with {below} targets below r={r}")
        if ensemble == FGU:
            setting: PermSetting | NCSetting = sample_perm_setting(n, rng)
            hits: Iterable[MajoranaIndex] = _fgu_covered_targets(setting, diagonals)
        else:
            setting = sample_nc_setting(n, rng)
            hits = [mu for mu in targets if nc_covered(setting, mu, m)]
        plan.settings.append(setting)
        for mu in hits:
            counts[mu] += 1
            if counts[mu] == r:
                below -= 1
    plan.coverage = counts
    logger.info("coverage plan %s n=%d k=%d r=%d: K_r=%d", ensemble, n, k, r, plan.K_r)
    emit(Event.PLAN_COMPLETE, log_event, **plan.summary())
    return plan


def kr_sweep(
    n: int,
    k: int,
    ensemble: str,
    rs: Sequence[int],
    seeds: Sequence[int],
    mapping: Mapping | None = None,
) -> list[dict[str, object]]:
    """Rows (r, seed, K_r, K_r / r) for every r and seed."""
    rows: list[dict[str, object]] = []
    for r in rs:
        for seed in seeds:
            plan = coverage_plan(n, k, ensemble, r, np.random.default_rng(seed), mapping)
            rows.append({'r': r, 'seed': seed, 'K_r': plan.K_r, 'K_r_over_r': plan.K_r / r})
    return rows


def mean_kr_table(rows: Iterable[dict[str, object]]) -> dict[int, float]:
    """Mean K_r / r per r."""
    grouped: dict[int, list[float]] = {}
    for row in rows:
        grouped.setdefault(int(row['r']), []).append(float(row['K_r_over_r']))  # type: ignore[arg-type]
    return {r: float(np.mean(v)) for r, v in sorted(grouped.items())}


# ------------------- deterministic strategy counts -------------------

def _ceil_log2(n: int) -> int:
    return (n - 1).bit_length()


def eqot(k: int, n: int) -> int:
    """3^k (k - 1) sum_{m=0}^{ceil(log2 n) - 1} m^(k-2)."""
    if k < 2:
        raise ValueError(f"eqot requires k >= 2, got {k}")
    if n < 2:
        raise ValueError(f"eqot requires n >= 2, got {n}")
    return 3 ** k * (k - 1) * sum(m ** (k - 2) for m in range(_ceil_log2(n)))


def swap1_count(n: int) -> int:
    return 4 * math.ceil(n / 2) + 1


def swap_circuit_count(k: int, n: int) -> int:
    """C(n, k) swap circuits for the k-general protocol."""
    if n < k:
        raise ValueError(f"requires n >= k, got n={n} k={k}")
    return binomial(n, k)


def min_measurement_circuits(k: int, n: int) -> int:
    return swap_circuit_count(k, n) * 4 ** k


def naive_count(k: int, n: int) -> int:
    """3^{2k} times the upper triangle (with diagonal) of the C(n,k) supermatrix."""
    d = binomial(n, k)
    return 9 ** k * binomial(d + 1, 2)


EqotFn = Callable[[int, int], int]


def mt_count(k: int, n: int, eqot_fn: EqotFn = eqot) -> int:
    """Swap-network plus EQOT setting count for the k-RDM, k in {2, 3, 4}."""
    if k not in (2, 3, 4):
        raise ValueError(f"MT counts are defined for k in (2, 3, 4), got {k}")
    if n < 2 * k:
        raise ValueError(f"requires n >= 2k, got n={n} k={k}")
    total = Fraction(1 + 4 * binomial(n, 2))
    # lower-index blocks read every marginal; only the 2k-distinct block gets the XY reduction
    for j in range(2, k):
        total += binomial(n, j) * eqot_fn(k + j, n)
    total += binomial(n, k) * eqot_fn(2 * k, n) * Fraction(2, 3) ** (2 * k)
    return math.ceil(total)


def strategy_counts(k: int, n: int, eqot_fn: EqotFn = eqot) -> dict[str, int]:
    """Every applicable strategy count for (k, n)."""
    if k < 1 or n < 2 * k:
        raise ValueError(f"requires n >= 2k >= 2, got n={n} k={k}")
    out: dict[str, int] = {}
    if k == 1:
        out['swap1'] = swap1_count(n)
    else:
        out['eqot'] = eqot_fn(k, n)
    if k in (2, 3, 4):
        out['mt'] = mt_count(k, n, eqot_fn)
    out['swap-k'] = swap_circuit_count(k, n)
    out['naive'] = naive_count(k, n)
    return out


# ------------------- time model -------------------

@dataclass(frozen=True)
class TimeModel:
    """Measurement wall-clock parameters; settings is C (deterministic) or K_r (randomized)."""
    settings: int
    shots: float = TIME_MODEL_DEFAULTS['shots']
    f_samp: float = TIME_MODEL_DEFAULTS['f_samp']
    t_load: float = TIME_MODEL_DEFAULTS['t_load']
    r: int = 1

    def __post_init__(self) -> None:
        if self.settings < 1 or self.shots <= 0 or self.f_samp <= 0 or self.r < 1:
            raise ValueError(f"time model parameters must be positive: {self}")
        if self.t_load < 0:
            raise ValueError(f"t_load must be nonnegative, got {self.t_load}")


def time_model(tm: TimeModel, deterministic: bool) -> float:
    """C (S/f + t_load) or K_r (ceil(S/r)/f + t_load) seconds."""
    if deterministic:
        return tm.settings * (tm.shots / tm.f_samp + tm.t_load)
    return tm.settings * (math.ceil(tm.shots / tm.r) / tm.f_samp + tm.t_load)


def time_comparison(
    C: int,  # noqa: N803
    K_r: int,  # noqa: N803
    r: int,
    *,
    shots: float = TIME_MODEL_DEFAULTS['shots'],
    f_samp: float = TIME_MODEL_DEFAULTS['f_samp'],
    t_load: float = TIME_MODEL_DEFAULTS['t_load'],
) -> dict[str, float]:
    det = time_model(TimeModel(C, shots, f_samp, t_load), deterministic=True)
    rand = time_model(TimeModel(K_r, shots, f_samp, t_load, r), deterministic=False)
    return {'deterministic_s': det, 'randomized_s': rand, 'speedup': det / rand}


# ------------------- Hamiltonian averaging -------------------

def allocation(variances: Sequence[float]) -> np.ndarray:
    """p_l proportional to sqrt(V_l)."""
    v = np.asarray(variances, dtype=float)
    if v.size == 0 or np.any(v < 0):
        raise ValueError("variances must be a nonempty list of nonnegative reals")
    roots = np.sqrt(v)
    total = roots.sum()
    if total == 0:
        raise ValueError("allocation requires at least one positive variance")
    return roots / total


def reframed_variance(second_moments: Sequence[float], p: Sequence[float], total_expectation: float) -> float:
    """sum_l tr(O_l^2 rho) / p_l - tr(H rho)^2."""
    if len(second_moments) != len(p):
        raise ValueError(f"length mismatch: {len(second_moments)} moments vs {len(p)} weights")
    total = 0.0
    for moment, weight in zip(second_moments, p, strict=True):
        if weight <= 0:
            if moment != 0:
                raise ValueError("zero weight assigned to a term with nonzero second moment")
            continue
        total += moment / weight
    return total - total_expectation ** 2


__all__ = [
    'FGU', 'NC', 'CoveragePlan', 'all_targets', 'coverage_plan', 'kr_sweep', 'mean_kr_table', 'eqot',
    'swap1_count', 'swap_circuit_count', 'min_measurement_circuits', 'naive_count', 'mt_count',
    'strategy_counts', 'TimeModel', 'time_model', 'time_comparison', 'allocation', 'reframed_variance',
]
