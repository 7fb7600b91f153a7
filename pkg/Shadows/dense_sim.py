"""Exact desk-scale simulator used as the oracle for estimators and planners.

Role:
    Dense 2^n matrices in the Jordan-Wigner (Fock) picture: Majorana operators,
    setting unitaries, outcome distributions for both ensembles, Majorana
    expectations, brute-force k-RDMs and reference states.

Pictures:
    States always live in the Fock picture (qubit j = occupation of mode j,
    qubit 0 = most significant index bit). Outcome distributions are reported
    in the qubit picture of the requested mapping: the Fock distribution is
    relabelled through the linear encoding b = beta n, and NC basis rotations
    act after that relabelling.

Side Effects:
    Increments METRICS['dense_unitaries_built'] and ['shots_simulated'].

Failure Handling:
    Size caps from SIMULATION_CONFIG raise DenseSizeError. A setting unitary
    whose adjoint action does not match its permutation raises RuntimeError.
"""
from __future__ import annotations

import logging
import math
from collections.abc import Mapping as TypingMapping
from collections.abc import Sequence
from dataclasses import dataclass
from functools import lru_cache
from typing import TYPE_CHECKING, Any

import numpy as np
from scipy.linalg import expm

from Shadows.config import SIMULATION_CONFIG
from Shadows.constants import Metric
from Shadows.core.metrics import METRICS
from Shadows.ensembles import (
    NCSetting,
    PermSetting,
    act_on_tuple,
    decompose_transpositions,
    expand_mode_perm,
    inverse,
)
from Shadows.majorana import MajoranaIndex, colex_combinations, even_indices, rank_combination, rdm_operator
from Shadows.mappings import (
    Mapping,
    MappingKind,
    PauliString,
    diag_matrix_element,
    diagonal_set,
    get_mapping,
    int_to_bits,
)

if TYPE_CHECKING:
    from Shadows.observables import ObservableDecomposition

logger = logging.getLogger(__name__)

_PAULI = {
    'I': np.eye(2, dtype=complex),
    'X': np.array([[0, 1], [1, 0]], dtype=complex),
    'Y': np.array([[0, -1j], [1j, 0]], dtype=complex),
    'Z': np.array([[1, 0], [0, -1]], dtype=complex),
}
_HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_S_DAG = np.array([[1, 0], [0, -1j]], dtype=complex)
# V with V^dag Z V equal to the measured Pauli
_BASIS_ROTATION = {
    'X': _HADAMARD,
    'Y': _HADAMARD @ _S_DAG,
    'Z': np.eye(2, dtype=complex),
}


class DenseSizeError(ValueError):
    """Requested dense object exceeds the configured mode cap."""


def _check_size(n: int, cap_key: str = 'max_dense_modes') -> None:
    cap = SIMULATION_CONFIG[cap_key]
    if n > cap:
        raise DenseSizeError(f"dense simulation limited to {cap} modes, got {n}")


def _kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = np.kron(out, m)
    return out


@dataclass(frozen=True)
class DenseState:
    n: int
    rho: np.ndarray

    def __post_init__(self) -> None:
        dim = 1 << self.n
        if self.rho.shape != (dim, dim):
            raise ValueError(f"density matrix must be {dim}x{dim}, got {self.rho.shape}")
        tol = SIMULATION_CONFIG['state_tolerance']
        if abs(np.trace(self.rho) - 1) > tol:
            raise ValueError("density matrix must have unit trace")
        if np.max(np.abs(self.rho - self.rho.conj().T)) > tol:
            raise ValueError("density matrix must be Hermitian")
        if np.min(np.linalg.eigvalsh(self.rho)) < -SIMULATION_CONFIG['psd_tolerance']:
            raise ValueError("density matrix must be positive semidefinite")

    @classmethod
    def from_amplitudes(cls, amplitudes: Sequence[complex]) -> DenseState:
        psi = np.asarray(amplitudes, dtype=complex)
        n = int(round(math.log2(psi.size))) if psi.size else -1
        if n < 0 or (1 << n) != psi.size:
            raise ValueError(f"amplitude vector length {psi.size} is not a power of two")
        norm = np.linalg.norm(psi)
        if norm == 0:
            raise ValueError("amplitude vector is zero")
        psi = psi / norm
        return cls(n, np.outer(psi, psi.conj()))


@dataclass(frozen=True)
class RDMTensor:
    """k-RDM stored as a C(n,k) x C(n,k) matrix over colex-ranked mode tuples.

    entry(p, q) = tr(a^dag_{p1}..a^dag_{pk} a_{qk}..a_{q1} rho).
    """
    n: int
    k: int
    matrix: np.ndarray

    def entry(self, p: Sequence[int], q: Sequence[int]) -> complex:
        return complex(self.matrix[rank_combination(sorted(p)), rank_combination(sorted(q))])

    def combinations(self) -> list[tuple[int, ...]]:
        return list(colex_combinations(self.n, self.k))

    def hermiticity_residual(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.conj().T))) if self.matrix.size else 0.0


# ------------------- operators -------------------

@lru_cache(maxsize=256)
def _gamma_cached(idx: int, n: int) -> np.ndarray:
    mats = [_PAULI['Z']] * (idx // 2) + [_PAULI['X'] if idx % 2 == 0 else _PAULI['Y']] + [_PAULI['I']] * (n - idx // 2 - 1)
    out = _kron_all(mats)
    out.setflags(write=False)
    return out


def gamma_dense(idx: int, n: int) -> np.ndarray:
    """Jordan-Wigner matrix of gamma_idx."""
    _check_size(n, 'max_gamma_modes')
    if not 0 <= idx < 2 * n:
        raise ValueError(f"Majorana index {idx} outside [0, {2 * n})")
    return _gamma_cached(idx, n)


def majorana_dense(mu: MajoranaIndex, n: int) -> np.ndarray:
    out = np.eye(1 << n, dtype=complex)
    for g in mu:
        out = out @ gamma_dense(g, n)
    k = len(mu)
    return out * (-1j) ** (k * (k - 1) // 2)


def pauli_dense(p: PauliString) -> np.ndarray:
    return p.phase * _kron_all([_PAULI[c] for c in p.letters])


def annihilator_dense(p: int, n: int) -> np.ndarray:
    return (gamma_dense(2 * p, n) + 1j * gamma_dense(2 * p + 1, n)) / 2


def operator_sequence_dense(ops: Sequence[tuple[int, bool]], n: int) -> np.ndarray:
    out = np.eye(1 << n, dtype=complex)
    for mode, dagger in ops:
        a = annihilator_dense(mode, n)
        out = out @ (a.conj().T if dagger else a)
    return out


def observable_dense(h: ObservableDecomposition) -> np.ndarray:
    out = h.identity * np.eye(1 << h.n, dtype=complex)
    for mu, c in h.coefficients.items():
        out = out + c * majorana_dense(mu, h.n)
    return out


def encoding_index_map(m: Mapping) -> np.ndarray:
    """perm[f] = qubit basis index of Fock basis index f under the mapping."""
    dim = 1 << m.n
    if m.kind is MappingKind.JORDAN_WIGNER:
        return np.arange(dim)
    return np.array([m.encode_bits(f) for f in range(dim)])


def encoding_unitary(m: Mapping) -> np.ndarray:
    """E with E|n> = |beta n>, so dense(to_pauli(mu, m)) = E Gamma_mu E^dag."""
    dim = 1 << m.n
    e = np.zeros((dim, dim), dtype=complex)
    e[encoding_index_map(m), np.arange(dim)] = 1
    return e


# ------------------- setting unitaries -------------------

@lru_cache(maxsize=512)
def _swap_rotation(a: int, n: int) -> np.ndarray:
    gen = (np.pi / 4) * (gamma_dense(a, n) @ gamma_dense(a + 1, n))
    out = expm(gen)
    out.setflags(write=False)
    return out


def adjoint_matrix(u: np.ndarray, n: int) -> np.ndarray:
    """S[mu, nu] = tr(gamma_nu U^dag gamma_mu U) / 2^n."""
    d = 2 * n
    dim = 1 << n
    gammas = [gamma_dense(j, n) for j in range(d)]
    s = np.zeros((d, d))
    for mu in range(d):
        conj = u.conj().T @ gammas[mu] @ u
        for nu in range(d):
            s[mu, nu] = np.real(np.trace(gammas[nu] @ conj)) / dim
    return s


def build_setting_unitary(setting: PermSetting) -> np.ndarray:
    """Fermionic Gaussian unitary U with U^dag gamma_mu U = sum_nu Q_{mu nu} gamma_nu.

    Each transposition layer contributes exp((pi/4) gamma_a gamma_{a+1}) factors,
    which realize Q up to signs; a product of gamma pairs then flips the
    (evenly many) wrong signs, so the adjoint action is exactly Q.
    """
    n = setting.n
    _check_size(n)
    dim = 1 << n
    network = decompose_transpositions(setting)
    u = np.eye(dim, dtype=complex)
    for layer in network.layers:
        for a in layer:
            u = u @ _swap_rotation(a, n)
    if network.depth == 0:
        METRICS.inc(Metric.DENSE_UNITARIES_BUILT.value)
        return u
    q = setting.matrix()
    s = adjoint_matrix(u, n)
    tol = SIMULATION_CONFIG['adjoint_tolerance']
    if np.max(np.abs(np.abs(s) - q)) > tol:
        raise RuntimeError("transposition network does not realize the setting permutation")
    flipped = [int(setting.pi[j]) for j in range(2 * n) if s[setting.pi[j], j] < 0]
    if len(flipped) % 2:
        raise RuntimeError("odd number of sign flips; setting is not in the rotation group")
    w = np.eye(dim, dtype=complex)
    for a, b in zip(flipped[::2], flipped[1::2], strict=True):
        w = w @ gamma_dense(a, n) @ gamma_dense(b, n)
    logger.debug("setting unitary n=%d depth=%d sign_flips=%d", n, network.depth, len(flipped))
    METRICS.inc(Metric.DENSE_UNITARIES_BUILT.value)
    return w @ u


def nc_unitary(setting: NCSetting, m: Mapping) -> np.ndarray:
    """Qubit-picture unitary V E R_u applied to Fock-picture states."""
    r = build_setting_unitary(PermSetting(setting.n, expand_mode_perm(setting.u)))
    v = _kron_all([_BASIS_ROTATION[c] for c in setting.basis])
    return v @ encoding_unitary(m) @ r


# ------------------- distributions -------------------

def _as_rho(state: DenseState | np.ndarray) -> tuple[int, np.ndarray]:
    if isinstance(state, DenseState):
        return state.n, state.rho
    rho = np.asarray(state)
    return int(round(math.log2(rho.shape[0]))), rho


def outcome_distribution(state: DenseState | np.ndarray, setting: PermSetting | NCSetting, mapping: Mapping | None = None) -> np.ndarray:
    """Probability of each qubit outcome index after applying the setting."""
    n, rho = _as_rho(state)
    _check_size(n)
    m = mapping or get_mapping('jw', n)
    if isinstance(setting, PermSetting):
        u = build_setting_unitary(setting)
        fock = np.real(np.einsum('ij,jk,ik->i', u, rho, u.conj()))
        probs = np.zeros(1 << n)
        probs[encoding_index_map(m)] = fock
    else:
        u = nc_unitary(setting, m)
        probs = np.real(np.einsum('ij,jk,ik->i', u, rho, u.conj()))
    probs = np.clip(probs, 0.0, None)
    total = probs.sum()
    if abs(total - 1) > SIMULATION_CONFIG['probability_tolerance']:
        raise RuntimeError(f"outcome distribution not normalized (sum={total})")
    return probs / total


def expansion_distribution(g: TypingMapping[MajoranaIndex, float], setting: PermSetting, mapping: Mapping) -> np.ndarray:
    """p(z) = 2^-n sum over diagonal mu of <z|Gamma_mu|z> det[Q_{mu,tau}] g_tau.

    Independent of dense unitaries: uses only diagonal sets, subdeterminants
    and Majorana expectations.
    """
    n = setting.n
    inv = inverse(setting)
    terms: list[tuple[MajoranaIndex, float]] = []
    for k in range(1, n + 1):
        for mu in diagonal_set(n, k, mapping).members:
            sign, tau = act_on_tuple(inv, mu)
            terms.append((mu, sign * g[tau]))
    probs = np.zeros(1 << n)
    for z in range(1 << n):
        total = 1.0
        for mu, weight in terms:
            total += diag_matrix_element(mu, z, mapping) * weight
        probs[z] = total / (1 << n)
    return probs


def sample_outcomes(probs: np.ndarray, shots: int, rng: np.random.Generator) -> list[str]:
    """Inverse-CDF sampling of outcome bitstrings."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    n = int(round(math.log2(probs.size)))
    cdf = np.cumsum(probs)
    cdf[-1] = 1.0
    idx = np.searchsorted(cdf, rng.random(shots), side='right')
    idx = np.minimum(idx, probs.size - 1)
    METRICS.inc(Metric.SHOTS_SIMULATED.value, shots)
    return [int_to_bits(int(i), n) for i in idx]


# ------------------- expectations and RDMs -------------------

def exact_majorana_expectations(state: DenseState | np.ndarray, max_degree: int) -> dict[MajoranaIndex, float]:
    """g_mu = tr(Gamma_mu rho) for every even mu up to max_degree (identity included)."""
    n, rho = _as_rho(state)
    _check_size(n)
    out: dict[MajoranaIndex, float] = {}
    for mu in even_indices(n, min(max_degree, 2 * n), include_identity=True):
        out[mu] = float(np.real(np.trace(majorana_dense(mu, n) @ rho)))
    return out


def exact_rdm(state: DenseState | np.ndarray, k: int) -> RDMTensor:
    n, rho = _as_rho(state)
    _check_size(n)
    combos = list(colex_combinations(n, k))
    mat = np.zeros((len(combos), len(combos)), dtype=complex)
    for i, p in enumerate(combos):
        for j, q in enumerate(combos):
            mat[i, j] = np.trace(operator_sequence_dense(rdm_operator(p, q), n) @ rho)
    return RDMTensor(n, k, mat)


# ------------------- reference states -------------------

def fock_state(occupations: Sequence[int]) -> DenseState:
    n = len(occupations)
    _check_size(n)
    if any(o not in (0, 1) for o in occupations):
        raise ValueError(f"occupations must be 0/1, got {list(occupations)}")
    index = sum(int(o) << (n - 1 - j) for j, o in enumerate(occupations))
    rho = np.zeros((1 << n, 1 << n), dtype=complex)
    rho[index, index] = 1
    return DenseState(n, rho)


def maximally_mixed(n: int) -> DenseState:
    _check_size(n)
    return DenseState(n, np.eye(1 << n, dtype=complex) / (1 << n))


def random_mixed(n: int, seed: int, rank: int | None = None) -> DenseState:
    """Ginibre-distributed mixed state, reproducible from the seed."""
    _check_size(n)
    rng = np.random.default_rng(seed)
    dim = 1 << n
    r = rank or dim
    g = rng.standard_normal((dim, r)) + 1j * rng.standard_normal((dim, r))
    rho = g @ g.conj().T
    return DenseState(n, rho / np.trace(rho))


def ground_state(h: ObservableDecomposition) -> DenseState:
    _check_size(h.n)
    _, vecs = np.linalg.eigh(observable_dense(h))
    return DenseState.from_amplitudes(vecs[:, 0])


def reference_state(spec: dict[str, Any]) -> DenseState:
    """Build a state from {'fock': [...]}, {'maximally_mixed': n},
    {'ground_state_of': ObservableDecomposition}, {'random_mixed': {'n', 'seed', 'rank'}},
    {'amplitudes': [[re, im], ...]} or {'density': [[[re, im], ...], ...]}."""
    if not isinstance(spec, dict) or len(spec) != 1:
        raise ValueError(f"state spec must have exactly one key, got {spec!r}")
    (kind, value), = spec.items()
    if kind == 'fock':
        return fock_state(value)
    if kind == 'maximally_mixed':
        return maximally_mixed(int(value))
    if kind == 'ground_state_of':
        return ground_state(value)
    if kind == 'random_mixed':
        return random_mixed(int(value['n']), int(value['seed']), value.get('rank'))
    if kind == 'amplitudes':
        return DenseState.from_amplitudes([complex(re, im) for re, im in value])
    if kind == 'density':
        rho = np.array([[complex(re, im) for re, im in row] for row in value], dtype=complex)
        n = int(round(math.log2(rho.shape[0])))
        _check_size(n)
        return DenseState(n, rho)
    raise ValueError(f"unknown state spec kind: {kind!r}")


__all__ = [
    'DenseSizeError', 'DenseState', 'RDMTensor', 'gamma_dense', 'majorana_dense', 'pauli_dense',
    'annihilator_dense', 'operator_sequence_dense', 'observable_dense', 'encoding_index_map',
    'encoding_unitary', 'adjoint_matrix', 'build_setting_unitary', 'nc_unitary', 'outcome_distribution',
    'expansion_distribution', 'sample_outcomes', 'exact_majorana_expectations', 'exact_rdm', 'fock_state',
    'maximally_mixed', 'random_mixed', 'ground_state', 'reference_state',
]
