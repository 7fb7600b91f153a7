"""Observable ingestion, k-RDM assembly from Majorana estimates, variance reports.

Hamiltonian file format (UTF-8):
    one term per line, ``coeff op op ...`` where op is ``p^`` (creation) or
    ``p`` (annihilation), read left to right. ``coeff`` is any Python float or
    complex literal. Text after ``#`` is ignored; blank lines are skipped.

Terms are expanded into Majorana monomials and accumulated; a Hermitian input
leaves only real coefficients, so any imaginary residue above
OBSERVABLE_CONFIG['hermiticity_tolerance'] is rejected.
"""
from __future__ import annotations

import logging
import math
from collections.abc import Iterable
from collections.abc import Mapping as TypingMapping
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path

import numpy as np

from Shadows.config import OBSERVABLE_CONFIG
from Shadows.dense_sim import RDMTensor
from Shadows.fgu_estimator import pauli_shadow_norm_sq, shadow_norm_observable, shadow_norm_sq
from Shadows.majorana import (
    FermionTerm,
    MajoranaIndex,
    MajoranaIndexError,
    colex_combinations,
    expand_operator_sequence,
    operator_sequence_to_majorana,
    rdm_operator,
)
from Shadows.mappings import Mapping, MappingError, get_mapping, locality
from Shadows.models.shadow_models import VarianceReport

logger = logging.getLogger(__name__)


class HamiltonianParseError(ValueError):
    def __init__(self, line_no: int, message: str) -> None:
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class NonHermitianError(ValueError):
    """Accumulated Majorana coefficients carry an imaginary part."""


class MissingEstimateError(ValueError):
    """RDM assembly needs an estimate that was not supplied."""


@dataclass
class ObservableDecomposition:
    """H = identity * I + sum_mu coefficients[mu] Gamma_mu over even-degree mu."""
    n: int
    coefficients: dict[MajoranaIndex, float] = field(default_factory=dict)
    identity: float = 0.0

    def __post_init__(self) -> None:
        for mu, c in self.coefficients.items():
            if not mu or len(mu) % 2:
                raise MajoranaIndexError(f"observable terms must have nonzero even degree, got {mu}")
            if mu[-1] >= 2 * self.n:
                raise MajoranaIndexError(f"index {mu} exceeds {2 * self.n} Majorana modes")
            if not math.isfinite(c):
                raise ValueError(f"non-finite coefficient for {mu}")

    def by_degree(self) -> dict[int, dict[MajoranaIndex, float]]:
        out: dict[int, dict[MajoranaIndex, float]] = {}
        for mu, c in sorted(self.coefficients.items()):
            out.setdefault(len(mu), {})[mu] = c
        return out

    def expectation(self, g: TypingMapping[MajoranaIndex, float], *, include_identity: bool = False) -> float:
        """sum_mu h_mu g_mu, optionally plus the identity coefficient."""
        total = sum(c * g[mu] for mu, c in self.coefficients.items())
        return total + self.identity if include_identity else total


# ------------------- ingestion -------------------

def _parse_op(token: str, line_no: int) -> tuple[int, bool]:
    dagger = token.endswith('^')
    body = token[:-1] if dagger else token
    if not body.isdigit():
        raise HamiltonianParseError(line_no, f"bad operator token {token!r}")
    return int(body), dagger


def _parse_coefficient(token: str, line_no: int) -> complex:
    try:
        return complex(token)
    except ValueError as e:
        raise HamiltonianParseError(line_no, f"bad coefficient {token!r}") from e


def _finalize(n: int, acc: dict[MajoranaIndex, complex]) -> ObservableDecomposition:
    tol = OBSERVABLE_CONFIG['hermiticity_tolerance']
    worst = max(acc.items(), key=lambda kv: abs(kv[1].imag), default=None)
    if worst is not None and abs(worst[1].imag) > tol:
        raise NonHermitianError(f"imaginary coefficient {worst[1].imag:.3g} on Gamma{worst[0]}; add the Hermitian conjugate")
    coefficients = {mu: c.real for mu, c in acc.items() if mu and abs(c.real) > tol}
    identity = acc.get((), 0j).real
    return ObservableDecomposition(n, coefficients, identity)


def _accumulate(acc: dict[MajoranaIndex, complex], expansion: dict[MajoranaIndex, complex]) -> None:
    for mu, c in expansion.items():
        acc[mu] = acc.get(mu, 0j) + c


def ingest_hamiltonian(path: str | Path, n: int | None = None) -> ObservableDecomposition:
    """Parse a term file into its Majorana decomposition."""
    prefix = OBSERVABLE_CONFIG['comment_prefix']
    terms: list[tuple[int, complex, list[tuple[int, bool]]]] = []
    for line_no, raw in enumerate(Path(path).read_text(encoding='utf-8').splitlines(), start=1):
        line = raw.split(prefix, 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        coeff = _parse_coefficient(tokens[0], line_no)
        ops = [_parse_op(t, line_no) for t in tokens[1:]]
        terms.append((line_no, coeff, ops))
    modes = max((p for _, _, ops in terms for p, _ in ops), default=-1) + 1
    size = modes if n is None else n
    if n is not None and modes > n:
        bad = next(ln for ln, _, ops in terms if any(p >= n for p, _ in ops))
        raise HamiltonianParseError(bad, f"mode index outside [0, {n})")
    acc: dict[MajoranaIndex, complex] = {}
    for _, coeff, ops in terms:
        _accumulate(acc, operator_sequence_to_majorana(ops, coeff))
    h = _finalize(size, acc)
    logger.info("ingested %d terms from %s: %d Majorana coefficients on %d modes", len(terms), path, len(h.coefficients), size)
    return h


def observable_from_terms(terms: Iterable[FermionTerm | tuple[complex, list[tuple[int, bool]]]], n: int) -> ObservableDecomposition:
    """Programmatic counterpart of ingest_hamiltonian."""
    acc: dict[MajoranaIndex, complex] = {}
    for term in terms:
        if isinstance(term, FermionTerm):
            ops, coeff = term.operators(), term.coefficient
        else:
            coeff, ops = term
        if any(not 0 <= p < n for p, _ in ops):
            raise MajoranaIndexError(f"term {term} acts outside [0, {n})")
        _accumulate(acc, operator_sequence_to_majorana(ops, coeff))
    return _finalize(n, acc)


# ------------------- RDM assembly -------------------

@lru_cache(maxsize=8192)
def _rdm_expansion(p: tuple[int, ...], q: tuple[int, ...]) -> tuple[tuple[MajoranaIndex, complex], ...]:
    exact = expand_operator_sequence(rdm_operator(p, q))
    return tuple((mu, complex(float(re), float(im))) for mu, (re, im) in exact.items() if re != Fraction(0) or im != Fraction(0))


def assemble_rdm(estimates: TypingMapping[MajoranaIndex, float], n: int, k: int) -> RDMTensor:
    """Contract each k-RDM element's Majorana expansion against the estimates.

    The identity expectation is 1 whether or not it is present in the map.
    """
    if not 1 <= k <= n:
        raise ValueError(f"assemble_rdm requires 1 <= k <= n, got n={n} k={k}")
    combos = list(colex_combinations(n, k))
    mat = np.zeros((len(combos), len(combos)), dtype=complex)
    for i, p in enumerate(combos):
        for j, q in enumerate(combos):
            total = 0j
            for mu, c in _rdm_expansion(p, q):
                if not mu:
                    total += c
                    continue
                try:
                    total += c * estimates[mu]
                except KeyError:
                    raise MissingEstimateError(f"no estimate for Gamma{mu} (needed by D[{p},{q}])") from None
            mat[i, j] = total
    return RDMTensor(n, k, mat)


def rdm_to_rows(rdm: RDMTensor) -> list[dict[str, object]]:
    """Rows (p, q, real, imag) with D[p, q] = tr(a^dag_p... a_q... rho)."""
    combos = rdm.combinations()
    rows: list[dict[str, object]] = []
    for i, p in enumerate(combos):
        for j, q in enumerate(combos):
            value = rdm.matrix[i, j]
            rows.append({
                'p': ' '.join(map(str, p)),
                'q': ' '.join(map(str, q)),
                'real': float(value.real),
                'imag': float(value.imag),
            })
    return rows


# ------------------- variance reports -------------------

def hamiltonian_variance_report(h: ObservableDecomposition, rho_expectation: float, mapping: Mapping | None = None) -> VarianceReport:
    """Per-degree shadow-norm contributions, total and single-shot variance.

    rho_expectation is tr(H rho) of the traceless part; the identity term is ignored.
    pauli_norm_sq is sum h_mu^2 3^{loc(mu)} for the qubit images under ``mapping`` (JW by default).
    """
    m = mapping or get_mapping('jw', h.n)
    if m.n != h.n:
        raise MappingError(f"mapping built for {m.n} modes, observable has {h.n}")
    contributions: dict[int, float] = {}
    counts: dict[int, int] = {}
    for degree, terms in h.by_degree().items():
        weight = float(shadow_norm_sq(h.n, degree // 2))
        contributions[degree] = weight * sum(c * c for c in terms.values())
        counts[degree] = len(terms)
    total = shadow_norm_observable(h)
    pauli = sum(c * c * pauli_shadow_norm_sq(locality(mu, m)) for mu, c in h.coefficients.items())
    return VarianceReport(
        n=h.n,
        identity=h.identity,
        contributions=contributions,
        term_counts=counts,
        total_norm_sq=total,
        expectation=rho_expectation,
        variance=total - rho_expectation ** 2 if h.coefficients else 0.0,
        mapping=str(m.kind),
        pauli_norm_sq=pauli,
    )


__all__ = [
    'HamiltonianParseError', 'NonHermitianError', 'MissingEstimateError', 'ObservableDecomposition',
    'ingest_hamiltonian', 'observable_from_terms', 'assemble_rdm', 'rdm_to_rows', 'hamiltonian_variance_report',
]
