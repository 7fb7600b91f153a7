"""Majorana monomial algebra and exact combinatorics.

Role:
    Foundation for every other module. Majorana monomials are identified by a
    strictly increasing tuple of integers in [0, 2n) (``MajoranaIndex``), with
    gamma_{2p} = a_p + a_p^dag, gamma_{2p+1} = -i (a_p - a_p^dag) and
    Gamma_mu = (-i)^{C(k,2)} gamma_{mu_1} ... gamma_{mu_k} so that every Gamma_mu
    is Hermitian and squares to the identity.

Conventions:
    - Phases are carried as exponents of i modulo 4.
    - Combinations are ranked in colexicographic order.
    - Fermionic operator products are expanded exactly; coefficients are
      Gaussian rationals (pairs of Fractions) until the caller multiplies in a
      floating point term coefficient.

Failure Handling:
    Malformed index tuples and ranks raise MajoranaIndexError (a ValueError).
"""
from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from scipy.special import comb

MajoranaIndex = tuple[int, ...]
GaussianRational = tuple[Fraction, Fraction]

_I_POWERS: tuple[GaussianRational, ...] = (
    (Fraction(1), Fraction(0)),
    (Fraction(0), Fraction(1)),
    (Fraction(-1), Fraction(0)),
    (Fraction(0), Fraction(-1)),
)
_I_COMPLEX = (1 + 0j, 1j, -1 + 0j, -1j)


class MajoranaIndexError(ValueError):
    """Raised for invalid Majorana index tuples or combination ranks."""


def binomial(n: int, k: int) -> int:
    """Exact C(n, k); zero when k > n or k < 0."""
    if n < 0:
        raise MajoranaIndexError(f"binomial requires n >= 0, got {n}")
    if k < 0 or k > n:
        return 0
    return int(comb(n, k, exact=True))


def check_index(mu: Sequence[int], n: int) -> MajoranaIndex:
    """Validate and return mu as a MajoranaIndex for n modes."""
    t = tuple(int(x) for x in mu)
    for a, b in zip(t, t[1:], strict=False):
        if b <= a:
            raise MajoranaIndexError(f"indices must be strictly increasing: {t}")
    if t and (t[0] < 0 or t[-1] >= 2 * n):
        raise MajoranaIndexError(f"indices must lie in [0, {2 * n}): {t}")
    return t


def i_power(exponent: int) -> complex:
    return _I_COMPLEX[exponent % 4]


# ------------------- ranking -------------------

def rank_combination(combo: Sequence[int]) -> int:
    """Colexicographic rank of a strictly increasing tuple."""
    t = tuple(combo)
    for a, b in zip(t, t[1:], strict=False):
        if b <= a:
            raise MajoranaIndexError(f"combination must be strictly increasing: {t}")
    if t and t[0] < 0:
        raise MajoranaIndexError(f"combination entries must be nonnegative: {t}")
    return sum(binomial(c, i + 1) for i, c in enumerate(t))


def unrank_combination(n: int, k: int, rank: int) -> tuple[int, ...]:
    """Inverse of rank_combination over k-subsets of range(n)."""
    total = binomial(n, k)
    if not 0 <= rank < total:
        raise MajoranaIndexError(f"rank {rank} out of range [0, {total}) for C({n},{k})")
    out: list[int] = []
    remaining = rank
    upper = n
    for i in range(k, 0, -1):
        c = i - 1
        while c + 1 < upper and binomial(c + 1, i) <= remaining:
            c += 1
        out.append(c)
        remaining -= binomial(c, i)
        upper = c
    return tuple(reversed(out))


def rank_unrank_combination(n: int, k: int, item: int | Sequence[int]) -> int | tuple[int, ...]:
    """Dispatch: an int rank unranks, a tuple ranks (after range checks)."""
    if isinstance(item, int):
        return unrank_combination(n, k, item)
    t = tuple(item)
    if len(t) != k or (t and t[-1] >= n):
        raise MajoranaIndexError(f"{t} is not a {k}-subset of range({n})")
    return rank_combination(t)


def colex_combinations(n: int, k: int) -> Iterator[tuple[int, ...]]:
    """All k-subsets of range(n) in colex order."""
    for r in range(binomial(n, k)):
        yield unrank_combination(n, k, r)


def even_indices(n: int, max_degree: int, *, include_identity: bool = False) -> list[MajoranaIndex]:
    """Every even-degree index of degree <= max_degree, grouped by degree."""
    out: list[MajoranaIndex] = [()] if include_identity else []
    for d in range(2, max_degree + 1, 2):
        out.extend(combinations(range(2 * n), d))
    return out


# ------------------- products -------------------

def _merge_sign(a: Sequence[int], b: Sequence[int]) -> int:
    """Parity of the pairs (x in a, y in b) with x > y."""
    count = 0
    j = 0
    for x in a:
        while j < len(b) and b[j] < x:
            j += 1
        count += j
    return count & 1


def majorana_product_exponent(a: MajoranaIndex, b: MajoranaIndex) -> tuple[int, MajoranaIndex]:
    """Gamma_a Gamma_b = i^e Gamma_c; returns (e mod 4, c)."""
    c = tuple(sorted(set(a).symmetric_difference(b)))
    ka, kb, kc = len(a), len(b), len(c)
    e = -(ka * (ka - 1) // 2 + kb * (kb - 1) // 2 - kc * (kc - 1) // 2)
    if _merge_sign(a, b):
        e += 2
    return e % 4, c


def majorana_product(a: MajoranaIndex, b: MajoranaIndex) -> tuple[complex, MajoranaIndex]:
    e, c = majorana_product_exponent(a, b)
    return i_power(e), c


def permutation_sign(seq: Sequence[int]) -> int:
    """+1 or -1: parity of the permutation sorting seq (distinct entries)."""
    inversions = 0
    items = list(seq)
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            if items[i] > items[j]:
                inversions += 1
    return -1 if inversions & 1 else 1


# ------------------- fermionic terms -------------------

def _gmul(x: GaussianRational, y: GaussianRational) -> GaussianRational:
    return (x[0] * y[0] - x[1] * y[1], x[0] * y[1] + x[1] * y[0])


@dataclass(frozen=True)
class FermionTerm:
    """coefficient * a^dag_{c1} ... a^dag_{cj} a_{d1} ... a_{dl}, in the given order."""
    creations: tuple[int, ...]
    annihilations: tuple[int, ...]
    coefficient: complex = 1.0
    n: int | None = None

    def __post_init__(self) -> None:
        for p in self.creations + self.annihilations:
            if p < 0 or (self.n is not None and p >= self.n):
                raise MajoranaIndexError(f"mode index {p} outside [0, {self.n})")

    def operators(self) -> list[tuple[int, bool]]:
        return [(p, True) for p in self.creations] + [(q, False) for q in self.annihilations]

    def canonical(self) -> tuple[int, FermionTerm | None]:
        """Reorder to creations increasing, annihilations decreasing.

        Returns (sign, term) with term None when an index repeats (the monomial vanishes).
        """
        if len(set(self.creations)) != len(self.creations) or len(set(self.annihilations)) != len(self.annihilations):
            return 0, None
        sign = permutation_sign(self.creations) * permutation_sign([-q for q in self.annihilations])
        term = FermionTerm(
            tuple(sorted(self.creations)),
            tuple(sorted(self.annihilations, reverse=True)),
            self.coefficient,
            self.n,
        )
        return sign, term


def expand_operator_sequence(ops: Iterable[tuple[int, bool]]) -> dict[MajoranaIndex, GaussianRational]:
    """Exact Majorana expansion of a product of ladder operators.

    ``ops`` is a sequence of (mode, is_creation) read left to right.
    """
    half = Fraction(1, 2)
    acc: dict[MajoranaIndex, GaussianRational] = {(): (Fraction(1), Fraction(0))}
    for mode, dagger in ops:
        if mode < 0:
            raise MajoranaIndexError(f"negative mode index {mode}")
        # a_p = (g_2p + i g_2p+1)/2, a_p^dag = (g_2p - i g_2p+1)/2
        factors: tuple[tuple[int, GaussianRational], ...] = (
            (2 * mode, (half, Fraction(0))),
            (2 * mode + 1, (Fraction(0), -half if dagger else half)),
        )
        nxt: dict[MajoranaIndex, GaussianRational] = {}
        for mu, c in acc.items():
            for g, f in factors:
                e, nu = majorana_product_exponent(mu, (g,))
                term = _gmul(_gmul(c, f), _I_POWERS[e])
                prev = nxt.get(nu, (Fraction(0), Fraction(0)))
                nxt[nu] = (prev[0] + term[0], prev[1] + term[1])
        acc = {mu: c for mu, c in nxt.items() if c[0] != 0 or c[1] != 0}
        if not acc:
            break
    return acc


def operator_sequence_to_majorana(ops: Iterable[tuple[int, bool]], coefficient: complex = 1.0) -> dict[MajoranaIndex, complex]:
    exact = expand_operator_sequence(ops)
    c = complex(coefficient)
    return {mu: c * complex(float(re), float(im)) for mu, (re, im) in exact.items()}


def fermion_to_majorana(term: FermionTerm) -> dict[MajoranaIndex, complex]:
    """Majorana expansion of one fermionic monomial (complex coefficients).

    A repeated creation or annihilation index gives an empty expansion.
    Hermitian combinations (term + h.c.) accumulate to real coefficients.
    """
    if len(set(term.creations)) != len(term.creations) or len(set(term.annihilations)) != len(term.annihilations):
        return {}
    return operator_sequence_to_majorana(term.operators(), term.coefficient)


def rdm_operator(p: Sequence[int], q: Sequence[int]) -> list[tuple[int, bool]]:
    """a^dag_{p1}..a^dag_{pk} a_{qk}..a_{q1} as an operator sequence."""
    return [(x, True) for x in p] + [(y, False) for y in reversed(tuple(q))]


__all__ = [
    'MajoranaIndex', 'MajoranaIndexError', 'FermionTerm', 'binomial', 'check_index', 'i_power',
    'rank_combination', 'unrank_combination', 'rank_unrank_combination', 'colex_combinations',
    'even_indices', 'majorana_product', 'majorana_product_exponent', 'permutation_sign',
    'expand_operator_sequence', 'operator_sequence_to_majorana', 'fermion_to_majorana', 'rdm_operator',
]
