"""Fermion-to-qubit mappings, Pauli images of Majorana monomials, diagonal sets.

Both supported mappings are linear encodings: qubit bits b = beta . occupations (mod 2).
Jordan-Wigner uses beta = I; Bravyi-Kitaev uses the Fenwick-tree matrix
beta[j, k] = 1 iff j + 1 - lsb(j + 1) <= k <= j. For any such beta the single
Majorana images are

    gamma_{2j}   = X_F Z_P
    gamma_{2j+1} = i X_F Z_{P xor O}

with F = column j of beta (qubits flipped with n_j), P = row j of pi.beta^-1
(pi strictly lower triangular ones: parity of modes below j) and O = row j of
beta^-1 (occupation of mode j). Z acts first. Qubit 0 is the leftmost tensor
factor; outcome bit 1 means the Z eigenvalue -1.
"""
from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum
from functools import cached_property, lru_cache
from itertools import combinations

import numpy as np

from Shadows.majorana import MajoranaIndex, binomial, check_index, i_power


class MappingError(ValueError):
    """Unsupported mapping kind or mode-count mismatch."""


class MappingKind(StrEnum):
    JORDAN_WIGNER = 'jw'
    BRAVYI_KITAEV = 'bk'


@dataclass(frozen=True)
class PauliString:
    """i^phase_exp * X^x Z^z stored as bit masks (bit j <-> qubit j)."""
    n: int
    x: int
    z: int
    phase_exp: int = 0

    def __mul__(self, other: PauliString) -> PauliString:
        if self.n != other.n:
            raise MappingError("Pauli strings act on different qubit counts")
        # X^x1 Z^z1 X^x2 Z^z2 = (-1)^{|z1 & x2|} X^{x1^x2} Z^{z1^z2}
        flips = (self.z & other.x).bit_count()
        return PauliString(self.n, self.x ^ other.x, self.z ^ other.z, (self.phase_exp + other.phase_exp + 2 * flips) % 4)

    @property
    def support(self) -> int:
        return self.x | self.z

    @property
    def locality(self) -> int:
        return self.support.bit_count()

    @property
    def letter_phase_exp(self) -> int:
        """Exponent e with self = i^e * letters (XZ on one qubit is -iY)."""
        return (self.phase_exp - (self.x & self.z).bit_count()) % 4

    @property
    def phase(self) -> complex:
        return i_power(self.letter_phase_exp)

    @property
    def letters(self) -> str:
        out = []
        for j in range(self.n):
            xb = (self.x >> j) & 1
            zb = (self.z >> j) & 1
            out.append('IZXY'[xb * 2 + zb])
        return ''.join(out)

    @property
    def is_diagonal(self) -> bool:
        return self.x == 0

    def __str__(self) -> str:
        sign = {0: '+', 1: '+i', 2: '-', 3: '-i'}[self.letter_phase_exp]
        return f"{sign}{self.letters}"


def _lsb(x: int) -> int:
    return x & -x


def gf2_inverse(matrix: np.ndarray) -> np.ndarray:
    """Inverse over GF(2) by Gauss-Jordan elimination."""
    size = matrix.shape[0]
    aug = np.concatenate([matrix.astype(np.uint8) % 2, np.eye(size, dtype=np.uint8)], axis=1)
    for col in range(size):
        pivots = np.nonzero(aug[col:, col])[0]
        if pivots.size == 0:
            raise MappingError("encoding matrix is singular over GF(2)")
        piv = col + int(pivots[0])
        if piv != col:
            aug[[col, piv]] = aug[[piv, col]]
        for row in range(size):
            if row != col and aug[row, col]:
                aug[row] ^= aug[col]
    return aug[:, size:].copy()


def _mask(bits: np.ndarray) -> int:
    return sum(1 << int(j) for j in np.nonzero(bits)[0])


@dataclass(frozen=True)
class Mapping:
    kind: MappingKind
    n: int

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, 'kind', MappingKind(self.kind))
        except ValueError as e:
            raise MappingError(f"unsupported mapping kind: {self.kind!r}") from e
        if self.n < 0:
            raise MappingError(f"mode count must be nonnegative, got {self.n}")

    @cached_property
    def encoding_matrix(self) -> np.ndarray:
        n = self.n
        beta = np.zeros((n, n), dtype=np.uint8)
        if self.kind is MappingKind.JORDAN_WIGNER:
            beta[np.arange(n), np.arange(n)] = 1
        else:
            for j in range(n):
                lo = j + 1 - _lsb(j + 1)
                beta[j, lo:j + 1] = 1
        return beta

    @cached_property
    def decoding_matrix(self) -> np.ndarray:
        if self.n == 0:
            return np.zeros((0, 0), dtype=np.uint8)
        return gf2_inverse(self.encoding_matrix)

    @cached_property
    def gamma_images(self) -> tuple[PauliString, ...]:
        n = self.n
        beta = self.encoding_matrix.astype(np.int64)
        inv = self.decoding_matrix.astype(np.int64)
        lower = np.tril(np.ones((n, n), dtype=np.int64), k=-1)
        parity = (lower @ inv) % 2
        images: list[PauliString] = []
        for j in range(n):
            flip = _mask(beta[:, j])
            par = _mask(parity[j])
            occ = _mask(inv[j])
            images.append(PauliString(n, flip, par, 0))
            images.append(PauliString(n, flip, par ^ occ, 1))
        return tuple(images)

    def encode_bits(self, occupations: int) -> int:
        """Qubit basis index of a Fock index (both with qubit/mode 0 as MSB)."""
        n = self.n
        occ = np.array([(occupations >> (n - 1 - j)) & 1 for j in range(n)], dtype=np.int64)
        bits = (self.encoding_matrix.astype(np.int64) @ occ) % 2
        return int(sum(int(b) << (n - 1 - j) for j, b in enumerate(bits)))


def get_mapping(kind: str | MappingKind, n: int) -> Mapping:
    try:
        resolved = MappingKind(kind)
    except ValueError as e:
        raise MappingError(f"unsupported mapping kind: {kind!r}") from e
    return _mapping_cached(resolved, n)


@lru_cache(maxsize=64)
def _mapping_cached(kind: MappingKind, n: int) -> Mapping:
    return Mapping(kind, n)


@lru_cache(maxsize=200_000)
def _to_pauli_cached(m: Mapping, mu: MajoranaIndex) -> PauliString:
    images = m.gamma_images
    out = PauliString(m.n, 0, 0, 0)
    for g in mu:
        out = out * images[g]
    k = len(mu)
    # (-i)^{C(k,2)}
    return PauliString(out.n, out.x, out.z, (out.phase_exp - k * (k - 1) // 2) % 4)


def to_pauli(mu: MajoranaIndex, m: Mapping) -> PauliString:
    """Pauli image of Gamma_mu under the mapping."""
    if not isinstance(m, Mapping):
        raise MappingError(f"unsupported mapping: {m!r}")
    return _to_pauli_cached(m, check_index(mu, m.n))


def locality(mu: MajoranaIndex, m: Mapping) -> int:
    return to_pauli(mu, m).locality


def is_diagonal_index(mu: MajoranaIndex) -> bool:
    """True iff mu is a union of (2p, 2p+1) pairs (diagonal under every linear encoding)."""
    if len(mu) % 2:
        return False
    return all(mu[i] % 2 == 0 and mu[i + 1] == mu[i] + 1 for i in range(0, len(mu), 2))


@dataclass(frozen=True)
class DiagonalSet:
    n: int
    k: int
    members: frozenset[MajoranaIndex]

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, mu: object) -> bool:
        return mu in self.members


def diagonal_set(n: int, k: int, m: Mapping) -> DiagonalSet:
    """Degree-2k monomials whose Pauli image under m holds only I and Z letters.

    Candidates are the C(n, k) unions of (2p, 2p+1) pairs; each is kept only if
    its image is diagonal, and an encoding that loses any of them is rejected.
    """
    if not 1 <= k <= n:
        raise MappingError(f"diagonal_set requires 1 <= k <= n, got n={n} k={k}")
    if m.n != n:
        raise MappingError(f"mapping built for {m.n} modes, asked for {n}")
    members = set()
    for modes in combinations(range(n), k):
        mu = tuple(g for p in modes for g in (2 * p, 2 * p + 1))
        if to_pauli(mu, m).is_diagonal:
            members.add(mu)
    if len(members) != binomial(n, k):
        raise MappingError(f"{m.kind} diagonal set has {len(members)} members, expected {binomial(n, k)}")
    return DiagonalSet(n, k, frozenset(members))


def bits_to_int(z: str | int, n: int) -> int:
    """Outcome bitstring (qubit 0 first) to its basis index."""
    if isinstance(z, int):
        if not 0 <= z < (1 << n):
            raise MappingError(f"outcome index {z} out of range for {n} qubits")
        return z
    if len(z) != n or any(c not in '01' for c in z):
        raise MappingError(f"outcome {z!r} is not a {n}-bit string")
    return int(z, 2) if z else 0


def int_to_bits(index: int, n: int) -> str:
    return format(index, f'0{n}b') if n else ''


def qubit_mask_to_index_mask(mask: int, n: int) -> int:
    """Reorder a qubit mask (bit j = qubit j) into basis-index bit order (qubit 0 = MSB)."""
    out = 0
    for j in range(n):
        if (mask >> j) & 1:
            out |= 1 << (n - 1 - j)
    return out


def diag_matrix_element(mu: MajoranaIndex, z: str | int, m: Mapping) -> int:
    """<z|Gamma_mu|z> in {-1, 0, +1}."""
    p = to_pauli(mu, m)
    if not p.is_diagonal:
        return 0
    zi = bits_to_int(z, m.n)
    value = -1 if (zi & qubit_mask_to_index_mask(p.z, m.n)).bit_count() & 1 else 1
    e = p.letter_phase_exp
    if e % 2:
        raise MappingError(f"diagonal image of {mu} carries an imaginary phase")
    return value if e == 0 else -value


__all__ = [
    'MappingError', 'MappingKind', 'PauliString', 'Mapping', 'get_mapping', 'to_pauli', 'locality',
    'is_diagonal_index', 'DiagonalSet', 'diagonal_set', 'diag_matrix_element', 'bits_to_int',
    'int_to_bits', 'qubit_mask_to_index_mask', 'gf2_inverse',
]
