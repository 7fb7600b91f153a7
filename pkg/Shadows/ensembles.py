"""Measurement-setting groups for the two shadow ensembles.

Role:
    - FGU settings: even permutations Q of the 2n Majorana wires (Alt(2n)),
      stored as an image array with Q[pi[j], j] = 1.
    - NC settings: an even mode permutation u (Alt(n)) plus one measurement
      basis letter per qubit.
    - Exact subdeterminant action of Q on index tuples and the odd-even
      transposition network realizing Q in depth <= 2n.
    - The signed group Sym+(2, 2n) (signed wire permutations with det +1),
      enumerated for the exhaustive character checks only.

Randomness:
    All sampling takes a numpy Generator. setting_rng(seed, i) derives the
    generator for setting i from one SeedSequence, so chunked or parallel
    sampling reproduces serial sampling.
"""
from __future__ import annotations

from collections.abc import Iterator, Sequence
from dataclasses import dataclass
from itertools import permutations, product

import numpy as np

from Shadows.constants import Metric
from Shadows.core.metrics import METRICS
from Shadows.majorana import MajoranaIndex, MajoranaIndexError, permutation_sign

BASIS_LETTERS = 'XYZ'


def parity(perm: Sequence[int]) -> int:
    """0 for even, 1 for odd permutations given as image arrays."""
    seen = [False] * len(perm)
    transpositions = 0
    for start in range(len(perm)):
        if seen[start]:
            continue
        length = 0
        j = start
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        transpositions += length - 1
    return transpositions & 1


def _check_bijection(perm: Sequence[int], d: int) -> tuple[int, ...]:
    t = tuple(int(x) for x in perm)
    if len(t) != d or sorted(t) != list(range(d)):
        raise MajoranaIndexError(f"not a bijection on range({d}): {t}")
    return t


@dataclass(frozen=True)
class PermSetting:
    """Element of Alt(2n) acting on Majorana wires."""
    n: int
    pi: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, 'pi', _check_bijection(self.pi, 2 * self.n))
        if parity(self.pi):
            raise MajoranaIndexError("FGU setting must be an even permutation")

    @classmethod
    def identity(cls, n: int) -> PermSetting:
        return cls(n, tuple(range(2 * n)))

    def matrix(self) -> np.ndarray:
        d = 2 * self.n
        q = np.zeros((d, d), dtype=np.int64)
        q[list(self.pi), np.arange(d)] = 1
        return q

    def to_record(self) -> dict[str, object]:
        return {'kind': 'fgu', 'pi': list(self.pi)}


@dataclass(frozen=True)
class SignedPermSetting:
    """Signed permutation of the 2n wires with det +1: Q[pi[j], j] = signs[j]."""
    n: int
    pi: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, 'pi', _check_bijection(self.pi, 2 * self.n))
        object.__setattr__(self, 'signs', tuple(int(s) for s in self.signs))
        if len(self.signs) != 2 * self.n or any(s not in (1, -1) for s in self.signs):
            raise MajoranaIndexError(f"signs must be {2 * self.n} entries of +-1, got {self.signs}")
        if self.determinant() != 1:
            raise MajoranaIndexError("signed setting must have determinant +1")

    def determinant(self) -> int:
        return (-1) ** parity(self.pi) * int(np.prod(self.signs))

    def matrix(self) -> np.ndarray:
        d = 2 * self.n
        q = np.zeros((d, d), dtype=np.int64)
        q[list(self.pi), np.arange(d)] = self.signs
        return q


@dataclass(frozen=True)
class NCSetting:
    """Even mode permutation u and per-qubit basis letters."""
    n: int
    u: tuple[int, ...]
    basis: str

    def __post_init__(self) -> None:
        object.__setattr__(self, 'u', _check_bijection(self.u, self.n))
        if parity(self.u):
            raise MajoranaIndexError("NC mode permutation must be even")
        if len(self.basis) != self.n or any(c not in BASIS_LETTERS for c in self.basis):
            raise MajoranaIndexError(f"basis must be {self.n} letters over XYZ, got {self.basis!r}")

    def to_record(self) -> dict[str, object]:
        return {'kind': 'nc', 'u': list(self.u), 'basis': self.basis}


@dataclass(frozen=True)
class TranspositionNetwork:
    """Layers of disjoint adjacent transpositions; entry a swaps wires a and a+1.

    Q equals the product L_0 L_1 ... L_{depth-1} of the layer permutations.
    """
    d: int
    layers: tuple[tuple[int, ...], ...]

    @property
    def depth(self) -> int:
        return len(self.layers)


# ------------------- group helpers -------------------

def compose_perms(p: Sequence[int], q: Sequence[int]) -> tuple[int, ...]:
    """(p o q)[j] = p[q[j]]; matrix product P Q."""
    return tuple(p[j] for j in q)


def inverse_perm(p: Sequence[int]) -> tuple[int, ...]:
    inv = [0] * len(p)
    for j, img in enumerate(p):
        inv[img] = j
    return tuple(inv)


def compose(q1: PermSetting, q2: PermSetting) -> PermSetting:
    return PermSetting(q1.n, compose_perms(q1.pi, q2.pi))


def inverse(q: PermSetting) -> PermSetting:
    return PermSetting(q.n, inverse_perm(q.pi))


def enumerate_alt(d: int) -> Iterator[tuple[int, ...]]:
    """Every even permutation of range(d) (desk-scale only)."""
    for p in permutations(range(d)):
        if not parity(p):
            yield p


def enumerate_settings(n: int) -> Iterator[PermSetting]:
    for p in enumerate_alt(2 * n):
        yield PermSetting(n, p)


def enumerate_signed_settings(n: int) -> Iterator[SignedPermSetting]:
    """Every signed permutation of the 2n wires with determinant +1."""
    d = 2 * n
    for p in permutations(range(d)):
        odd = parity(p)
        for signs in product((1, -1), repeat=d):
            if (signs.count(-1) + odd) % 2 == 0:
                yield SignedPermSetting(n, p, signs)


# ------------------- sampling -------------------

def sample_alt(d: int, rng: np.random.Generator) -> tuple[int, ...]:
    """Uniform element of Alt(d): shuffle, then swap the first two images if odd."""
    if d < 1:
        raise ValueError(f"sample_alt requires d >= 1, got {d}")
    if d == 1:
        return (0,)
    perm = [int(x) for x in rng.permutation(d)]
    if parity(perm):
        perm[0], perm[1] = perm[1], perm[0]
    return tuple(perm)


def sample_perm_setting(n: int, rng: np.random.Generator) -> PermSetting:
    METRICS.inc(Metric.SETTINGS_SAMPLED.value)
    return PermSetting(n, sample_alt(2 * n, rng))


def sample_nc_setting(n: int, rng: np.random.Generator) -> NCSetting:
    if n < 1:
        raise ValueError(f"sample_nc_setting requires n >= 1, got {n}")
    u = sample_alt(n, rng)
    letters = rng.integers(0, 3, size=n)
    METRICS.inc(Metric.SETTINGS_SAMPLED.value)
    return NCSetting(n, u, ''.join(BASIS_LETTERS[int(i)] for i in letters))


def setting_rng(seed: int, index: int) -> np.random.Generator:
    """Generator for setting ``index`` of a run seeded with ``seed``."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(index,)))


# ------------------- action on index tuples -------------------

def act_on_tuple(q: PermSetting, tau: MajoranaIndex) -> tuple[int, MajoranaIndex]:
    """(det[Q_{sigma,tau}], sigma) for the unique row set sigma with nonzero minor."""
    images = [q.pi[t] for t in tau]
    return permutation_sign(images), tuple(sorted(images))


def subdeterminant(q: PermSetting | SignedPermSetting, rows: MajoranaIndex, cols: MajoranaIndex) -> int:
    """Exact det of the submatrix Q[rows, cols]; entries are 0, 1 or a wire sign."""
    if len(rows) != len(cols):
        raise ValueError(f"rows and cols differ in length: {len(rows)} != {len(cols)}")
    images = [q.pi[c] for c in cols]
    if sorted(images) != sorted(rows):
        return 0
    position = {r: i for i, r in enumerate(rows)}
    # column b has its single nonzero entry in row position[images[b]]
    sign = permutation_sign([position[img] for img in images])
    if isinstance(q, SignedPermSetting):
        for c in cols:
            sign *= q.signs[c]
    return sign


def mode_perm_image(u: Sequence[int], mu: MajoranaIndex) -> tuple[int, MajoranaIndex]:
    """Image of mu under 2q + x -> 2u(q) + x, with the sign of sorting it."""
    images = [2 * u[g // 2] + (g & 1) for g in mu]
    return permutation_sign(images), tuple(sorted(images))


def expand_mode_perm(u: Sequence[int]) -> tuple[int, ...]:
    """Wire permutation induced by a mode permutation (always even)."""
    return tuple(2 * u[j // 2] + (j & 1) for j in range(2 * len(u)))


# ------------------- transposition networks -------------------

def decompose_transpositions(q: PermSetting) -> TranspositionNetwork:
    """Odd-even transposition sort of the image array, recorded as layers."""
    d = len(q.pi)
    arr = list(q.pi)
    rounds: list[tuple[int, ...]] = []
    for step in range(d):
        if arr == sorted(arr):
            break
        swaps = []
        for a in range(step % 2, d - 1, 2):
            if arr[a] > arr[a + 1]:
                arr[a], arr[a + 1] = arr[a + 1], arr[a]
                swaps.append(a)
        if swaps:
            rounds.append(tuple(swaps))
    # arr o T_1 o ... o T_R = id, so Q = T_R ... T_1
    return TranspositionNetwork(d, tuple(reversed(rounds)))


def layer_permutation(d: int, layer: Sequence[int]) -> tuple[int, ...]:
    perm = list(range(d))
    for a in layer:
        perm[a], perm[a + 1] = perm[a + 1], perm[a]
    return tuple(perm)


def replay(network: TranspositionNetwork) -> tuple[int, ...]:
    """Compose the layers back into an image array."""
    out: tuple[int, ...] = tuple(range(network.d))
    for layer in network.layers:
        out = compose_perms(out, layer_permutation(network.d, layer))
    return out


__all__ = [
    'BASIS_LETTERS', 'PermSetting', 'NCSetting', 'TranspositionNetwork', 'parity', 'compose', 'inverse',
    'compose_perms', 'inverse_perm', 'enumerate_alt', 'enumerate_settings', 'sample_alt',
    'sample_perm_setting', 'sample_nc_setting', 'setting_rng', 'act_on_tuple', 'subdeterminant',
    'mode_perm_image', 'expand_mode_perm', 'decompose_transpositions', 'layer_permutation', 'replay',
]
