"""Binary-shift symbolic dynamics of the Bernoulli/baker maps and their exact
finite-state (permutation) discretizations on grids of J = 2^N cells.

Everything here is integer-exact: bit codes are stored as Python ints,
permutations as index arrays. Dense 0/1 matrices are materialized only for
display and tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_BITS = 62  # codes fit exact integer arithmetic well inside int64


@dataclass(frozen=True)
class BitCode:
    """Fixed-precision binary expansion a_1..a_N of a coordinate in [0, 1).

    ``value`` holds the integer sum a_n * 2^(N-n), so the encoded coordinate
    is value / 2^N. a_1 is the most significant bit.
    """

    value: int
    n_bits: int

    def __post_init__(self):
        if not (1 <= self.n_bits <= MAX_BITS):
            raise ValueError(f"n_bits must lie in 1..{MAX_BITS}")
        if not (0 <= self.value < (1 << self.n_bits)):
            raise ValueError("code value out of range for n_bits")

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> (self.n_bits - 1 - i)) & 1 for i in range(self.n_bits))


def encode_binary(x: float, n_bits: int) -> BitCode:
    """Truncate x in [0, 1) to its first n_bits binary digits."""
    if not (0.0 <= x < 1.0):
        raise ValueError(f"x={x} outside [0, 1)")
    if not (1 <= n_bits <= MAX_BITS):
        raise ValueError(f"n_bits must lie in 1..{MAX_BITS}")
    # multiplying a double by a power of two is exact, so floor is exact
    return BitCode(int(x * (1 << n_bits)), n_bits)


def decode_binary(code: BitCode) -> float:
    return code.value * 2.0 ** (-code.n_bits)


def shift_step(code: BitCode, direction: str, incoming: int) -> tuple[BitCode, int]:
    """Rigid shift of the bit string by one position.

    "up" is the Bernoulli shift towards the most significant digit: a_1 is
    dropped and returned as the outgoing bit, ``incoming`` enters at position
    N. "down" is the inverse: ``incoming`` enters at position 1 and a_N is
    dropped and returned.
    """
    if incoming not in (0, 1):
        raise ValueError("incoming bit must be 0 or 1")
    n = code.n_bits
    mask = (1 << n) - 1
    if direction == "up":
        outgoing = (code.value >> (n - 1)) & 1
        new = ((code.value << 1) & mask) | incoming
    elif direction == "down":
        outgoing = code.value & 1
        new = (code.value >> 1) | (incoming << (n - 1))
    else:
        raise ValueError(f"direction must be 'up' or 'down', got {direction!r}")
    return BitCode(new, n), outgoing


@dataclass(frozen=True)
class PermMatrix:
    """Permutation on J = 2^N cells stored as an index array.

    ``perm[j]`` is the destination cell of source cell j (0-based). The dense
    0/1 matrix B with B[perm[j], j] = 1 acts on density vectors as
    rho' = B rho, moving the mass of cell j to cell perm[j].
    """

    perm: np.ndarray

    def __post_init__(self):
        perm = np.asarray(self.perm, dtype=np.int64)
        object.__setattr__(self, "perm", perm)
        if sorted(perm.tolist()) != list(range(perm.size)):
            raise ValueError("perm is not a bijection")

    @property
    def size(self) -> int:
        return int(self.perm.size)

    def inverse(self) -> np.ndarray:
        inv = np.empty_like(self.perm)
        inv[self.perm] = np.arange(self.perm.size)
        return inv

    def as_matrix(self) -> np.ndarray:
        J = self.size
        mat = np.zeros((J, J), dtype=np.int64)
        mat[self.perm, np.arange(J)] = 1
        return mat


def _check_power_of_two(J: int) -> int:
    if J < 2 or (J & (J - 1)) != 0:
        raise ValueError(f"J={J} is not a power of two >= 2")
    return J.bit_length() - 1


def bernoulli_perm(J: int) -> PermMatrix:
    """Discrete Bernoulli map on J = 2^N cells: cyclic left shift of the N-bit
    cell code, i.e. the zipper interleaving of the two half decks."""
    n = _check_power_of_two(J)
    j = np.arange(J, dtype=np.int64)
    dest = ((j << 1) & (J - 1)) | (j >> (n - 1))
    return PermMatrix(dest)


def discrete_bernoulli_step(rho: np.ndarray, B: PermMatrix) -> np.ndarray:
    """Advance a density vector by the permutation: rho' = B rho."""
    rho = np.asarray(rho)
    if rho.shape != (B.size,):
        raise ValueError(f"density length {rho.shape} does not match J={B.size}")
    out = np.empty_like(rho)
    out[B.perm] = rho
    return out


def discrete_baker_step(rho: np.ndarray, B: PermMatrix) -> np.ndarray:
    """Advance a J x J density matrix by the similarity transformation
    rho' = B^t rho B^t, applied as a pure index permutation.

    Rows (first index) are transported by the inverse Bernoulli permutation
    (the contracting momentum direction), columns by the forward one.
    """
    rho = np.asarray(rho)
    J = B.size
    if rho.shape != (J, J):
        raise ValueError(f"density shape {rho.shape} does not match ({J}, {J})")
    return rho[np.ix_(B.perm, B.inverse())]


def recurrence_period(J: int) -> int:
    """Number of steps after which the discrete Bernoulli map returns to the
    identity, verified by explicit iteration; equals lb(J)."""
    n = _check_power_of_two(J)
    B = bernoulli_perm(J)
    identity = np.arange(J)
    current = B.perm.copy()
    period = 1
    while not np.array_equal(current, identity):
        current = B.perm[current]
        period += 1
        if period > J:
            raise RuntimeError("no recurrence within J steps; permutation corrupt")
    if period != n:
        raise RuntimeError(f"measured period {period} != lb(J) = {n}")
    return period
