"""Quantized baker map: construction on a J-dimensional Hilbert space,
return-probability and revival diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import block_diag

from .qops import dft_matrix, sym_dft_matrix

UNITARITY_TOL = 1e-10


@dataclass(frozen=True)
class QuantumBaker:
    """One-step unitary of the quantum baker map in position representation.

    convention "symmetric" uses the half-cell shifted Fourier kernel (keeps
    the classical x -> 1-x, p -> 1-p symmetry); "plain" uses the ordinary DFT.
    """

    J: int
    U: np.ndarray
    convention: str

    def unitarity_defect(self) -> float:
        return float(np.max(np.abs(self.U @ self.U.conj().T - np.eye(self.J))))


def _kernel(J: int, convention: str) -> np.ndarray:
    if convention == "symmetric":
        return sym_dft_matrix(J)
    if convention == "plain":
        return dft_matrix(J)
    raise ValueError(f"unknown convention {convention!r}")


def build_quantum_baker(J: int, convention: str = "symmetric") -> QuantumBaker:
    """Assemble U = G_J^{-1} blockdiag(G_{J/2}, G_{J/2}) in position space."""
    if J < 2 or J % 2 != 0:
        raise ValueError(f"J must be even and >= 2, got {J}")
    if convention == "symmetric":
        g_full = sym_dft_matrix(J)
        g_half = sym_dft_matrix(J // 2)
    elif convention == "plain":
        if J < 4:
            raise ValueError("plain convention needs J >= 4 (full-size DFT blocks)")
        g_full = dft_matrix(J)
        g_half = dft_matrix(J // 2)
    else:
        raise ValueError(f"unknown convention {convention!r}")
    U = g_full.conj().T @ block_diag(g_half, g_half)
    qb = QuantumBaker(J, U, convention)
    defect = qb.unitarity_defect()
    if defect > UNITARITY_TOL:
        raise RuntimeError(f"assembled map not unitary (defect {defect:.2e})")
    return qb


def momentum_representation(qb: QuantumBaker) -> np.ndarray:
    """U in the momentum basis: G U G^{-1} = blockdiag(G_half, G_half) G^{-1}."""
    g = _kernel(qb.J, qb.convention)
    return g @ qb.U @ g.conj().T


def eigenphases(qb: QuantumBaker) -> np.ndarray:
    """Sorted phases eps_k in (-pi, pi] of the unimodular eigenvalues."""
    w = np.linalg.eigvals(qb.U)
    if np.max(np.abs(np.abs(w) - 1.0)) > 1e-8:
        raise RuntimeError("eigenvalues deviate from the unit circle")
    phases = np.angle(w)
    phases[phases <= -np.pi] += 2.0 * np.pi
    return np.sort(phases)


def return_probability(qb: QuantumBaker, n: int | np.ndarray) -> np.ndarray:
    """P_ret(n) = |Tr U^n|^2, evaluated from the eigenphases so that large n
    costs nothing and accumulates no roundoff."""
    n = np.atleast_1d(np.asarray(n, dtype=float))
    if np.any(n < 0):
        raise ValueError("n must be >= 0")
    eps = eigenphases(qb)
    traces = np.exp(1.0j * np.outer(n, eps)).sum(axis=1)
    out = np.abs(traces) ** 2
    return out if out.size > 1 else out


def find_revivals(qb: QuantumBaker, n_max: int, threshold: float) -> list[tuple[int, float]]:
    """All step counts n <= n_max with P_ret(n)/J^2 above threshold, strongest
    first."""
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    if not (0.0 < threshold <= 1.0):
        raise ValueError("threshold must lie in (0, 1]")
    steps = np.arange(n_max + 1)
    norm = return_probability(qb, steps) / qb.J**2
    hits = [(int(n), float(v)) for n, v in zip(steps, norm) if v >= threshold]
    hits.sort(key=lambda t: -t[1])
    return hits


def classical_image_cell(j: int, J: int) -> float:
    """Centre row of the classical baker image of position cell j (x-branch)."""
    if j < J // 2:
        return 2 * j + 0.5
    return 2 * j - J + 0.5


def ridge_deviation(qb: QuantumBaker) -> float:
    """Largest distance between each column's peak of |U| and the classical
    image cell; small values mean the two-branch ridge structure is present."""
    dev = 0.0
    for j in range(qb.J):
        peak = int(np.argmax(np.abs(qb.U[:, j])))
        target = classical_image_cell(j, qb.J)
        dev = max(dev, abs(peak - target))
    return dev


def parity_matrix(J: int) -> np.ndarray:
    """Grid reflection x -> 1 - x: R[j, J-1-j] = 1."""
    return np.eye(J)[::-1].copy()
