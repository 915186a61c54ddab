"""Complex linear-algebra substrate for the quantum modules: Fourier kernels,
density-operator functionals, partial trace, and the cylinder-phase-space
Wigner function.
"""

from __future__ import annotations

import numpy as np

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
EIG_FLOOR = -1e-10

PAULI_X = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
PAULI_Y = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)
PAULI_Z = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def check_density_matrix(rho: np.ndarray) -> np.ndarray:
    """Validate hermiticity, unit trace and spectral positivity of rho."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise ValueError(f"density matrix must be square, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > HERMITICITY_TOL:
        raise ValueError("density matrix is not hermitian")
    if abs(np.trace(rho).real - 1.0) > TRACE_TOL:
        raise ValueError(f"trace {np.trace(rho).real} != 1")
    if np.linalg.eigvalsh(rho).min() < EIG_FLOOR:
        raise ValueError("density matrix has a negative eigenvalue")
    return rho


def dft_matrix(J: int) -> np.ndarray:
    """Discrete Fourier kernel F with F[j, l] = exp(2i*pi*j*l/J)/sqrt(J)."""
    if J < 2:
        raise ValueError("J must be >= 2")
    j = np.arange(J)
    return np.exp(2.0j * np.pi * np.outer(j, j) / J) / np.sqrt(J)


def sym_dft_matrix(J: int) -> np.ndarray:
    """Half-cell shifted Fourier kernel G with
    G[j, l] = exp(2i*pi*(j+1/2)*(l+1/2)/J)/sqrt(J).

    The grid offset restores the x -> 1-x, p -> 1-p symmetry of the
    classical baker map in its quantization. Defined for J >= 1 (J = 1
    appears as the half-size block of the smallest baker map).
    """
    if J < 1:
        raise ValueError("J must be >= 1")
    g = np.arange(J) + 0.5
    return np.exp(2.0j * np.pi * np.outer(g, g) / J) / np.sqrt(J)


def von_neumann_entropy(rho: np.ndarray, c: float = 1.0) -> float:
    """Spectral entropy -c * sum(lam * ln(lam)) with 0 ln 0 := 0.

    Eigenvalues within EIG_FLOOR below zero are clipped (truncation noise);
    anything lower raises.
    """
    rho = check_density_matrix(rho)
    lam = np.linalg.eigvalsh(rho)
    lam = np.clip(lam, 0.0, None)
    lam = lam[lam > 0.0]
    return float(-c * np.sum(lam * np.log(lam)))


def purity(rho: np.ndarray) -> float:
    """Tr rho^2."""
    rho = np.asarray(rho, dtype=complex)
    return float(np.einsum("ij,ji->", rho, rho).real)


def bloch_vector(rho: np.ndarray) -> np.ndarray:
    """Bloch vector a with a_k = Tr(rho sigma_k)/2.

    In this normalization the purity identity reads
    Tr rho^2 = 1/2 + 2|a|^2.
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise ValueError("bloch_vector requires a 2x2 density matrix")
    return 0.5 * np.array(
        [
            np.trace(rho @ PAULI_X).real,
            np.trace(rho @ PAULI_Y).real,
            np.trace(rho @ PAULI_Z).real,
        ]
    )


def partial_trace(rho: np.ndarray, dims: tuple[int, int], keep: str) -> np.ndarray:
    """Trace out one factor of a bipartite density matrix.

    dims = (dA, dB) factorizes the Hilbert space, keep selects "A" or "B".
    """
    dA, dB = dims
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (dA * dB, dA * dB):
        raise ValueError(f"shape {rho.shape} incompatible with dims {dims}")
    r = rho.reshape(dA, dB, dA, dB)
    if keep == "A":
        return np.einsum("ijkj->ik", r)
    if keep == "B":
        return np.einsum("ijil->jl", r)
    raise ValueError("keep must be 'A' or 'B'")


def wigner_cylinder(
    rho: np.ndarray, theta: np.ndarray, leak_tol: float = 1e-6
) -> tuple[np.ndarray, np.ndarray]:
    """Wigner function of a rotor density matrix on the cylinder.

    rho is given in the angular-momentum basis l = -L..L with angle states
    <theta|l> = exp(i*l*theta)/sqrt(2*pi). The returned array W has shape
    (4L+1, len(theta)); row r corresponds to momentum j = (r-2L)/2 on the
    half-integer grid, and

        W[j, theta] = (1/2pi) * sum_k rho[j+k, j-k] * exp(2i*k*theta)

    with k running over (half-)integers such that j+k and j-k are valid
    momentum indices. Integer-j rows integrate over theta to the momentum
    populations; half-integer rows carry the interference structure; summing
    rows recovers the angular density <theta|rho|theta>.

    Returns (p_grid, W) where p_grid holds the momentum values j (in units
    of the momentum quantum).
    """
    rho = np.asarray(rho, dtype=complex)
    dim = rho.shape[0]
    if rho.ndim != 2 or rho.shape[1] != dim or dim % 2 == 0:
        raise ValueError("rho must be square with odd dimension 2L+1")
    L = (dim - 1) // 2
    pop = np.abs(np.diag(rho).real)
    edge = max(pop[0], pop[-1])
    if edge > leak_tol:
        raise ValueError(
            f"boundary occupation {edge:.2e} exceeds {leak_tol:.0e}; "
            "momentum truncation too small for a faithful Wigner function"
        )
    theta = np.asarray(theta, dtype=float)
    W = np.zeros((4 * L + 1, theta.size))
    # anti-diagonal m = l + l' of rho contributes to the row j = m/2
    for m in range(-2 * L, 2 * L + 1):
        lo = max(-L, m - L)
        hi = min(L, m + L)
        ls = np.arange(lo, hi + 1)
        vals = rho[ls + L, (m - ls) + L]
        two_k = 2 * ls - m  # 2k = l - l'
        phases = np.exp(1.0j * np.outer(two_k, theta))
        W[m + 2 * L] = (vals @ phases).real / (2.0 * np.pi)
    p_grid = np.arange(-2 * L, 2 * L + 1) / 2.0
    return p_grid, W


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    """Random mixed state: normalized Wishart matrix G G^dagger."""
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1.0j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-like unitary from the QR decomposition of a complex Gaussian."""
    g = rng.normal(size=(dim, dim)) + 1.0j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(g)
    return q * (np.diag(r) / np.abs(np.diag(r)))
