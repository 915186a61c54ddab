"""Unitary spin-measurement model: a spin-1/2 coupled to N truncated boson
modes through sigma_z, with parity bookkeeping, reduced-spin diagnostics, and
closed-form short-time oracles for the single-mode case.

Hamiltonian (hbar = 1):

    H = (omega0/2) sigma_x + sum_n g_n sigma_z (a_n^dag + a_n)
        + sum_n omega_n (a_n^dag a_n + 1/2)

with the coupling switched on at t = 0. Basis ordering is spin (x) mode_1
(x) ... (x) mode_N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh

from .qops import PAULI_X, PAULI_Y, PAULI_Z, bloch_vector, partial_trace, purity, von_neumann_entropy

DENSE_DIM_LIMIT = 4096
TOP_FOCK_TOL = 1e-6


@dataclass
class SpinBosonSystem:
    """Model parameters; for N > 1 the default ladder omega_n = omega_c*n/N
    with couplings g/sqrt(N) keeps the total coupling power fixed."""

    n_modes: int
    omega0: float
    omegas: np.ndarray
    gs: np.ndarray
    n_max: int

    def __post_init__(self):
        self.omegas = np.atleast_1d(np.asarray(self.omegas, dtype=float))
        self.gs = np.atleast_1d(np.asarray(self.gs, dtype=float))
        if self.n_modes < 1:
            raise ValueError("need at least one mode")
        if self.omegas.size != self.n_modes or self.gs.size != self.n_modes:
            raise ValueError("omegas/gs must have one entry per mode")
        # omega0 = 0 is the exactly solvable pure-dephasing limit
        if self.omega0 < 0.0 or np.any(self.omegas <= 0.0):
            raise ValueError("mode frequencies must be positive, omega0 >= 0")
        if self.n_max < 1:
            raise ValueError("n_max must be >= 1")
        if self.dim > 500_000:
            raise ValueError(f"dimension {self.dim} exceeds the memory budget")

    @classmethod
    def ladder(cls, n_modes: int, omega0: float, omega_c: float, g: float, n_max: int):
        n = np.arange(1, n_modes + 1)
        return cls(n_modes, omega0, omega_c * n / n_modes, np.full(n_modes, g / math.sqrt(n_modes)), n_max)

    @property
    def levels(self) -> int:
        return self.n_max + 1

    @property
    def boson_dim(self) -> int:
        return self.levels**self.n_modes

    @property
    def dim(self) -> int:
        return 2 * self.boson_dim


def _lower_op(levels: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, levels)), k=1)


def _mode_operator(sys: SpinBosonSystem, op: np.ndarray, mode: int) -> np.ndarray:
    """Embed a single-mode operator into the boson product space."""
    out = np.eye(1)
    for m in range(sys.n_modes):
        out = np.kron(out, op if m == mode else np.eye(sys.levels))
    return out


def build_hamiltonian(sys: SpinBosonSystem) -> np.ndarray:
    """Dense hermitian Hamiltonian in the spin (x) Fock product basis."""
    bd = sys.boson_dim
    h_spin = 0.5 * sys.omega0 * np.kron(PAULI_X, np.eye(bd))
    h_meter = np.zeros((bd, bd))
    coupling = np.zeros((bd, bd))
    for m in range(sys.n_modes):
        a = _lower_op(sys.levels)
        num = a.T @ a
        h_meter += sys.omegas[m] * (_mode_operator(sys, num, m) + 0.5 * np.eye(bd))
        coupling += sys.gs[m] * _mode_operator(sys, a + a.T, m)
    H = h_spin + np.kron(PAULI_Z, coupling) + np.kron(np.eye(2), h_meter)
    return H.astype(complex)


def parity_operator(sys: SpinBosonSystem) -> np.ndarray:
    """Joint reflection sigma_x (x) exp(i*pi*sum_n n_hat): hermitian, unitary,
    an involution, and a symmetry of the Hamiltonian."""
    signs = np.eye(1)
    for _ in range(sys.n_modes):
        signs = np.kron(signs, np.diag((-1.0) ** np.arange(sys.levels)))
    return np.kron(PAULI_X, signs).astype(complex)


def initial_state(sys: SpinBosonSystem, sign: int, boson_coeffs) -> np.ndarray:
    """Product of the spin cat (|down> + sign |up>)/sqrt(2) with a boson state.

    ``boson_coeffs``: per-mode coefficient vectors (a single vector for
    N = 1), each normalized; the boson state is their tensor product.
    Basis order is (spin down, spin up).
    """
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    vecs = [np.asarray(boson_coeffs, dtype=complex)] if np.ndim(boson_coeffs[0]) == 0 else [
        np.asarray(v, dtype=complex) for v in boson_coeffs
    ]
    if len(vecs) != sys.n_modes:
        raise ValueError("need one coefficient vector per mode")
    boson = np.ones(1, dtype=complex)
    for v in vecs:
        if v.size != sys.levels:
            raise ValueError("coefficient vector length must equal n_max + 1")
        if abs(np.linalg.norm(v) - 1.0) > 1e-10:
            raise ValueError("boson coefficients must be normalized")
        boson = np.kron(boson, v)
    spin = np.array([1.0, sign], dtype=complex) / math.sqrt(2.0)
    return np.kron(spin, boson)


def top_fock_occupation(sys: SpinBosonSystem, psi: np.ndarray) -> float:
    """Largest per-mode occupation probability of the highest Fock level."""
    probs = np.abs(psi) ** 2
    shaped = probs.reshape((2,) + (sys.levels,) * sys.n_modes)
    worst = 0.0
    for m in range(sys.n_modes):
        marg = shaped.sum(axis=tuple(i for i in range(1 + sys.n_modes) if i != 1 + m))
        worst = max(worst, float(marg[-1]))
    return worst


class TruncationError(RuntimeError):
    """Raised when the top Fock level acquires non-negligible population."""


@dataclass
class Propagator:
    """Exact spectral propagator for dim <= DENSE_DIM_LIMIT."""

    sys: SpinBosonSystem
    energies: np.ndarray = field(init=False)
    modes: np.ndarray = field(init=False)

    def __post_init__(self):
        if self.sys.dim > DENSE_DIM_LIMIT:
            raise ValueError(
                f"dim {self.sys.dim} too large for dense diagonalization; "
                "use stepping_evolve"
            )
        H = build_hamiltonian(self.sys)
        self.energies, self.modes = eigh(H)

    def at(self, psi0: np.ndarray, t: float) -> np.ndarray:
        coeff = self.modes.conj().T @ psi0
        return self.modes @ (np.exp(-1.0j * self.energies * t) * coeff)


@dataclass
class SpinRecord:
    times: np.ndarray
    bloch: np.ndarray  # (n, 3): a_x, a_y, a_z with a_k = <sigma_k>/2
    purity: np.ndarray
    entropy: np.ndarray
    parity: np.ndarray
    norm: np.ndarray
    energy: np.ndarray


def spin_diagnostics(sys: SpinBosonSystem, psi: np.ndarray) -> tuple[np.ndarray, float, float]:
    """(bloch vector, purity, von Neumann entropy) of the reduced spin state."""
    rho = np.outer(psi, psi.conj())
    rho_s = partial_trace(rho, (2, sys.boson_dim), keep="A")
    a = bloch_vector(rho_s)
    herm = 0.5 * (rho_s + rho_s.conj().T)
    return a, purity(rho_s), von_neumann_entropy(herm / np.trace(herm).real)


def evolve(
    sys: SpinBosonSystem,
    psi0: np.ndarray,
    dt: float,
    T: float,
    check_truncation: bool = True,
) -> SpinRecord:
    """Sample the exact evolution on the grid t = 0, dt, .., T and record the
    reduced-spin diagnostics plus the conserved quantities."""
    prop = Propagator(sys)
    H = build_hamiltonian(sys)
    Pi = parity_operator(sys)
    times = np.arange(0.0, T + 0.5 * dt, dt)
    bloch = np.empty((times.size, 3))
    pur = np.empty(times.size)
    ent = np.empty(times.size)
    par = np.empty(times.size)
    norm = np.empty(times.size)
    energy = np.empty(times.size)
    for i, t in enumerate(times):
        psi = prop.at(psi0, t)
        if check_truncation and top_fock_occupation(sys, psi) > TOP_FOCK_TOL:
            raise TruncationError(
                f"top Fock level populated to {top_fock_occupation(sys, psi):.2e} "
                f"at t={t}; raise n_max and rerun"
            )
        a, p, s = spin_diagnostics(sys, psi)
        bloch[i] = a
        pur[i] = p
        ent[i] = s
        par[i] = (psi.conj() @ (Pi @ psi)).real
        norm[i] = np.linalg.norm(psi)
        energy[i] = (psi.conj() @ (H @ psi)).real
    return SpinRecord(times, bloch, pur, ent, par, norm, energy)


def stepping_evolve(sys: SpinBosonSystem, psi0: np.ndarray, dt: float, T: float) -> np.ndarray:
    """Fixed-step unitary evolution for dimensions beyond the dense limit,
    using Krylov exponential stepping (scipy expm_multiply) on a sparse H."""
    from scipy.sparse import csr_matrix
    from scipy.sparse.linalg import expm_multiply

    H = csr_matrix(build_hamiltonian(sys))
    n_steps = int(round(T / dt))
    psi = psi0.astype(complex)
    for _ in range(n_steps):
        psi = expm_multiply(-1.0j * dt * H, psi)
    return psi


def stepping_converged(sys: SpinBosonSystem, psi0: np.ndarray, dt: float, T: float, tol: float = 1e-8):
    """Step-halving control: halve dt until the final state moves < tol."""
    psi = stepping_evolve(sys, psi0, dt, T)
    while True:
        dt *= 0.5
        finer = stepping_evolve(sys, psi0, dt, T)
        if np.linalg.norm(finer - psi) < tol:
            return finer, dt
        psi = finer


def coherence_sum(c: np.ndarray) -> float:
    """sum_a sqrt(a+1) Re(c_{a+1} c_a^*): the parity-breaking coherence of the
    boson state that seeds the spin polarization."""
    c = np.asarray(c, dtype=complex)
    a = np.arange(c.size - 1)
    return float(np.sum(np.sqrt(a + 1.0) * (c[1:] * c[:-1].conj()).real))


@dataclass
class ShortTimeOracles:
    rho_s_dot: np.ndarray
    az_dot: float
    az_ddot: float
    purity_dot: float
    purity_ddot: float


def appendix_oracles(sys: SpinBosonSystem, c: np.ndarray, sign: int) -> ShortTimeOracles:
    """Closed-form initial time derivatives for the single-mode model with the
    spin prepared in the cat state and the boson mode in coefficients c.

    With a_z = <sigma_z>/2:
        drho_S/dt(0)  = +-2 g sigma_y S1
        da_z/dt(0)    = 0
        d2a_z/dt2(0)  = +-2 g omega0 S1
        dP/dt(0)      = 0
        d2P/dt2(0)    = 4 g^2 [4 S1^2 - sum_a ((2a+1)|c_a|^2
                        + 2 sqrt((a+1)(a+2)) Re(c_{a+2} c_a^*))]
    where S1 = sum_a sqrt(a+1) Re(c_{a+1} c_a^*). The purity curvature
    follows from d2P/dt2 = 2 Tr(rho_S'' rho_S) + 2 Tr(rho_S'^2) with the
    sigma_x component of rho_S'' equal to -+2 g^2 <(a + a^dag)^2>; it is
    checked against the direct double commutator in the tests.
    """
    if sys.n_modes != 1:
        raise ValueError("oracles are defined for the single-mode model")
    if sign not in (+1, -1):
        raise ValueError("sign must be +1 or -1")
    c = np.asarray(c, dtype=complex)
    g = float(sys.gs[0])
    s1 = coherence_sum(c)
    a = np.arange(c.size)
    diag = np.sum((2 * a + 1) * np.abs(c) ** 2)
    a2 = np.arange(c.size - 2)
    skip = np.sum(2.0 * np.sqrt((a2 + 1.0) * (a2 + 2.0)) * (c[2:] * c[:-2].conj()).real)
    return ShortTimeOracles(
        rho_s_dot=sign * 2.0 * g * s1 * PAULI_Y,
        az_dot=0.0,
        az_ddot=sign * 2.0 * g * sys.omega0 * s1,
        purity_dot=0.0,
        purity_ddot=float(4.0 * g * g * (4.0 * s1**2 - (diag + skip))),
    )


@dataclass
class DwellSummary:
    dwell_lengths: list
    polarities: list
    n_flips: int


def switching_statistics(times: np.ndarray, a_z: np.ndarray, threshold: float) -> DwellSummary:
    """Dwell intervals of sign(a_z) detected with a hysteresis band: polarity
    switches only when |a_z| exceeds the threshold on the opposite side."""
    if not (0.0 < threshold < 0.5):
        raise ValueError("threshold must lie in (0, 1/2)")
    polarity = 0
    start = times[0]
    dwells, signs = [], []
    for t, a in zip(times, a_z):
        new = 1 if a > threshold else (-1 if a < -threshold else 0)
        if new != 0 and new != polarity:
            if polarity != 0:
                dwells.append(t - start)
                signs.append(polarity)
            polarity = new
            start = t
    if polarity != 0:
        dwells.append(times[-1] - start)
        signs.append(polarity)
    return DwellSummary(dwells, signs, max(0, len(signs) - 1))
