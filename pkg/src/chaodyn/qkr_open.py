"""Density-matrix evolution of the continuously measured (and optionally
dissipative) quantum kicked rotor, plus comparison against the semiclassical
noisy map.

The one-period map concatenates (i) the rotation phase with measurement
decoherence, applied elementwise in the angular-momentum representation,
(ii) optionally a momentum-damping dissipator integrated in Euler substeps,
and (iii) the kick, a double convolution with Bessel coefficients.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import jv

from .qops import von_neumann_entropy

TRACE_TOL = 1e-8
POSITIVITY_TOL = 1e-6


def gamma_from_nu(nu: float) -> float:
    """Effective per-step coupling from the angle-reset probability nu = 1 - e^-gamma."""
    if not (0.0 <= nu < 1.0):
        raise ValueError("nu must lie in [0, 1)")
    return -math.log1p(-nu)


@dataclass
class BesselKickKernel:
    """Kick expansion coefficients b_n(k) = i^n J_n(k), |n| <= n_cut."""

    k: float
    coeffs: np.ndarray  # index n + n_cut

    @property
    def n_cut(self) -> int:
        return (self.coeffs.size - 1) // 2


def bessel_coeffs(k: float, n_cut: int | None = None) -> BesselKickKernel:
    """Kick kernel with the truncation checked against completeness."""
    min_cut = int(math.ceil(abs(k) + 40))
    if n_cut is None:
        n_cut = min_cut
    if n_cut < min_cut:
        raise ValueError(f"n_cut={n_cut} too small; need >= k + 40 = {min_cut}")
    n = np.arange(-n_cut, n_cut + 1)
    coeffs = (1.0j) ** (n % 4) * jv(n, k)
    if abs(np.sum(np.abs(coeffs) ** 2) - 1.0) > 1e-10:
        raise ValueError("kick kernel violates completeness; increase n_cut")
    if max(abs(coeffs[0]), abs(coeffs[-1])) > 1e-12:
        raise ValueError("kick kernel tail not negligible; increase n_cut")
    return BesselKickKernel(k, coeffs)


@dataclass
class RotorDensity:
    """Rotor density matrix rho[l, m] for l, m in [-l_max, l_max].

    mode "mean_l": continuous readout of <l>; coherences decay as
    exp(-gamma (l-m)^2) per period. mode "full_Pl": readout of the whole
    momentum distribution; all off-diagonal elements shrink by exp(-gamma).
    """

    rho: np.ndarray
    hbar: float
    k: float
    gamma: float = 0.0
    mode: str = "full_Pl"
    lam: float = 0.0
    literal_rot_phase: bool = False
    _rot_factor: np.ndarray = field(init=False, repr=False)
    _kernel: BesselKickKernel = field(init=False, repr=False)

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=complex)
        dim = self.rho.shape[0]
        if self.rho.ndim != 2 or self.rho.shape[1] != dim or dim % 2 == 0:
            raise ValueError("rho must be square with odd dimension 2*l_max+1")
        if self.mode not in ("mean_l", "full_Pl"):
            raise ValueError(f"unknown measurement mode {self.mode!r}")
        if self.gamma < 0.0 or self.lam < 0.0:
            raise ValueError("gamma and lam must be >= 0")
        l = self.l_values.astype(float)
        phase_exp = self.hbar * (1.0 if self.literal_rot_phase else 0.5)
        phases = np.exp(-1.0j * phase_exp * (l[:, None] ** 2 - l[None, :] ** 2))
        if self.mode == "mean_l":
            decay = np.exp(-self.gamma * (l[:, None] - l[None, :]) ** 2)
        else:
            decay = np.full((dim, dim), math.exp(-self.gamma))
            np.fill_diagonal(decay, 1.0)
        self._rot_factor = phases * decay
        self._kernel = bessel_coeffs(self.k)

    @property
    def l_max(self) -> int:
        return (self.rho.shape[0] - 1) // 2

    @property
    def l_values(self) -> np.ndarray:
        return np.arange(-self.l_max, self.l_max + 1)

    def trace(self) -> float:
        return float(np.trace(self.rho).real)

    def momentum_distribution(self) -> np.ndarray:
        return np.abs(np.diag(self.rho).real)

    def energy(self) -> float:
        return 0.5 * self.hbar**2 * float(np.sum(self.l_values**2 * np.diag(self.rho).real))

    def mean_l(self) -> float:
        return float(np.sum(self.l_values * np.diag(self.rho).real))

    def entropy(self, c: float = 1.0) -> float:
        herm = 0.5 * (self.rho + self.rho.conj().T)
        return von_neumann_entropy(herm / np.trace(herm).real, c)

    def boundary_leakage(self) -> float:
        d = self.momentum_distribution()
        return float(max(d[0], d[-1]))


def delta_density(l_max: int, hbar: float, k: float, l0: int = 0, **kw) -> RotorDensity:
    rho = np.zeros((2 * l_max + 1, 2 * l_max + 1), dtype=complex)
    rho[l0 + l_max, l0 + l_max] = 1.0
    return RotorDensity(rho, hbar, k, **kw)


def decoherence_rotation_step(state: RotorDensity) -> None:
    """Rotation phases plus measurement decoherence, elementwise in place.
    Diagonal elements are untouched, so the trace is preserved exactly."""
    state.rho *= state._rot_factor


def kick_step(state: RotorDensity) -> None:
    """Kick as the double convolution rho'' = B rho B^dagger, via FFT along
    both indices.

    B is the momentum-representation matrix of exp(-i k cos(theta)), i.e.
    B[l, l'] = conj(b_{l-l'}(k)); the coefficients b_n are even in n, so this
    is the conjugate of the b_{l'-l} form and matches the closed-system kick
    convention exactly.
    """
    b = state._kernel.coeffs
    tr_before = state.trace()
    work = fftconvolve(state.rho, b.conj()[:, None], mode="same", axes=0)
    work = fftconvolve(work, b[None, :], mode="same", axes=1)
    state.rho = work
    if abs(state.trace() - tr_before) > TRACE_TOL:
        raise RuntimeError(
            f"kick lost trace ({state.trace() - tr_before:+.2e}); "
            "momentum truncation l_max too small"
        )


def dissipative_substep(state: RotorDensity, n_sub: int = 200) -> None:
    """Momentum-damping dissipator integrated over one driving period.

    Lindblad jump operators move angular momentum one quantum towards l = 0
    at rate lam*|l|, realizing incoherent transitions between momentum
    eigenstates with the semiclassical drift <l> -> exp(-lam) <l> per period.
    Plain Euler substeps conserve the trace identically; the diagonal is
    monitored for positivity violations.
    """
    if state.lam == 0.0:
        return
    if n_sub < 1:
        raise ValueError("n_sub must be >= 1")
    dt = 1.0 / n_sub
    l = state.l_values.astype(float)
    w_down = state.lam * np.maximum(l, 0.0)  # rate of l -> l-1
    w_up = state.lam * np.maximum(-l, 0.0)  # rate of l -> l+1
    amp_down = np.sqrt(np.outer(w_down, w_down))
    amp_up = np.sqrt(np.outer(w_up, w_up))
    loss = 0.5 * ((w_down + w_up)[:, None] + (w_down + w_up)[None, :])
    rho = state.rho
    for _ in range(n_sub):
        gain = np.zeros_like(rho)
        gain[:-1, :-1] += amp_down[1:, 1:] * rho[1:, 1:]
        gain[1:, 1:] += amp_up[:-1, :-1] * rho[:-1, :-1]
        rho = rho + dt * (gain - loss * rho)
        worst = np.min(np.diag(rho).real)
        if worst < -POSITIVITY_TOL:
            raise RuntimeError(
                f"dissipator drove a population to {worst:.2e}; increase n_sub"
            )
    state.rho = rho


def measured_qkr_step(state: RotorDensity, n_sub: int = 200) -> None:
    """Full one-period map: decoherent rotation, friction (if lam > 0), kick."""
    decoherence_rotation_step(state)
    dissipative_substep(state, n_sub)
    kick_step(state)


@dataclass
class OpenRun:
    energies: np.ndarray
    entropies: np.ndarray  # sampled every entropy_stride steps (NaN elsewhere)
    final_distribution: np.ndarray
    l_values: np.ndarray
    hbar: float
    trace_drift: float


def evolve_density(
    state: RotorDensity,
    n_steps: int,
    entropy_stride: int = 0,
    n_sub: int = 200,
) -> OpenRun:
    """Iterate the measured/dissipative map, recording E(n) and, optionally,
    the von Neumann entropy every ``entropy_stride`` periods."""
    energies = np.empty(n_steps + 1)
    entropies = np.full(n_steps + 1, np.nan)
    energies[0] = state.energy()
    if entropy_stride:
        entropies[0] = state.entropy()
    for n in range(1, n_steps + 1):
        measured_qkr_step(state, n_sub)
        energies[n] = state.energy()
        if entropy_stride and n % entropy_stride == 0:
            entropies[n] = state.entropy()
    drift = abs(state.trace() - 1.0)
    return OpenRun(
        energies, entropies, state.momentum_distribution(), state.l_values, state.hbar, drift
    )


def evolve_to_stationary(
    state: RotorDensity,
    n_max: int = 500,
    rel_tol: float = 1e-3,
    block: int = 10,
    n_sub: int = 200,
) -> tuple[int, np.ndarray]:
    """Iterate until the kinetic energy stabilizes: relative change of the
    block-averaged <p^2> below rel_tol per ``block`` periods. Returns the
    number of periods run and the E(n) history."""
    history = [state.energy()]
    prev_block = None
    for n in range(1, n_max + 1):
        measured_qkr_step(state, n_sub)
        history.append(state.energy())
        if n % block == 0:
            current = float(np.mean(history[-block:]))
            if prev_block is not None and abs(current - prev_block) <= rel_tol * max(
                abs(prev_block), 1e-30
            ):
                return n, np.asarray(history)
            prev_block = current
    return n_max, np.asarray(history)


def total_variation_distance(p_quantum: np.ndarray, p_classical: np.ndarray) -> float:
    """TV distance between two distributions on the same grid."""
    if p_quantum.shape != p_classical.shape:
        raise ValueError("distributions must share a grid")
    return 0.5 * float(np.sum(np.abs(p_quantum - p_classical)))


def classical_histogram_on_l_grid(p_samples: np.ndarray, hbar: float, l_max: int) -> np.ndarray:
    """Histogram classical momenta into the quantum bins [hbar(l-1/2), hbar(l+1/2))."""
    edges = hbar * (np.arange(-l_max, l_max + 2) - 0.5)
    counts, _ = np.histogram(p_samples, bins=edges)
    return counts / p_samples.size


@dataclass
class ComparisonReport:
    tv_distance: float
    energy_rel_diff: float


def compare_with_noisy_map(
    quantum: OpenRun, classical_p: np.ndarray, classical_energy: float
) -> ComparisonReport:
    """Total-variation distance of the final momentum distributions plus the
    relative mismatch of the final kinetic energies."""
    pc = classical_histogram_on_l_grid(classical_p, quantum.hbar, (quantum.l_values.size - 1) // 2)
    pq = quantum.final_distribution / quantum.final_distribution.sum()
    tv = total_variation_distance(pq, pc)
    e_q = quantum.energies[-1]
    rel = abs(e_q - classical_energy) / max(abs(classical_energy), 1e-30)
    return ComparisonReport(tv, rel)
