"""Closed-system quantum kicked rotor: split-step Floquet evolution of pure
states in the angular-momentum basis, localization diagnostics and crossover
estimates.

Units: angular momentum p = hbar * l with integer l; kinetic energy
E = <p^2/2> = hbar^2 <l^2>/2. The kick strength enters the one-period
propagator only through k = K/hbar.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0  # inverse golden ratio

LEAK_TOL = 1e-8


def hbar_from_frac(frac: float) -> float:
    """Effective Planck constant for the figure convention hbar/2pi = frac/G.

    The golden-ratio denominator keeps the one-period rotation phases
    hbar*l^2/2 (mod 2pi) pseudo-random, steering clear of quantum resonances
    at rational values.
    """
    return 2.0 * math.pi * frac / GOLDEN


@dataclass
class RotorWavefunction:
    """Pure rotor state: amplitudes psi[l] for l in [-L_max, L_max]."""

    psi: np.ndarray
    hbar: float
    k: float
    literal_rot_phase: bool = False
    _theta_kick: np.ndarray = field(init=False, repr=False)
    _rot_phase: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        self.psi = np.asarray(self.psi, dtype=complex)
        if self.psi.ndim != 1 or self.psi.size % 2 == 0:
            raise ValueError("psi must be a 1-d array of odd length 2*L_max+1")
        if self.hbar <= 0.0:
            raise ValueError("hbar must be positive")
        norm = np.linalg.norm(self.psi)
        if abs(norm - 1.0) > 1e-10:
            raise ValueError(f"state norm {norm} != 1")
        m = self.psi.size
        # l values in FFT layout (0, 1, .., L, -L, .., -1) for the theta grid
        l_fft = np.fft.fftfreq(m, d=1.0 / m)
        exponent = self.hbar * l_fft**2 * (1.0 if self.literal_rot_phase else 0.5)
        self._rot_phase = np.exp(-1.0j * exponent)
        theta = 2.0 * np.pi * np.arange(m) / m
        self._theta_kick = np.exp(-1.0j * self.k * np.cos(theta))

    @property
    def l_max(self) -> int:
        return (self.psi.size - 1) // 2

    @property
    def l_values(self) -> np.ndarray:
        return np.arange(-self.l_max, self.l_max + 1)

    def momentum_distribution(self) -> np.ndarray:
        return np.abs(self.psi) ** 2

    def energy(self) -> float:
        """<p^2/2> = hbar^2 <l^2> / 2."""
        return 0.5 * self.hbar**2 * float(np.sum(self.l_values**2 * self.momentum_distribution()))

    def boundary_leakage(self) -> float:
        prob = self.momentum_distribution()
        return float(max(prob[0], prob[-1]))


def delta_state(l_max: int, hbar: float, k: float, l0: int = 0, **kw) -> RotorWavefunction:
    """Momentum eigenstate |l0> on a grid l in [-l_max, l_max]."""
    if abs(l0) > l_max:
        raise ValueError("l0 outside the grid")
    psi = np.zeros(2 * l_max + 1, dtype=complex)
    psi[l0 + l_max] = 1.0
    return RotorWavefunction(psi, hbar, k, **kw)


def floquet_step(state: RotorWavefunction) -> None:
    """One driving period, in place: rotation phase exp(-i hbar l^2 / 2) in the
    l-basis, then the kick exp(-i k cos theta) applied on the angle grid via
    FFT. Norm is preserved to round-off.

    The conventional 1/2 in the rotation phase matches the classical kinetic
    energy p^2/2; construct the state with literal_rot_phase=True for the
    variant exp(-i hbar l^2) without it.
    """
    if state.boundary_leakage() > LEAK_TOL:
        raise RuntimeError(
            f"boundary occupation {state.boundary_leakage():.2e} exceeds {LEAK_TOL:.0e}; "
            "enlarge l_max and rerun"
        )
    m = state.psi.size
    # reorder to FFT layout, rotate, kick on the theta grid, back
    work = np.roll(state.psi, -state.l_max)
    work *= state._rot_phase
    work = np.fft.ifft(work) * m  # psi(theta_j), unnormalized
    work *= state._theta_kick
    work = np.fft.fft(work) / m
    state.psi = np.roll(work, state.l_max)


@dataclass
class QkrRun:
    energies: np.ndarray  # E(n), n = 0..n_steps
    final_distribution: np.ndarray
    l_values: np.ndarray
    hbar: float


def evolve(state: RotorWavefunction, n_steps: int) -> QkrRun:
    """Iterate the Floquet map, recording E(n) and the final P(l)."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    energies = np.empty(n_steps + 1)
    energies[0] = state.energy()
    for n in range(1, n_steps + 1):
        floquet_step(state)
        energies[n] = state.energy()
    return QkrRun(energies, state.momentum_distribution(), state.l_values, state.hbar)


def auto_l_max(K: float, hbar: float, floor: int = 512) -> int:
    """Grid half-size from the localization-length estimate, with a floor.

    Localized states keep their support bounded; the leakage monitor in
    floquet_step catches regimes where this estimate is too small.
    """
    k = K / hbar
    l_est = max(1.0, k * k / 4.0)
    return int(max(8 * l_est, floor))


@dataclass
class LocalizationFit:
    length: float  # decay length of exp(-|l - l_c|/L)
    center: float
    r_squared: float
    poor_fit: bool


def localization_length(
    prob: np.ndarray,
    l_values: np.ndarray,
    core_exclude: float = 0.2,
    edge_exclude: float = 0.1,
) -> LocalizationFit:
    """Exponential-envelope fit of a momentum distribution.

    Fits ln P against |l - l_c| over the tail region, excluding the central
    ``core_exclude`` fraction and the outer ``edge_exclude`` fraction of the
    grid. Fits with R^2 < 0.8 are flagged, not rejected.
    """
    prob = np.asarray(prob, dtype=float)
    l_values = np.asarray(l_values, dtype=float)
    center = float(np.sum(l_values * prob) / np.sum(prob))
    span = l_values.max() - l_values.min()
    r = np.abs(l_values - center)
    sel = (r > 0.5 * core_exclude * span) & (r < 0.5 * (1.0 - edge_exclude) * span)
    sel &= prob > 0.0
    if sel.sum() < 10:
        raise ValueError("tail region too small for a fit")
    xs = r[sel]
    ys = np.log(prob[sel])
    slope, intercept = np.polyfit(xs, ys, 1)
    pred = slope * xs + intercept
    ss_res = float(np.sum((ys - pred) ** 2))
    ss_tot = float(np.sum((ys - ys.mean()) ** 2))
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 0.0
    length = -1.0 / slope if slope < 0 else math.inf
    return LocalizationFit(float(length), center, float(r2), bool(r2 < 0.8))


def crossover_estimates(K: float, hbar: float) -> tuple[float, float]:
    """Kick counts until the initial entropy supply is exhausted:
    the information estimate 4*K^2/(pi*e) and the uncertainty estimate
    K^2/(2*pi^2*hbar^2)."""
    if K <= 0.0 or hbar <= 0.0:
        raise ValueError("K and hbar must be positive")
    n_info = 4.0 * K * K / (math.pi * math.e)
    n_unc = K * K / (2.0 * math.pi**2 * hbar**2)
    return n_info, n_unc


def floquet_unitary(l_max: int, hbar: float, k: float, **kw) -> np.ndarray:
    """Dense one-period propagator (small grids only), columns built by
    applying the split-step map to basis states."""
    dim = 2 * l_max + 1
    U = np.empty((dim, dim), dtype=complex)
    for col in range(dim):
        psi = np.zeros(dim, dtype=complex)
        psi[col] = 1.0
        state = RotorWavefunction(psi, hbar, k, **kw)
        m = dim
        work = np.roll(state.psi, -l_max)
        work *= state._rot_phase
        work = np.fft.ifft(work) * m
        work *= state._theta_kick
        work = np.fft.fft(work) / m
        U[:, col] = np.roll(work, l_max)
    return U
