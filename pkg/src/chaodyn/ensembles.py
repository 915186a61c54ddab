"""Monte Carlo ensembles over the classical maps, with histogram/entropy and
diffusion diagnostics, a conservative Fokker-Planck grid integrator, and a
box-counting dimension estimator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import maps

MAP_IDS = ("bernoulli", "baker", "dissipative_baker", "standard", "zaslavsky", "noisy_standard")


@dataclass
class Histogram1D:
    """Uniform-bin histogram of a momentum sample."""

    edges: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        self.edges = np.asarray(self.edges, dtype=float)
        self.counts = np.asarray(self.counts, dtype=np.int64)
        if self.counts.size != self.edges.size - 1:
            raise ValueError("counts/edges size mismatch")
        if np.any(self.counts < 0):
            raise ValueError("negative bin count")
        widths = np.diff(self.edges)
        if not np.allclose(widths, widths[0]) or widths[0] <= 0:
            raise ValueError("bins must be uniform with positive width")

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def bin_width(self) -> float:
        return float(self.edges[1] - self.edges[0])

    @classmethod
    def from_samples(cls, values: np.ndarray, n_bins: int, lo: float, hi: float) -> "Histogram1D":
        counts, edges = np.histogram(values, bins=n_bins, range=(lo, hi))
        return cls(edges, counts)


@dataclass
class DiffusionFit:
    """Least-squares line through a variance series over a step window."""

    slope: float
    intercept: float
    window: tuple[int, int]
    residual: float


@dataclass
class EnsembleResult:
    """Per-step first and second moments of p, plus optional point clouds."""

    mean_p: np.ndarray
    var_p: np.ndarray
    final_theta: np.ndarray | None = None
    final_p: np.ndarray | None = None
    checkpoints: dict = field(default_factory=dict)


def _kahan_moments(values: np.ndarray) -> tuple[float, float]:
    """Compensated mean and variance so reductions do not depend on chunking."""
    s = math.fsum(values.tolist())
    mean = s / values.size
    var = math.fsum(((values - mean) ** 2).tolist()) / values.size
    return mean, var


def evolve_ensemble(
    map_id: str,
    params: dict,
    init_sampler,
    n_steps: int,
    n_traj: int,
    seed: int,
    checkpoint_steps: tuple[int, ...] = (),
) -> EnsembleResult:
    """Iterate n_traj independent trajectories of the chosen map.

    ``init_sampler(rng, n)`` must return the initial state arrays: (x, p)
    for the baker family, (theta, p) for the rotor family. Output moments are
    deterministic functions of the seed.
    """
    if map_id not in MAP_IDS:
        raise ValueError(f"unknown map_id {map_id!r}; expected one of {MAP_IDS}")
    if n_traj < 1 or n_steps < 0:
        raise ValueError("need n_traj >= 1 and n_steps >= 0")
    rng = np.random.default_rng(seed)
    a_coord, p = init_sampler(rng, n_traj)
    a_coord = np.asarray(a_coord, dtype=float).copy()
    p = np.asarray(p, dtype=float).copy()

    K = float(params.get("K", 0.0))
    lam = float(params.get("lam", 0.0))
    a = float(params.get("a", 1.0))
    noise = params.get("noise", maps.NoiseSpec())

    mean = np.empty(n_steps + 1)
    var = np.empty(n_steps + 1)
    mean[0], var[0] = _kahan_moments(p)
    checkpoints = {}
    if 0 in checkpoint_steps:
        checkpoints[0] = (a_coord.copy(), p.copy())

    for n in range(1, n_steps + 1):
        if map_id == "bernoulli":
            maps.bernoulli_array(a_coord)
        elif map_id == "baker":
            maps.baker_array(a_coord, p)
        elif map_id == "dissipative_baker":
            maps.dissipative_baker_array(a_coord, p, a)
        elif map_id == "standard":
            maps.standard_map_array(a_coord, p, K)
        elif map_id == "zaslavsky":
            maps.zaslavsky_array(a_coord, p, K, lam)
        else:
            maps.noisy_standard_array(a_coord, p, K, noise, rng, lam)
        mean[n], var[n] = _kahan_moments(p)
        if n in checkpoint_steps:
            checkpoints[n] = (a_coord.copy(), p.copy())

    return EnsembleResult(mean, var, a_coord, p, checkpoints)


def fit_diffusion(variance_series: np.ndarray, window: tuple[int, int] | None = None) -> DiffusionFit:
    """Fit variance(n) = slope*n + intercept over the given step window."""
    v = np.asarray(variance_series, dtype=float)
    if v.size < 10:
        raise ValueError("variance series must have at least 10 entries")
    n0, n1 = window if window is not None else (0, v.size - 1)
    if not (0 <= n0 < n1 < v.size):
        raise ValueError(f"degenerate fit window ({n0}, {n1})")
    n = np.arange(n0, n1 + 1, dtype=float)
    y = v[n0 : n1 + 1]
    slope, intercept = np.polyfit(n, y, 1)
    residual = float(np.sqrt(np.mean((y - (slope * n + intercept)) ** 2)))
    return DiffusionFit(float(slope), float(intercept), (n0, n1), residual)


def shannon_entropy(hist: Histogram1D, c: float = 1.0, d_p: float | None = None) -> float:
    """Information content of a histogrammed density at resolution d_p:

        I = -c * sum_j P_j * ln(d_p * P_j / bin_width)

    with P_j the occupied-bin probabilities. A single occupied bin of width
    d_p carries zero information; d_p defaults to the bin width.
    """
    if hist.total <= 0:
        raise ValueError("histogram is empty")
    width = hist.bin_width
    if d_p is None:
        d_p = width
    if d_p <= 0.0:
        raise ValueError("resolution d_p must be positive")
    prob = hist.counts[hist.counts > 0] / hist.total
    return float(-c * np.sum(prob * np.log(d_p * prob / width)))


def coarse_entropy_2d(x: np.ndarray, p: np.ndarray, n_cells: int, c: float = 1.0) -> float:
    """Plug-in entropy -c sum P ln P of a point cloud on an n_cells^2 grid
    over the unit square (fixed-resolution observation)."""
    counts, _, _ = np.histogram2d(x, p, bins=n_cells, range=[[0.0, 1.0], [0.0, 1.0]])
    prob = counts[counts > 0] / counts.sum()
    return float(-c * np.sum(prob * np.log(prob)))


def occupied_fraction_2d(x: np.ndarray, p: np.ndarray, n_cells: int) -> float:
    """Fraction of grid cells holding at least one point (coarse phase-space volume)."""
    counts, _, _ = np.histogram2d(x, p, bins=n_cells, range=[[0.0, 1.0], [0.0, 1.0]])
    return float(np.count_nonzero(counts)) / n_cells**2


def fokker_planck_evolve(
    rho0: np.ndarray,
    p_grid: np.ndarray,
    D: float,
    lam: float,
    dt: float,
    T: float,
    literal_drift: bool = False,
) -> np.ndarray:
    """Explicit conservative (flux-form) integration of the momentum density.

    Default equation:  d_t rho = D * d_pp rho + lam * d_p(p rho),
    i.e. diffusion at coefficient D (variance grows as 2*D*t) plus linear
    damping towards p = 0. With ``literal_drift`` the printed variant
    d_t rho = (1-lam) d_p rho + d_p[(D + ((1-lam) p)^2) d_p rho] is integrated
    instead; it is kept only behind this flag.

    Raises if dt violates the explicit-scheme stability bound; mass is
    conserved to round-off by the flux form (zero flux at the boundary).
    """
    rho = np.asarray(rho0, dtype=float).copy()
    p = np.asarray(p_grid, dtype=float)
    dp = p[1] - p[0]
    if D < 0.0 or lam < 0.0:
        raise ValueError("D and lam must be >= 0")
    if literal_drift:
        diff_max = D + ((1.0 - lam) * np.max(np.abs(p))) ** 2
    else:
        diff_max = D
    if diff_max > 0.0 and dt > 0.4 * dp * dp / diff_max:
        raise ValueError(
            f"dt={dt} unstable for explicit scheme; need dt <= {0.4 * dp * dp / diff_max:.3e}"
        )
    drift_max = (1.0 - lam) if literal_drift else lam * np.max(np.abs(p))
    if drift_max > 0.0 and dt > 0.5 * dp / drift_max:
        raise ValueError(f"dt={dt} unstable for the drift term")

    n_steps = int(round(T / dt))
    p_face = 0.5 * (p[:-1] + p[1:])
    for _ in range(n_steps):
        grad = np.diff(rho) / dp
        if literal_drift:
            diff_face = D + ((1.0 - lam) * p_face) ** 2
            flux = -(1.0 - lam) * 0.5 * (rho[:-1] + rho[1:]) - diff_face * grad
        else:
            # upwind advection: velocity -lam*p points towards the origin
            vel = -lam * p_face
            upwind = np.where(vel > 0.0, rho[:-1], rho[1:])
            flux = vel * upwind - D * grad
        rho[0] -= dt / dp * flux[0]
        rho[1:-1] -= dt / dp * np.diff(flux)
        rho[-1] += dt / dp * flux[-1]
    return rho


def box_counting_dimension(
    points: np.ndarray, scales: np.ndarray
) -> tuple[float, np.ndarray, float]:
    """Box-counting dimension of a 2D point set.

    Counts occupied cells N(eps) for each box size eps and fits the slope of
    log N against log(1/eps). Returns (dimension, counts, fit residual).
    """
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must have shape (n, 2)")
    if pts.shape[0] < 10_000:
        raise ValueError("need at least 1e4 points for a stable estimate")
    scales = np.asarray(scales, dtype=float)
    if scales.size < 4 or scales.max() / scales.min() < 100.0:
        raise ValueError("need >= 4 scales spanning >= 2 decades")
    counts = np.empty(scales.size)
    for i, eps in enumerate(scales):
        cells = np.floor(pts / eps).astype(np.int64)
        keys = cells[:, 0] * (2**31) + cells[:, 1]
        counts[i] = np.unique(keys).size
    logx = np.log(1.0 / scales)
    logy = np.log(counts)
    slope, intercept = np.polyfit(logx, logy, 1)
    residual = float(np.sqrt(np.mean((logy - (slope * logx + intercept)) ** 2)))
    return float(slope), counts, residual


def dissipative_baker_attractor(
    a: float,
    n_points: int = 1_000_000,
    n_transient: int = 10,
    n_record: int = 10,
    seed: int = 0,
) -> np.ndarray:
    """Sample the strange attractor of the dissipative baker map: iterate a
    uniform cloud past the transient and pool the recorded iterates."""
    rng = np.random.default_rng(seed)
    x = rng.uniform(0.0, 1.0, n_points)
    p = rng.uniform(0.0, 1.0, n_points)
    for _ in range(n_transient):
        maps.dissipative_baker_array(x, p, a)
    clouds = []
    for _ in range(n_record):
        maps.dissipative_baker_array(x, p, a)
        clouds.append(np.column_stack([x, p]).copy())
    return np.concatenate(clouds, axis=0)
