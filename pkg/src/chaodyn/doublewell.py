"""Classical analogue of spin measurement: a quartic double well coupled to a
finite bath of harmonic oscillators.

The object potential is V(x) = -(a/2) x^2 + (b/4) x^4 with minima at
+-x0 = +-sqrt(a/b) and an unstable equilibrium on the barrier top at x = 0.
Conservative runs use velocity-Verlet (symplectic, parity-equivariant to the
bit); damped runs integrate m x'' = -lam x' + a x - b x^3 (- coupling) with a
classical Runge-Kutta step and report which well the object settles into.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

UNDECIDED = 0


@dataclass
class DoubleWellSystem:
    a: float = 0.25
    b: float = 0.01
    m_s: float = 1.0
    lam: float = 0.04
    g: float = 0.0
    bath_masses: np.ndarray = field(default_factory=lambda: np.empty(0))
    bath_omegas: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self):
        self.bath_masses = np.atleast_1d(np.asarray(self.bath_masses, dtype=float))
        self.bath_omegas = np.atleast_1d(np.asarray(self.bath_omegas, dtype=float))
        if self.a <= 0.0 or self.b <= 0.0 or self.m_s <= 0.0:
            raise ValueError("potential parameters and mass must be positive")
        if self.bath_masses.size != self.bath_omegas.size:
            raise ValueError("bath_masses and bath_omegas must match")

    @property
    def n_bath(self) -> int:
        return int(self.bath_masses.size)

    @property
    def x0(self) -> float:
        return math.sqrt(self.a / self.b)

    @property
    def barrier_height(self) -> float:
        return self.a**2 / (4.0 * self.b)

    @property
    def well_frequency(self) -> float:
        """Small-oscillation frequency about a minimum: sqrt(V''(x0)/m) = sqrt(2a/m)."""
        return math.sqrt(2.0 * self.a / self.m_s)

    def potential(self, x: float) -> float:
        return -0.5 * self.a * x * x + 0.25 * self.b * x**4

    def object_force(self, x):
        return self.a * x - self.b * x**3


@dataclass
class Trajectory:
    times: np.ndarray
    x_s: np.ndarray
    p_s: np.ndarray
    energy: np.ndarray
    label: int = UNDECIDED


def total_energy(sys: DoubleWellSystem, x_s, p_s, x_b, p_b) -> float:
    e = p_s * p_s / (2.0 * sys.m_s) + sys.potential(x_s)
    if sys.n_bath:
        e += float(np.sum(p_b * p_b / (2.0 * sys.bath_masses)))
        e += float(np.sum(0.5 * sys.bath_masses * sys.bath_omegas**2 * x_b * x_b))
        e += sys.g * x_s * float(np.sum(x_b))
    return float(e)


def symplectic_integrate(
    sys: DoubleWellSystem,
    x_s: float,
    p_s: float,
    dt: float,
    T: float,
    x_b: np.ndarray | None = None,
    p_b: np.ndarray | None = None,
    record_every: int = 1,
    drift_tol: float = 1e-6,
    max_halvings: int = 8,
) -> Trajectory:
    """Velocity-Verlet for the conservative coupled system.

    If the relative energy drift over T exceeds drift_tol the step is halved
    and the run repeated (reported through the returned trajectory metadata
    is unnecessary: the final dt always satisfies the bound or raises).
    """
    x_b = np.zeros(sys.n_bath) if x_b is None else np.asarray(x_b, dtype=float)
    p_b = np.zeros(sys.n_bath) if p_b is None else np.asarray(p_b, dtype=float)
    for attempt in range(max_halvings + 1):
        traj = _verlet_run(sys, x_s, p_s, x_b.copy(), p_b.copy(), dt, T, record_every)
        e0 = traj.energy[0]
        scale = max(abs(e0), 1.0)
        if np.max(np.abs(traj.energy - e0)) / scale <= drift_tol:
            return traj
        dt *= 0.5
    raise RuntimeError(f"energy drift above {drift_tol} even at dt={dt}")


def _verlet_run(sys, x_s, p_s, x_b, p_b, dt, T, record_every) -> Trajectory:
    n_steps = int(round(T / dt))
    n_rec = n_steps // record_every + 1
    times = np.empty(n_rec)
    xs = np.empty(n_rec)
    ps = np.empty(n_rec)
    en = np.empty(n_rec)
    bath_sum = float(np.sum(x_b))

    def force_s(x):
        return sys.object_force(x) - sys.g * bath_sum

    times[0], xs[0], ps[0] = 0.0, x_s, p_s
    en[0] = total_energy(sys, x_s, p_s, x_b, p_b)
    f_s = force_s(x_s)
    f_b = -sys.bath_masses * sys.bath_omegas**2 * x_b - sys.g * x_s if sys.n_bath else x_b
    idx = 1
    for step in range(1, n_steps + 1):
        p_s_half = p_s + 0.5 * dt * f_s
        p_b_half = p_b + 0.5 * dt * f_b
        x_s = x_s + dt * p_s_half / sys.m_s
        if sys.n_bath:
            x_b = x_b + dt * p_b_half / sys.bath_masses
            bath_sum = float(np.sum(x_b))
            f_b = -sys.bath_masses * sys.bath_omegas**2 * x_b - sys.g * x_s
        f_s = force_s(x_s)
        p_s = p_s_half + 0.5 * dt * f_s
        if sys.n_bath:
            p_b = p_b_half + 0.5 * dt * f_b
        if step % record_every == 0:
            times[idx] = step * dt
            xs[idx], ps[idx] = x_s, p_s
            en[idx] = total_energy(sys, x_s, p_s, x_b, p_b)
            idx += 1
    return Trajectory(times[:idx], xs[:idx], ps[:idx], en[:idx])


def _damped_rhs(sys, x, v, bath_pull):
    return v, (sys.object_force(x) - sys.lam * v - bath_pull) / sys.m_s


def damped_trajectory(
    sys: DoubleWellSystem,
    x0: float,
    p0: float,
    dt: float = 0.05,
    T: float = 2000.0,
    settle_radius: float = 0.1,
    v_threshold: float = 0.01,
    record: bool = False,
) -> Trajectory:
    """Damped Newton dynamics m x'' = -lam x' + a x - b x^3 (RK4).

    Returns label +1/-1 once the object is settled within
    settle_radius*x0 of a minimum with |v| below v_threshold*x0*omega_well,
    or UNDECIDED (0) if T is exhausted. The exact origin with no bath is a
    fixed point and stays undecided forever.
    """
    xs, ps, ts = [], [], []
    x, v = x0, p0 / sys.m_s
    xmin = sys.x0
    v_stop = v_threshold * xmin * sys.well_frequency
    n_steps = int(round(T / dt))
    label = UNDECIDED
    for step in range(n_steps + 1):
        if record:
            ts.append(step * dt)
            xs.append(x)
            ps.append(sys.m_s * v)
        if abs(v) < v_stop and abs(abs(x) - xmin) < settle_radius * xmin:
            label = 1 if x > 0 else -1
            break
        k1x, k1v = _damped_rhs(sys, x, v, 0.0)
        k2x, k2v = _damped_rhs(sys, x + 0.5 * dt * k1x, v + 0.5 * dt * k1v, 0.0)
        k3x, k3v = _damped_rhs(sys, x + 0.5 * dt * k2x, v + 0.5 * dt * k2v, 0.0)
        k4x, k4v = _damped_rhs(sys, x + dt * k3x, v + dt * k3v, 0.0)
        x = x + dt * (k1x + 2.0 * k2x + 2.0 * k3x + k4x) / 6.0
        v = v + dt * (k1v + 2.0 * k2v + 2.0 * k3v + k4v) / 6.0
    t_arr = np.asarray(ts) if record else np.array([step * dt])
    x_arr = np.asarray(xs) if record else np.array([x])
    p_arr = np.asarray(ps) if record else np.array([sys.m_s * v])
    return Trajectory(t_arr, x_arr, p_arr, np.zeros_like(t_arr), label)


def _damped_labels_vectorized(
    sys: DoubleWellSystem,
    x: np.ndarray,
    v: np.ndarray,
    bath_pull,
    dt: float,
    T: float,
    settle_radius: float,
    v_threshold: float,
) -> np.ndarray:
    """RK4 on arrays of initial conditions; bath_pull(step) -> per-sample
    coupling force g*sum_n x_n(t), or 0.0 for the bare damped well."""
    xmin = sys.x0
    v_stop = v_threshold * xmin * sys.well_frequency
    labels = np.zeros(x.shape, dtype=np.int8)
    active = np.ones(x.shape, dtype=bool)
    n_steps = int(round(T / dt))
    for step in range(n_steps):
        settled = active & (np.abs(v) < v_stop) & (np.abs(np.abs(x) - xmin) < settle_radius * xmin)
        labels[settled] = np.sign(x[settled]).astype(np.int8)
        active &= ~settled
        if not active.any():
            break
        pull = bath_pull(step)
        k1x, k1v = v, (sys.object_force(x) - sys.lam * v - pull) / sys.m_s
        x2, v2 = x + 0.5 * dt * k1x, v + 0.5 * dt * k1v
        k2x, k2v = v2, (sys.object_force(x2) - sys.lam * v2 - pull) / sys.m_s
        x3, v3 = x + 0.5 * dt * k2x, v + 0.5 * dt * k2v
        k3x, k3v = v3, (sys.object_force(x3) - sys.lam * v3 - pull) / sys.m_s
        x4, v4 = x + dt * k3x, v + dt * k3v
        k4x, k4v = v4, (sys.object_force(x4) - sys.lam * v4 - pull) / sys.m_s
        x = x + dt * (k1x + 2 * k2x + 2 * k3x + k4x) / 6.0
        v = v + dt * (k1v + 2 * k2v + 2 * k3v + k4v) / 6.0
    settled = active & (np.abs(v) < v_stop) & (np.abs(np.abs(x) - xmin) < settle_radius * xmin)
    labels[settled] = np.sign(x[settled]).astype(np.int8)
    return labels


def basin_map(
    sys: DoubleWellSystem,
    x_range: tuple[float, float],
    p_range: tuple[float, float],
    n_grid: int = 64,
    dt: float = 0.05,
    T: float = 2000.0,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Label every cell of an (x, p) grid by the well its damped trajectory
    settles into. Returns (x_centers, p_centers, labels[i, j]) with i
    indexing x. The map is antisymmetric under (x, p) -> (-x, -p) cell by
    cell because the dynamics is odd."""
    if n_grid < 64:
        raise ValueError("grid resolution must be at least 64")
    xc = np.linspace(x_range[0], x_range[1], n_grid)
    pc = np.linspace(p_range[0], p_range[1], n_grid)
    X, P = np.meshgrid(xc, pc, indexing="ij")
    labels = _damped_labels_vectorized(
        sys, X.ravel().copy(), (P.ravel() / sys.m_s).copy(), lambda s: 0.0, dt, T, 0.1, 0.01
    )
    return xc, pc, labels.reshape(n_grid, n_grid)


@dataclass
class BathOutcome:
    labels: np.ndarray
    fraction_plus: float
    fraction_undecided: float


def bath_outcome_experiment(
    sys: DoubleWellSystem,
    n_samples: int,
    seed: int,
    kT: float = 1.0,
    dt: float = 0.05,
    T: float = 2000.0,
) -> BathOutcome:
    """Release the object at exactly (0, 0) and let zero-mean Gaussian bath
    initial conditions decide the outcome.

    Bath oscillators evolve conservatively, driven by their own restoring
    force and the reaction -g*x_s; the object feels their pull plus Ohmic
    friction. Each draw is deterministic given the seed; by symmetry the
    decided outcomes split evenly.
    """
    if sys.n_bath == 0:
        raise ValueError("the experiment needs at least one bath mode")
    rng = np.random.default_rng(seed)
    sig_x = np.sqrt(kT / (sys.bath_masses * sys.bath_omegas**2))
    sig_p = np.sqrt(kT * sys.bath_masses)
    xb = rng.normal(0.0, 1.0, (n_samples, sys.n_bath)) * sig_x
    pb = rng.normal(0.0, 1.0, (n_samples, sys.n_bath)) * sig_p
    labels = _coupled_damped_labels(sys, xb, pb, dt, T)
    decided = labels != UNDECIDED
    frac_plus = float(np.mean(labels[decided] == 1)) if decided.any() else 0.0
    return BathOutcome(labels, frac_plus, float(np.mean(~decided)))


def _coupled_damped_labels(sys, xb, pb, dt, T) -> np.ndarray:
    """Damped object + conservative bath, vectorized over samples with a
    symplectic-Euler bath update between object RK substeps."""
    n = xb.shape[0]
    x = np.zeros(n)
    v = np.zeros(n)
    xb = xb.copy()
    vb = pb / sys.bath_masses
    omega2 = sys.bath_omegas**2
    xmin = sys.x0
    v_stop = 0.01 * xmin * sys.well_frequency
    labels = np.zeros(n, dtype=np.int8)
    active = np.ones(n, dtype=bool)
    n_steps = int(round(T / dt))
    for _ in range(n_steps):
        pull = sys.g * xb.sum(axis=1)
        # object: semi-implicit Euler with friction; bath: leapfrog kick-drift
        acc = (sys.object_force(x) - sys.lam * v - pull) / sys.m_s
        v = v + dt * acc
        x = x + dt * v
        vb = vb + dt * (-omega2 * xb - (sys.g / sys.bath_masses) * x[:, None])
        xb = xb + dt * vb
        settled = active & (np.abs(v) < v_stop) & (np.abs(np.abs(x) - xmin) < 0.1 * xmin)
        if settled.any():
            labels[settled] = np.sign(x[settled]).astype(np.int8)
            active &= ~settled
            # freeze settled samples so late bath pushes cannot relabel them
            v[settled] = 0.0
            x[settled] = np.sign(x[settled]) * xmin
            xb[settled] = 0.0
            vb[settled] = 0.0
        if not active.any():
            break
    return labels


def effective_damping(times: np.ndarray, x: np.ndarray, x_eq: float) -> float:
    """Empirical damping rate from the log-decrement of oscillation peaks
    about x_eq; the model gives no closed form for lam(g, bath spectrum)."""
    dev = np.abs(np.asarray(x) - x_eq)
    peaks = [i for i in range(1, dev.size - 1) if dev[i] >= dev[i - 1] and dev[i] >= dev[i + 1] and dev[i] > 0]
    if len(peaks) < 3:
        raise ValueError("too few oscillation peaks for a log-decrement")
    t = np.asarray(times)[peaks]
    ln_amp = np.log(dev[peaks])
    slope, _ = np.polyfit(t, ln_amp, 1)
    return float(-2.0 * slope)  # energy decay rate ~ 2 * amplitude rate
