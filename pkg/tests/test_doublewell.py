import math

import numpy as np
import pytest

from chaodyn import doublewell as dw


@pytest.fixture
def caption_system():
    # the figure parameters: minima at +-5, barrier height 1.5625
    return dw.DoubleWellSystem(a=0.25, b=0.01, lam=0.04)


def test_geometry(caption_system):
    assert caption_system.x0 == pytest.approx(5.0)
    assert caption_system.barrier_height == pytest.approx(1.5625)
    assert caption_system.well_frequency == pytest.approx(math.sqrt(0.5))
    with pytest.raises(ValueError):
        dw.DoubleWellSystem(a=-1.0)


def test_small_oscillation_frequency(caption_system):
    traj = dw.symplectic_integrate(caption_system, caption_system.x0 + 0.01, 0.0, 0.005, 200.0)
    dev = traj.x_s - caption_system.x0
    crossings = traj.times[np.where(np.diff(np.sign(dev)) != 0)[0]]
    period = 2.0 * float(np.mean(np.diff(crossings)))
    assert period == pytest.approx(2.0 * math.pi / caption_system.well_frequency, rel=1e-3)


def test_energy_conservation(caption_system):
    traj = dw.symplectic_integrate(caption_system, 2.0, 0.5, 0.01, 500.0)
    scale = max(abs(traj.energy[0]), 1.0)
    assert np.max(np.abs(traj.energy - traj.energy[0])) / scale < 1e-6


def test_unstable_equilibrium_is_fixed_point(caption_system):
    traj = dw.symplectic_integrate(caption_system, 0.0, 0.0, 0.01, 50.0)
    assert np.all(traj.x_s == 0.0) and np.all(traj.p_s == 0.0)


def test_parity_equivariance_exact(caption_system):
    plus = dw.symplectic_integrate(caption_system, 0.1, 0.0, 0.01, 50.0)
    minus = dw.symplectic_integrate(caption_system, -0.1, 0.0, 0.01, 50.0)
    assert np.array_equal(plus.x_s, -minus.x_s)
    assert np.array_equal(plus.p_s, -minus.p_s)


def test_bath_coupled_energy_conservation():
    sys = dw.DoubleWellSystem(
        a=0.25, b=0.01, g=0.05, bath_masses=np.ones(4), bath_omegas=np.array([0.3, 0.7, 1.1, 1.5])
    )
    traj = dw.symplectic_integrate(
        sys, 1.0, 0.0, 0.005, 200.0, x_b=np.array([0.5, -0.2, 0.1, 0.3]), p_b=np.zeros(4)
    )
    scale = max(abs(traj.energy[0]), 1.0)
    assert np.max(np.abs(traj.energy - traj.energy[0])) / scale < 1e-6


def test_damped_settles_in_starting_basin(caption_system):
    tr = dw.damped_trajectory(caption_system, 4.0, 0.0)
    assert tr.label == 1
    tr = dw.damped_trajectory(caption_system, -4.0, 0.0)
    assert tr.label == -1


def test_origin_stays_undecided(caption_system):
    tr = dw.damped_trajectory(caption_system, 0.0, 0.0)
    assert tr.label == dw.UNDECIDED


def test_basin_map_structure(caption_system):
    xc, pc, labels = dw.basin_map(caption_system, (-10, 10), (-2, 2), 64, dt=0.05, T=2000.0)
    # antisymmetric cell for cell under (x, p) -> (-x, -p)
    assert np.array_equal(labels, -labels[::-1, ::-1])
    # deep-well columns are uniformly labeled at p = 0
    mid = labels.shape[1] // 2
    assert labels[0, mid] == -1 and labels[-1, mid] == 1
    # boundary passes through the origin: the four central cells straddle it
    assert labels[31:33, 31:33].sum() == 0
    assert np.mean(labels == dw.UNDECIDED) < 0.01


def test_basin_map_resolution_guard(caption_system):
    with pytest.raises(ValueError):
        dw.basin_map(caption_system, (-10, 10), (-2, 2), 32)


def _bath_system():
    return dw.DoubleWellSystem(
        a=0.25, b=0.01, lam=0.04, g=0.02,
        bath_masses=np.ones(8), bath_omegas=np.linspace(0.2, 1.6, 8),
    )


def test_bath_zero_energy_stays_undecided():
    sys = _bath_system()
    labels = dw._coupled_damped_labels(sys, np.zeros((1, 8)), np.zeros((1, 8)), 0.05, 500.0)
    assert labels[0] == dw.UNDECIDED


def test_bath_flip_equivariance():
    sys = _bath_system()
    rng = np.random.default_rng(0)
    xb = rng.normal(0, 1, (200, 8))
    pb = rng.normal(0, 1, (200, 8))
    plus = dw._coupled_damped_labels(sys, xb, pb, 0.05, 2000.0)
    minus = dw._coupled_damped_labels(sys, -xb, -pb, 0.05, 2000.0)
    assert np.array_equal(plus, -minus)


def test_bath_outcomes_split_evenly():
    out = dw.bath_outcome_experiment(_bath_system(), 2000, seed=11, kT=0.5)
    assert out.fraction_undecided < 0.05
    assert out.fraction_plus == pytest.approx(0.5, abs=0.05)
    # deterministic given the seed
    again = dw.bath_outcome_experiment(_bath_system(), 2000, seed=11, kT=0.5)
    assert np.array_equal(out.labels, again.labels)


def test_bath_requires_modes(caption_system):
    with pytest.raises(ValueError):
        dw.bath_outcome_experiment(caption_system, 10, seed=0)


def test_effective_damping_matches_friction(caption_system):
    tr = dw.damped_trajectory(caption_system, 5.8, 0.0, dt=0.02, T=400.0, record=True)
    rate = dw.effective_damping(tr.times, tr.x_s, caption_system.x0)
    # energy decays at lam/m for weak Ohmic friction
    assert rate == pytest.approx(caption_system.lam / caption_system.m_s, rel=0.3)


def test_coarse_entropy_spot_check(caption_system):
    # a Gaussian cloud in the well keeps its coarse entropy over 10 periods
    rng = np.random.default_rng(1)
    n = 20_000
    x = rng.normal(caption_system.x0, 0.35, n)
    p = rng.normal(0.0, 0.25, n)
    period = 2.0 * math.pi / caption_system.well_frequency

    def entropy(xs, ps):
        counts, _, _ = np.histogram2d(
            xs, ps, bins=24, range=[[caption_system.x0 - 3, caption_system.x0 + 3], [-2, 2]]
        )
        q = counts[counts > 0] / counts.sum()
        return float(-(q * np.log(q)).sum())

    e0 = entropy(x, p)
    # vectorized velocity Verlet over the whole cloud (no bath)
    xs, ps = x.copy(), p.copy()
    dt = 0.05
    force = caption_system.object_force
    f = force(xs)
    for _ in range(int(round(10.0 * period / dt))):
        ps_half = ps + 0.5 * dt * f
        xs = xs + dt * ps_half / caption_system.m_s
        f = force(xs)
        ps = ps_half + 0.5 * dt * f
    assert entropy(xs, ps) == pytest.approx(e0, rel=0.03)
