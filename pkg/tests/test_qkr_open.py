import math

import numpy as np
import pytest
from scipy.special import jv

from chaodyn import qkr, qkr_open
from chaodyn.qkr import floquet_unitary, hbar_from_frac
from chaodyn.qkr_open import (
    RotorDensity,
    bessel_coeffs,
    classical_histogram_on_l_grid,
    decoherence_rotation_step,
    delta_density,
    dissipative_substep,
    evolve_density,
    gamma_from_nu,
    kick_step,
    measured_qkr_step,
    total_variation_distance,
)


def test_bessel_kernel_contracts():
    kern = bessel_coeffs(0.0)
    mid = kern.n_cut
    assert kern.coeffs[mid] == pytest.approx(1.0)
    assert np.max(np.abs(np.delete(kern.coeffs, mid))) < 1e-15

    kern = bessel_coeffs(10.0)
    assert abs(np.sum(np.abs(kern.coeffs) ** 2) - 1.0) < 1e-10
    n = np.arange(-kern.n_cut, kern.n_cut + 1)
    # |b_{-n}| = |b_n| and b_n = i^n J_n
    assert np.allclose(np.abs(kern.coeffs[::-1]), np.abs(kern.coeffs))
    assert np.allclose(kern.coeffs, (1j) ** (n % 4) * jv(n, 10.0))
    with pytest.raises(ValueError):
        bessel_coeffs(10.0, n_cut=12)


def test_gamma_nu_mapping():
    assert gamma_from_nu(0.0) == 0.0
    assert gamma_from_nu(0.5) == pytest.approx(math.log(2.0))
    assert math.exp(-gamma_from_nu(1e-3)) == pytest.approx(1.0 - 1e-3)
    with pytest.raises(ValueError):
        gamma_from_nu(1.0)


def test_kick_identity_at_zero_strength():
    st = delta_density(16, 1.0, 0.0)
    before = st.rho.copy()
    kick_step(st)
    assert np.max(np.abs(st.rho - before)) < 1e-14


def test_kick_bessel_populations():
    k = 5.0
    st = delta_density(64, 1.0, k)
    kick_step(st)
    assert np.max(np.abs(st.momentum_distribution() - jv(st.l_values, k) ** 2)) < 1e-14


def test_decoherence_step_trivials():
    hbar = 1.3
    st = delta_density(8, hbar, 1.0, gamma=0.0)
    rng = np.random.default_rng(0)
    psi = rng.normal(size=17) + 1j * rng.normal(size=17)
    psi /= np.linalg.norm(psi)
    st.rho = np.outer(psi, psi.conj())
    before = st.rho.copy()
    decoherence_rotation_step(st)
    l = st.l_values.astype(float)
    phases = np.exp(-0.5j * hbar * (l[:, None] ** 2 - l[None, :] ** 2))
    assert np.max(np.abs(st.rho - before * phases)) < 1e-14

    # full_Pl mode: every off-diagonal magnitude halves at gamma = ln 2
    st = RotorDensity(np.outer(psi, psi.conj()), hbar, 1.0, gamma=math.log(2.0), mode="full_Pl")
    mags_before = np.abs(st.rho).copy()
    decoherence_rotation_step(st)
    mags = np.abs(st.rho)
    off = ~np.eye(17, dtype=bool)
    assert np.allclose(mags[off], 0.5 * mags_before[off])
    assert np.allclose(np.diag(mags), np.diag(mags_before))


def test_mean_l_mode_strong_coupling_diagonalizes():
    rng = np.random.default_rng(1)
    psi = rng.normal(size=9) + 1j * rng.normal(size=9)
    psi /= np.linalg.norm(psi)
    st = RotorDensity(np.outer(psi, psi.conj()), 1.0, 1.0, gamma=50.0, mode="mean_l")
    decoherence_rotation_step(st)
    off = ~np.eye(9, dtype=bool)
    assert np.max(np.abs(st.rho[off])) < 1e-20


def test_gamma_zero_composition_equals_closedsystem():
    hbar = hbar_from_frac(0.1)
    k = 5.0 / hbar
    l_max = 128
    U = floquet_unitary(l_max, hbar, k)
    rng = np.random.default_rng(2)
    v = (rng.normal(size=2 * l_max + 1) + 1j * rng.normal(size=2 * l_max + 1)) * np.exp(
        -0.5 * (np.arange(-l_max, l_max + 1) / 5.0) ** 2
    )
    v /= np.linalg.norm(v)
    rho = np.outer(v, v.conj())
    st = RotorDensity(rho.copy(), hbar, k, gamma=0.0)
    measured_qkr_step(st)
    assert np.max(np.abs(st.rho - U @ rho @ U.conj().T)) < 1e-8


def test_trace_and_hermiticity_preserved():
    hbar = hbar_from_frac(0.1)
    st = delta_density(192, hbar, 5.0 / hbar, gamma=gamma_from_nu(0.5))
    run = evolve_density(st, 40)
    assert run.trace_drift < 1e-10
    assert np.max(np.abs(st.rho - st.rho.conj().T)) < 1e-12


def test_entropy_monotone_under_pure_decoherence():
    psi = np.exp(-0.5 * (np.arange(-8, 9) / 2.0) ** 2).astype(complex)
    psi /= np.linalg.norm(psi)
    st = RotorDensity(np.outer(psi, psi.conj()), 1.0, 0.0, gamma=0.3, mode="full_Pl")
    entropies = [st.entropy()]
    for _ in range(25):
        decoherence_rotation_step(st)
        entropies.append(st.entropy())
    assert np.all(np.diff(entropies) > -1e-10)


def test_dissipative_substep_identity_at_zero():
    st = delta_density(16, 1.0, 1.0, lam=0.0)
    before = st.rho.copy()
    dissipative_substep(st)
    assert np.array_equal(st.rho, before)


def test_dissipative_momentum_drift():
    # <l> contracts by exp(-lam) per period, the semiclassical damping factor
    lam = 0.3
    st = delta_density(48, 1.0, 0.0, lam=lam, l0=20)
    m0 = st.mean_l()
    dissipative_substep(st, n_sub=400)
    assert st.mean_l() / m0 == pytest.approx(math.exp(-lam), rel=1e-3)
    assert abs(st.trace() - 1.0) < 1e-12


def test_dissipative_energy_monotone_simple():
    lam = 0.4
    rng = np.random.default_rng(3)
    pops = rng.uniform(0.1, 1.0, 33)
    pops /= pops.sum()
    st = RotorDensity(np.diag(pops).astype(complex), 1.0, 0.0, lam=lam)
    energies = [st.energy()]
    for _ in range(6):
        dissipative_substep(st, n_sub=200)
        energies.append(st.energy())
    assert np.all(np.diff(energies) < 0)
    assert abs(st.trace() - 1.0) < 1e-10


def test_dissipative_positivity_guard():
    st = delta_density(64, 1.0, 0.0, lam=5.0, l0=60)
    with pytest.raises(RuntimeError):
        dissipative_substep(st, n_sub=2)


def test_total_variation_trivials():
    p = np.array([0.5, 0.5, 0.0])
    assert total_variation_distance(p, p) == 0.0
    q = np.array([0.0, 0.0, 1.0])
    assert total_variation_distance(p, q) == 1.0
    with pytest.raises(ValueError):
        total_variation_distance(p, np.array([1.0]))


def test_classical_histogram_binning():
    hbar = 0.5
    samples = np.array([0.0, 0.24, -0.26, 0.9])
    hist = classical_histogram_on_l_grid(samples, hbar, 2)
    # bins centred on hbar*l: [-1.25,-0.75,-0.25,0.25,0.75,1.25]
    assert hist.tolist() == [0.0, 0.25, 0.5, 0.0, 0.25]


def test_stationarity_driver_stops():
    hbar = 0.5
    st = delta_density(64, hbar, 2.0 / hbar, lam=0.5)
    n_run, history = qkr_open.evolve_to_stationary(st, n_max=200, rel_tol=5e-3, n_sub=100)
    assert n_run < 200
    assert history.size == n_run + 1
