import numpy as np
import pytest
from scipy.linalg import block_diag

from chaodyn import qbaker
from chaodyn.qbaker import (
    build_quantum_baker,
    classical_image_cell,
    eigenphases,
    find_revivals,
    momentum_representation,
    parity_matrix,
    return_probability,
    ridge_deviation,
)
from chaodyn.qops import sym_dft_matrix


@pytest.mark.parametrize("J", [2, 4, 8, 16, 32, 64])
def test_unitarity(J):
    qb = build_quantum_baker(J)
    assert qb.unitarity_defect() < 1e-10


def test_smallest_instance_explicit():
    qb = build_quantum_baker(2)
    g1 = sym_dft_matrix(1)  # the 1x1 block [i]
    expected = sym_dft_matrix(2).conj().T @ block_diag(g1, g1)
    assert np.allclose(qb.U, expected)
    assert qb.U.shape == (2, 2)


def test_odd_dimension_rejected():
    with pytest.raises(ValueError):
        build_quantum_baker(7)


def test_momentum_representation_identity():
    qb = build_quantum_baker(8)
    g = sym_dft_matrix(8)
    gh = sym_dft_matrix(4)
    direct = block_diag(gh, gh) @ g.conj().T
    assert np.max(np.abs(momentum_representation(qb) - direct)) < 1e-12


def test_parity_symmetry():
    for J in (8, 16, 32):
        qb = build_quantum_baker(J)
        R = parity_matrix(J)
        assert np.max(np.abs(R @ qb.U @ R - qb.U)) < 1e-8


def test_ridge_structure():
    # the largest entry of every column sits on the classical two-branch graph
    for J in (8, 16, 32):
        qb = build_quantum_baker(J)
        assert ridge_deviation(qb) <= 2.0
    assert classical_image_cell(3, 16) == 6.5
    assert classical_image_cell(12, 16) == 8.5


def test_eigenphases_unimodular_and_reconstruction():
    qb = build_quantum_baker(16)
    w, v = np.linalg.eig(qb.U)
    assert np.max(np.abs(np.abs(w) - 1.0)) < 1e-10
    recon = v @ np.diag(w) @ np.linalg.inv(v)
    assert np.max(np.abs(recon - qb.U)) < 1e-8
    eps = eigenphases(qb)
    assert eps.size == 16
    assert np.all(eps > -np.pi) and np.all(eps <= np.pi)


def test_eigenphases_double_under_squaring():
    qb = build_quantum_baker(8)
    eps = eigenphases(qb)
    w2 = np.sort(np.angle(np.linalg.eigvals(qb.U @ qb.U)))
    doubled = np.sort((2 * eps + np.pi) % (2 * np.pi) - np.pi)
    assert np.allclose(w2, doubled, atol=1e-8)


def test_return_probability_basics():
    qb = build_quantum_baker(8)
    n = np.arange(0, 200)
    pret = return_probability(qb, n)
    assert pret[0] == pytest.approx(64.0, rel=1e-12)
    assert np.all(pret <= 64.0 + 1e-9)
    with pytest.raises(ValueError):
        return_probability(qb, -1)


def test_return_probability_matches_repeated_multiplication():
    qb = build_quantum_baker(8)
    pret = return_probability(qb, np.arange(101))
    M = np.eye(8, dtype=complex)
    for n in range(101):
        assert abs(pret[n] - abs(np.trace(M)) ** 2) < 1e-6
        M = qb.U @ M


def test_revival_exists_for_j8():
    qb = build_quantum_baker(8)
    hits = [r for r in find_revivals(qb, 500, 0.3) if r[0] > 0]
    assert hits, "no near-revival with P/J^2 > 0.3 within 500 steps"
    # in this phase convention the strongest one lands at n = 490
    assert hits[0][0] == 490


def test_no_exponential_decay_of_return_probability():
    qb = build_quantum_baker(8)
    pret = return_probability(qb, np.arange(100, 501))
    assert np.mean(pret) / qb.J > 0.5


def test_find_revivals_thresholds():
    qb = build_quantum_baker(8)
    only_exact = find_revivals(qb, 200, 1.0)
    assert all(abs(v - 1.0) < 1e-12 for _, v in only_exact)
    assert only_exact[0][0] == 0
    everything = find_revivals(qb, 50, 1e-12)
    assert len(everything) == 51
    with pytest.raises(ValueError):
        find_revivals(qb, 0, 0.5)
    with pytest.raises(ValueError):
        find_revivals(qb, 10, 0.0)


def test_plain_convention_also_unitary():
    qb = build_quantum_baker(16, convention="plain")
    assert qb.unitarity_defect() < 1e-10
