"""Bogoliubov map construction and its algebraic identities."""

import numpy as np
import pytest

import ionquench as iq
from ionquench.errors import (
    IllConditionedMapError,
    InvalidInputError,
    NonPhysicalMapError,
)
from ionquench.quench import _assemble

from conftest import random_rotation, random_symmetric_with_norm, z_trace_series


@pytest.fixture(scope="module")
def real_map(hbar_tilde_be):
    system = iq.ChainSystem.from_g_delta(3, -0.005, 0.025)
    return iq.prepare_quench(system, hbar_tilde_be)


def test_identity_quench():
    system = iq.ChainSystem(3, 2.8)
    eq = iq.find_equilibrium(system, "g")
    basis = iq.mode_basis(eq, system)
    qmap = iq.build_quench_map(basis, basis, 1e-4)
    eye = np.eye(6)
    assert qmap.T == pytest.approx(eye, abs=1e-12)
    assert qmap.D == pytest.approx(np.zeros(6), abs=1e-12)
    assert qmap.u == pytest.approx(eye, abs=1e-12)
    assert qmap.v == pytest.approx(np.zeros((6, 6)), abs=1e-12)
    assert qmap.A == pytest.approx(np.zeros((6, 6)), abs=1e-12)
    assert qmap.beta_e == pytest.approx(np.zeros(6), abs=1e-12)
    assert qmap.Z == pytest.approx(1.0, abs=1e-12)
    assert qmap.G0 == pytest.approx(1.0, abs=1e-12)


def test_single_mode_frequency_quench_numbers():
    qmap = iq.synthetic_quench_map([1.0], [2.0], [[1.0]], [0.0], 1.0)
    assert qmap.u[0, 0] == pytest.approx((np.sqrt(2) + np.sqrt(0.5)) / 2, rel=1e-12)
    assert qmap.v[0, 0] == pytest.approx((np.sqrt(2) - np.sqrt(0.5)) / 2, rel=1e-12)
    assert qmap.A[0, 0] == pytest.approx(1.0 / 3.0, rel=1e-12)
    assert qmap.Z == pytest.approx((8.0 / 9.0) ** 0.25, rel=1e-12)
    assert qmap.G0 == pytest.approx(qmap.Z, rel=1e-12)
    assert qmap.xi[0, 0] == pytest.approx(np.arctanh(1.0 / 3.0), rel=1e-12)


def test_single_mode_displacement_quench():
    omega, hbar_tilde = 1.0, 1.0
    d = np.sqrt(2.0)  # beta = sqrt(omega/(2 hbt)) d = 1
    qmap = iq.synthetic_quench_map([omega], [omega], [[1.0]], [d], hbar_tilde)
    assert qmap.A[0, 0] == pytest.approx(0.0, abs=1e-14)
    assert qmap.beta_g[0] == pytest.approx(1.0, rel=1e-12)
    assert qmap.beta_e[0] == pytest.approx(-1.0, rel=1e-12)
    assert qmap.G0 == pytest.approx(np.exp(-0.5), rel=1e-12)


def test_ground_state_overlap_against_fock():
    qmap = iq.synthetic_quench_map([1.0], [2.0], [[1.0]], [0.0], 1.0)
    inst = iq.FockInstance(1, [1.0], [2.0], [[1.0]], [0.0], 80, 1.0)
    assert iq.ground_state_overlap(qmap) == pytest.approx(
        (8.0 / 9.0) ** 0.25, rel=1e-12)
    assert abs(iq.ground_state_overlap(qmap)
               - iq.fock_vacuum_overlap(inst)) < 1e-8

    d = np.sqrt(2.0)  # beta = 1
    qmap2 = iq.synthetic_quench_map([1.0], [1.0], [[1.0]], [d], 1.0)
    inst2 = iq.FockInstance(1, [1.0], [1.0], [[1.0]], [d], 80, 1.0)
    assert iq.ground_state_overlap(qmap2) == pytest.approx(np.exp(-0.5), rel=1e-12)
    assert abs(iq.ground_state_overlap(qmap2)
               - iq.fock_vacuum_overlap(inst2)) < 1e-8


def test_takagi_trivial_and_diagonal():
    lam, a = iq.takagi_symmetric(np.zeros((3, 3)))
    assert a == pytest.approx(np.zeros(3), abs=1e-14)
    assert np.max(np.abs(lam @ np.diag(a) @ lam.T)) < 1e-14

    lam, a = iq.takagi_symmetric(np.diag([0.2, -0.5]))
    assert sorted(a) == pytest.approx([-0.5, 0.2], rel=1e-12)
    recon = lam @ np.diag(a) @ lam.T
    assert recon == pytest.approx(np.diag([0.2, -0.5]), abs=1e-12)


def test_takagi_random_reconstruction():
    rng = np.random.default_rng(21)
    for _ in range(20):
        a_matrix = random_symmetric_with_norm(rng, 6, 0.7)
        lam, a = iq.takagi_symmetric(a_matrix)
        assert np.max(np.abs(lam @ np.diag(a) @ lam.T - a_matrix)) < 1e-10
        assert np.max(np.abs(lam.T @ lam - np.eye(6))) < 1e-12
        assert np.max(np.abs(a)) < 1.0


def test_takagi_rejects_unit_eigenvalue():
    with pytest.raises(NonPhysicalMapError):
        iq.takagi_symmetric(np.diag([0.5, 1.01]))


def test_squeezing_parameters():
    lam = np.eye(2)
    assert iq.squeezing_parameters(lam, [0.0, 0.0]) == pytest.approx(
        np.zeros((2, 2)), abs=1e-15)
    xi = iq.squeezing_parameters(np.eye(1), [1.0 / 3.0])
    assert xi[0, 0] == pytest.approx(np.arctanh(1.0 / 3.0), rel=1e-12)
    # diagonal kernel: xi = diag(atanh a)
    a_vals = np.array([0.3, -0.6])
    lam, a = iq.takagi_symmetric(np.diag(a_vals))
    xi = iq.squeezing_parameters(lam, a)
    assert xi == pytest.approx(np.diag(np.arctanh(a_vals)), abs=1e-12)
    with pytest.raises(NonPhysicalMapError):
        iq.squeezing_parameters(np.eye(1), [1.0])


def test_xi_reconstructs_kernel(real_map):
    vals, vecs = np.linalg.eigh(real_map.xi)
    recon = vecs @ np.diag(np.tanh(vals)) @ vecs.T
    assert np.max(np.abs(recon - real_map.A)) < 1e-10


def test_bogoliubov_identities(real_map):
    m = real_map
    eye = np.eye(m.size)
    assert np.max(np.abs(m.T.T @ m.T - eye)) < 1e-10
    assert np.max(np.abs(m.u @ m.u.T - m.v @ m.v.T - eye)) < 1e-10
    assert np.max(np.abs(m.u @ m.v.T - m.v @ m.u.T)) < 1e-10
    a_raw = np.linalg.solve(m.u, m.v)
    assert np.max(np.abs(a_raw - a_raw.T)) < 1e-10
    assert np.linalg.norm(m.A, 2) < 1.0
    assert 0.0 < m.G0 <= 1.0
    assert 0.0 < m.Z <= 1.0
    # determinant identity for Z via the eigenvalue route
    _, a = iq.takagi_symmetric(m.A)
    assert abs(m.Z - np.prod((1.0 - a ** 2) ** 0.25)) / m.Z < 1e-12


def test_z_trace_series_identity():
    rng = np.random.default_rng(33)
    for _ in range(50):
        size = rng.integers(2, 8)
        a_matrix = random_symmetric_with_norm(rng, size, rng.uniform(0.1, 0.5))
        sign, logdet = np.linalg.slogdet(np.eye(size) - a_matrix @ a_matrix)
        z_det = np.exp(0.25 * logdet)
        assert abs(z_det - z_trace_series(a_matrix, 40)) / z_det < 1e-8


def test_overlap_symmetric_under_swap(hbar_tilde_be):
    system = iq.ChainSystem.from_g_delta(3, -0.005, 0.025)
    eq_g = iq.find_equilibrium(system, "g")
    eq_e = iq.find_equilibrium(system, "e")
    basis_g = iq.mode_basis(eq_g, system)
    basis_e = iq.mode_basis(eq_e, system)
    forward = iq.build_quench_map(basis_g, basis_e, hbar_tilde_be)
    backward = iq.build_quench_map(basis_e, basis_g, hbar_tilde_be)
    assert abs(forward.G0 - backward.G0) < 1e-10


def test_beta_e_reduces_to_sign_flip():
    # u = I, v = 0: beta_e = -(u+v)^T beta_g = -beta_g
    qmap = iq.synthetic_quench_map([1.0, 2.0], [1.0, 2.0], np.eye(2),
                                   [0.3, -0.4], 1.0)
    assert qmap.beta_e == pytest.approx(-qmap.beta_g, rel=1e-14)


def test_ill_conditioned_map():
    rank_deficient = np.array([[1.0, 1.0], [1.0, 1.0]]) / np.sqrt(2.0)
    with pytest.raises(IllConditionedMapError):
        _assemble(rank_deficient, [0.0, 0.0], [1.0, 1.0], [1.0, 1.0], 1.0)


def test_build_quench_map_validation(hbar_tilde_be):
    system = iq.ChainSystem(3, 2.8)
    eq = iq.find_equilibrium(system, "g")
    basis = iq.mode_basis(eq, system)
    bare = iq.NormalModeBasis("g", basis.mode_matrix, basis.frequencies, None)
    with pytest.raises(InvalidInputError):
        iq.build_quench_map(bare, basis, hbar_tilde_be)
    with pytest.raises(InvalidInputError):
        _assemble(np.eye(2), [0.0, 0.0], [1.0, -1.0], [1.0, 1.0], 1.0)
    with pytest.raises(InvalidInputError):
        _assemble(np.eye(2), [0.0, 0.0], [1.0, 1.0], [1.0, 1.0], 0.0)
