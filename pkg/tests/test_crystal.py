"""Potential surface, equilibria, structures, and critical lines."""

import numpy as np
import pytest

import ionquench as iq
from ionquench.crystal import EquilibriumConfiguration
from ionquench.errors import (
    InvalidInputError,
    SingularConfigurationError,
    UnstableStructureError,
)


def two_ion_system(alpha=3.0, alpha_dip=0.0):
    return iq.ChainSystem(2, alpha, alpha_dip)


def three_ion_system(alpha, alpha_dip=0.0):
    return iq.ChainSystem(3, alpha, alpha_dip)


# --- potential energy ------------------------------------------------------

def test_two_ion_energy_analytic():
    x = (0.25) ** (1.0 / 3.0)
    positions = np.array([-x, x, 0.0, 0.0])
    energy = iq.potential_energy(positions, two_ion_system(), "g")
    assert energy == pytest.approx(3.0 * 0.25 ** (2.0 / 3.0), rel=1e-12)


def test_dip_term_is_excited_state_difference():
    rng = np.random.default_rng(0)
    system = three_ion_system(2.5, alpha_dip=0.37)
    for _ in range(10):
        positions = rng.standard_normal(6) * 0.8
        positions[:3] += np.array([-1.2, 0.0, 1.2])
        e_g = iq.potential_energy(positions, system, "g")
        e_e = iq.potential_energy(positions, system, "e")
        y_c = positions[3 + 1]
        assert e_e - e_g == pytest.approx(0.5 * 0.37 * y_c ** 2, rel=1e-12, abs=1e-15)


def test_coincident_ions_raise():
    positions = np.array([0.3, 0.3, 0.0, 0.0])
    with pytest.raises(SingularConfigurationError):
        iq.potential_energy(positions, two_ion_system(), "g")
    with pytest.raises(SingularConfigurationError):
        iq.potential_gradient(positions, two_ion_system(), "g")
    with pytest.raises(SingularConfigurationError):
        iq.potential_hessian(positions, two_ion_system(), "g")


# --- gradient --------------------------------------------------------------

def finite_difference_gradient(positions, system, state, h=1e-6):
    grad = np.zeros_like(positions)
    for k in range(positions.size):
        up, down = positions.copy(), positions.copy()
        up[k] += h
        down[k] -= h
        grad[k] = (iq.potential_energy(up, system, state)
                   - iq.potential_energy(down, system, state)) / (2 * h)
    return grad


def test_gradient_zero_at_equilibrium():
    system = three_ion_system(2.6)
    eq = iq.find_equilibrium(system, "g")
    grad = iq.potential_gradient(eq.positions, system, "g")
    assert np.max(np.abs(grad)) < 1e-10


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(42)
    for system, state in [(three_ion_system(2.7, 0.1), "g"),
                          (three_ion_system(2.2, 0.3), "e"),
                          (iq.ChainSystem(5, 4.0, 0.2), "e")]:
        n = system.ion_count
        positions = np.concatenate([
            np.sort(rng.uniform(-1.5, 1.5, n) + np.linspace(-n / 2, n / 2, n)),
            rng.uniform(-0.4, 0.4, n)])
        grad = iq.potential_gradient(positions, system, state)
        fd = finite_difference_gradient(positions, system, state)
        scale = np.max(np.abs(fd))
        assert np.max(np.abs(grad - fd)) / scale < 1e-8


def test_soft_mode_displacement_gradient():
    # transverse displacement along the zigzag pattern (1,-2,1)/sqrt(6) of
    # the 3-ion linear chain has restoring slope (alpha - 12/5); a bare
    # central-ion displacement instead sees the diagonal element
    # alpha - 2/d^3 = alpha - 8/5
    alpha = 2.9
    system = three_ion_system(alpha)
    x_lin = iq.linear_chain_positions(3)
    eps = 1e-5
    soft = np.array([1.0, -2.0, 1.0]) / np.sqrt(6.0)

    positions = np.concatenate([x_lin, eps * soft])
    grad_y = iq.potential_gradient(positions, system, "g")[3:]
    slope = (grad_y @ soft) / eps
    assert slope == pytest.approx(alpha - 12.0 / 5.0, abs=1e-8)

    positions = np.concatenate([x_lin, [0.0, eps, 0.0]])
    grad_y = iq.potential_gradient(positions, system, "g")[3:]
    assert grad_y[1] / eps == pytest.approx(alpha - 8.0 / 5.0, abs=1e-8)


# --- find_equilibrium ------------------------------------------------------

def test_three_ion_linear_chain_positions():
    system = three_ion_system(3.0)  # above critical
    eq = iq.find_equilibrium(system, "g")
    d = (5.0 / 4.0) ** (1.0 / 3.0)
    assert eq.structure == "linear"
    assert eq.x == pytest.approx([-d, 0.0, d], abs=1e-10)
    assert np.max(np.abs(eq.y)) < 1e-10


def test_zigzag_just_below_critical():
    system = three_ion_system(2.4 - 0.01)
    eq = iq.find_equilibrium(system, "g")
    assert eq.structure == "zigzag"
    grad = iq.potential_gradient(eq.positions, system, "g")
    assert np.max(np.abs(grad)) < 1e-10
    amp = np.max(np.abs(eq.y))
    assert amp > 1e-3
    # amplitude shrinks approaching the instability from below
    eq_closer = iq.find_equilibrium(three_ion_system(2.4 - 0.002), "g")
    assert np.max(np.abs(eq_closer.y)) < amp


def test_identity_seed_is_fixed_point():
    system = three_ion_system(2.3)
    eq = iq.find_equilibrium(system, "g")
    again = iq.find_equilibrium(system, "g", seed=eq.positions)
    assert np.max(np.abs(again.positions - eq.positions)) < 1e-12


def test_equilibrium_invariants():
    for n, g, delta, state in [(3, -0.01, 0.025, "g"), (3, -0.01, 0.025, "e"),
                               (5, -0.03, 0.01, "g"), (7, 0.02, 0.025, "e")]:
        system = iq.ChainSystem.from_g_delta(n, g, delta)
        eq = iq.find_equilibrium(system, state)
        grad = iq.potential_gradient(eq.positions, system, state)
        assert np.max(np.abs(grad)) < 1e-10
        hess = iq.potential_hessian(eq.positions, system, state)
        assert np.linalg.eigvalsh(hess)[0] > -1e-9
        # reflection symmetry about the trap center
        assert eq.x == pytest.approx(-eq.x[::-1], abs=1e-9)
        assert np.abs(eq.y) == pytest.approx(np.abs(eq.y)[::-1], abs=1e-9)


def test_canonical_branch_and_seed_sign_independence():
    system = three_ion_system(2.35)
    eq = iq.find_equilibrium(system, "g")
    assert eq.structure == "zigzag"
    assert eq.y[1] > 0  # central ion on the canonical branch
    # seeding from the mirrored well lands on the same canonical result
    mirrored = eq.positions.copy()
    mirrored[3:] = -mirrored[3:]
    eq2 = iq.find_equilibrium(system, "g", seed=mirrored)
    assert np.max(np.abs(eq2.positions - eq.positions)) < 1e-9
    # and without canonicalization the mirrored branch survives
    eq3 = iq.find_equilibrium(system, "g", seed=mirrored, canonical_branch=False)
    assert eq3.y[1] < 0


# --- classification --------------------------------------------------------

def make_config(x, y, structure=None):
    positions = np.concatenate([x, y])
    return EquilibriumConfiguration("g", positions, 0.0,
                                    structure or ("linear" if np.max(np.abs(y)) < 1e-6
                                                  else "zigzag"))


def test_classify_structure_deadband():
    x = np.array([-1.0, 0.0, 1.0])
    assert iq.classify_structure(make_config(x, np.zeros(3))) == "linear"
    assert iq.classify_structure(make_config(x, [0.3, -0.3, 0.3])) == "zigzag"
    assert iq.classify_structure(make_config(x, [1e-7, -1e-7, 1e-7])) == "linear"


def test_structure_follows_sign_of_g():
    for g in [-0.02, -0.005, -1e-4 * 1.5]:
        eq = iq.find_equilibrium(iq.ChainSystem.from_g_delta(3, g, 0.0), "g")
        assert eq.structure == "zigzag", g
    for g in [1.5e-4, 0.005, 0.02]:
        eq = iq.find_equilibrium(iq.ChainSystem.from_g_delta(3, g, 0.0), "g")
        assert eq.structure == "linear", g


def test_order_parameter_square_root_scaling():
    gs = np.linspace(-0.02, -0.001, 8)
    amps = []
    for g in gs:
        eq = iq.find_equilibrium(iq.ChainSystem.from_g_delta(3, g, 0.0), "g")
        amps.append(np.max(np.abs(eq.y)))
    slope = np.polyfit(np.log(-gs), np.log(amps), 1)[0]
    assert 0.45 <= slope <= 0.55


# --- symmetry invariances --------------------------------------------------

def test_energy_invariances():
    rng = np.random.default_rng(5)
    system = iq.ChainSystem(5, 3.0, 0.1)
    x = np.sort(rng.uniform(-2.5, 2.5, 5))
    y = rng.uniform(-0.5, 0.5, 5)
    positions = np.concatenate([x, y])
    e0 = iq.potential_energy(positions, system, "g")
    # relabeling invariance (g state has no distinguished ion)
    perm = rng.permutation(5)
    e1 = iq.potential_energy(np.concatenate([x[perm], y[perm]]), system, "g")
    assert e1 == pytest.approx(e0, rel=1e-14)
    # reflection (x, y) -> (-x, -y)
    e2 = iq.potential_energy(-positions, system, "g")
    assert e2 == pytest.approx(e0, rel=1e-14)


# --- critical lines --------------------------------------------------------

def test_critical_aspect_ratio_three_ions():
    assert iq.critical_aspect_ratio(3) == pytest.approx(2.4, abs=1e-9)


def test_critical_aspect_ratio_two_ions():
    assert iq.critical_aspect_ratio(2) == pytest.approx(1.0, abs=1e-9)


def test_critical_aspect_ratio_grows_with_n():
    ac3, ac5 = iq.critical_aspect_ratio(3), iq.critical_aspect_ratio(5)
    assert ac5 > ac3
    # dense-scan oracle: smallest transverse eigenvalue changes sign at ac5
    from ionquench.crystal import _transverse_coulomb
    x = iq.linear_chain_positions(5)
    coul = _transverse_coulomb(x)
    alphas = np.linspace(ac5 - 0.5, ac5 + 0.5, 1001)
    smallest = np.array([np.linalg.eigvalsh(a * np.eye(5) + coul)[0]
                         for a in alphas])
    crossings = np.nonzero(np.diff(np.sign(smallest)))[0]
    assert crossings.size == 1
    assert alphas[crossings[0]] <= ac5 <= alphas[crossings[0] + 1]


def test_phase_boundary_values():
    g_c = iq.phase_boundary(3, 0.025)
    assert g_c == pytest.approx(-0.0165, abs=5e-4)
    assert abs(iq.phase_boundary(3, 0.0)) < 1e-6
    g_c_small = iq.phase_boundary(3, 0.005)
    assert -0.0165 < g_c_small < 0.0
    # monotone in delta
    deltas = [0.005, 0.01, 0.015, 0.02, 0.025]
    bounds = [iq.phase_boundary(3, d) for d in deltas]
    assert all(b2 < b1 for b1, b2 in zip(bounds, bounds[1:]))


def test_phase_boundary_matches_structure_switch():
    g_c = iq.phase_boundary(3, 0.025)
    below = iq.phase_point(3, g_c - 2e-3, 0.025)
    above = iq.phase_point(3, g_c + 2e-3, 0.025)
    assert below.structure_g == "zigzag" and below.structure_e == "zigzag"
    assert above.structure_g == "zigzag" and above.structure_e == "linear"


def test_validation_errors():
    with pytest.raises(InvalidInputError):
        iq.ChainSystem(1, 2.0)
    with pytest.raises(InvalidInputError):
        iq.ChainSystem(3, -1.0)
    with pytest.raises(InvalidInputError):
        iq.phase_boundary(3, -0.1)
    with pytest.raises(InvalidInputError):
        iq.potential_energy(np.zeros(5), three_ion_system(2.5), "g")
    with pytest.raises(InvalidInputError):
        iq.potential_energy(np.zeros(6), three_ion_system(2.5), "x")
