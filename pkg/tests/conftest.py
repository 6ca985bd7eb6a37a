"""Shared fixtures and independent test oracles."""

import numpy as np
import pytest

import ionquench as iq

# 9Be+ in a nu_x = 2pi x 1 MHz trap, the desk-scale workhorse
BE9_MASS_AMU = 9.0121831
NU_X = 2.0 * np.pi * 1.0e6


@pytest.fixture(scope="session")
def hbar_tilde_be():
    ell = iq.characteristic_length(BE9_MASS_AMU, 1.0, NU_X)
    return iq.params.HBAR / (BE9_MASS_AMU * iq.params.ATOMIC_MASS * NU_X * ell ** 2)


@pytest.fixture(scope="session")
def fig2b_map(hbar_tilde_be):
    """Quench map at the cross-transition point of the collapse-revival figure."""
    spec = iq.TrapSpec(3, BE9_MASS_AMU, 1.0, NU_X,
                       2.0 * np.pi * 1.545e6, 2.0 * np.pi * 0.245e6)
    dp = iq.derive_dimensionless(spec, iq.critical_aspect_ratio(3))
    system = iq.ChainSystem.from_params(dp, 3)
    return iq.prepare_quench(system, dp.hbar_tilde)


def z_trace_series(a_matrix, terms=40):
    """Normalization by the cluster-expansion trace series,
    Z = exp(-1/2 sum_l tr(A^(2l)) / (2l)); independent of the determinant
    route used in production."""
    a2 = a_matrix @ a_matrix
    power = np.eye(len(a_matrix))
    acc = 0.0
    for l in range(1, terms + 1):
        power = power @ a2
        acc += np.trace(power) / (2.0 * l)
    return float(np.exp(-0.5 * acc))


def random_symmetric_with_norm(rng, size, spectral_norm):
    """Random symmetric matrix with an exact given spectral norm."""
    basis, _ = np.linalg.qr(rng.standard_normal((size, size)))
    vals = rng.uniform(-1.0, 1.0, size)
    vals = vals / np.max(np.abs(vals)) * spectral_norm
    return basis @ np.diag(vals) @ basis.T


def random_rotation(rng, size):
    basis, r = np.linalg.qr(rng.standard_normal((size, size)))
    return basis * np.sign(np.diag(r))[None, :]


def fit_revival_period(peak_times, reference_period):
    """Least-squares revival period from peak times near integer multiples.

    Secondary displaced modes suppress some revivals and shift the
    survivors by a few percent, so consecutive peak differences are a
    noisy estimator; fitting t_k ~ T k over the nearest-integer
    assignment recovers the underlying period."""
    peak_times = np.asarray(peak_times, dtype=float)
    k = np.maximum(np.round(peak_times / reference_period), 1.0)
    return float(np.sum(k * peak_times) / np.sum(k * k))


def make_map(n, g, delta, hbar_tilde):
    system = iq.ChainSystem.from_g_delta(n, g, delta)
    return iq.prepare_quench(system, hbar_tilde)
