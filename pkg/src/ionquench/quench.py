"""Bogoliubov map between the phonon bases of the two crystal structures.

Connecting the ground states of the g- and e-state quadratic Hamiltonians
requires, besides the mode-overlap matrix T and the mode displacements D,
the Bogoliubov coefficients

    u_jk = T_jk/2 (sqrt(w^e_k / w^g_j) + sqrt(w^g_j / w^e_k)),
    v_jk = T_jk/2 (sqrt(w^e_k / w^g_j) - sqrt(w^g_j / w^e_k)),

the squeezing kernel A = u^-1 v (real symmetric, spectral norm < 1), the
displacement amplitudes beta^g_j = sqrt(w^g_j / (2 hbar_tilde)) D_j and
beta^e = -(u + v)^T beta^g, the normalization Z = det(1 - A^2)^(1/4), the
squeezing parameters xi, and the ground-state overlap

    G0 = Z exp(1/2 beta^e.A.beta^e) exp(-1/2 |beta^e|^2).
"""

from dataclasses import dataclass

import numpy as np

from . import crystal, modes
from .errors import (
    IllConditionedMapError,
    InvalidInputError,
    NonPhysicalMapError,
    NumericError,
)

_COND_LIMIT = 1e12


@dataclass(frozen=True)
class QuenchMap:
    """Immutable bundle of everything the overlap formula needs."""

    T: np.ndarray        # mode overlap matrix, orthogonal (2N, 2N)
    D: np.ndarray        # mode displacements (2N,)
    beta_g: np.ndarray   # g-basis displacement amplitudes (2N,)
    u: np.ndarray        # Bogoliubov coefficients (2N, 2N)
    v: np.ndarray
    A: np.ndarray        # squeezing kernel, symmetric, ||A||_2 < 1
    beta_e: np.ndarray   # e-basis displacement amplitudes (2N,)
    Z: float             # vacuum-map normalization, in (0, 1]
    xi: np.ndarray       # squeezing parameters, symmetric (2N, 2N)
    G0: float            # ground-state overlap, in (0, 1]
    omega_e: np.ndarray  # e-state frequencies, carried for time evolution
    omega_g: np.ndarray
    hbar_tilde: float

    @property
    def size(self):
        return self.omega_e.size


def takagi_symmetric(a_matrix):
    """Factor a real symmetric matrix as Lambda diag(a) Lambda^T.

    For the real symmetric squeezing kernels arising here the Takagi
    factorization reduces to an orthogonal eigendecomposition with signed
    eigenvalues.  Raises NonPhysicalMapError if any |a_l| >= 1, since the
    kernel of a physical vacuum map is bounded by one in spectral norm.
    """
    a_matrix = np.asarray(a_matrix, dtype=float)
    if not np.allclose(a_matrix, a_matrix.T, atol=1e-10, rtol=0.0):
        raise InvalidInputError("squeezing kernel must be symmetric")
    vals, vecs = np.linalg.eigh(0.5 * (a_matrix + a_matrix.T))
    if np.max(np.abs(vals)) >= 1.0:
        raise NonPhysicalMapError(
            f"kernel eigenvalue with |a| = {np.max(np.abs(vals)):.6f} >= 1; "
            "the two structures are not connected by a physical vacuum map")
    # deterministic column signs, as in the mode matrices
    idx = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs[None, :], vals


def squeezing_parameters(lam, a_vals):
    """Squeezing parameter matrix xi = Lambda atanh(a) Lambda^T."""
    a_vals = np.asarray(a_vals, dtype=float)
    if np.max(np.abs(a_vals), initial=0.0) >= 1.0:
        raise NonPhysicalMapError(
            "atanh domain error: kernel eigenvalue with |a| >= 1")
    lam = np.asarray(lam, dtype=float)
    return (lam * np.arctanh(a_vals)[None, :]) @ lam.T


def _assemble(T, D, omega_g, omega_e, hbar_tilde):
    """Core constructor shared by the crystal path and the synthetic path."""
    T = np.asarray(T, dtype=float)
    D = np.asarray(D, dtype=float)
    omega_g = np.asarray(omega_g, dtype=float)
    omega_e = np.asarray(omega_e, dtype=float)
    if np.any(omega_g <= 0) or np.any(omega_e <= 0):
        raise InvalidInputError("all mode frequencies must be positive")
    if hbar_tilde <= 0:
        raise InvalidInputError("hbar_tilde must be positive")

    ratio = np.sqrt(omega_e[None, :] / omega_g[:, None])
    u = 0.5 * T * (ratio + 1.0 / ratio)
    v = 0.5 * T * (ratio - 1.0 / ratio)
    beta_g = np.sqrt(omega_g / (2.0 * hbar_tilde)) * D

    cond = np.linalg.cond(u)
    if not np.isfinite(cond) or cond > _COND_LIMIT:
        raise IllConditionedMapError(
            f"u block condition number {cond:.3e} exceeds {_COND_LIMIT:.0e}")
    try:
        a_raw = np.linalg.solve(u, v)
    except np.linalg.LinAlgError as err:
        raise IllConditionedMapError(f"u block is singular: {err}") from err
    asym = float(np.max(np.abs(a_raw - a_raw.T)))
    if asym > 1e-8:
        raise NumericError(
            f"squeezing kernel asymmetry {asym:.3e} from the u solve",
            diagnostics={"cond_u": cond})
    a_matrix = 0.5 * (a_raw + a_raw.T)

    lam, a_vals = takagi_symmetric(a_matrix)
    xi = squeezing_parameters(lam, a_vals)
    beta_e = -(u + v).T @ beta_g

    sign, logdet = np.linalg.slogdet(np.eye(len(a_vals)) - a_matrix @ a_matrix)
    if sign <= 0:
        raise NonPhysicalMapError("det(1 - A^2) is not positive")
    z_norm = float(np.exp(0.25 * logdet))
    g0 = float(z_norm * np.exp(0.5 * beta_e @ a_matrix @ beta_e
                               - 0.5 * beta_e @ beta_e))

    for arr in (T, D, beta_g, u, v, a_matrix, beta_e, xi, omega_e, omega_g):
        arr.setflags(write=False)
    return QuenchMap(T=T, D=D, beta_g=beta_g, u=u, v=v, A=a_matrix,
                     beta_e=beta_e, Z=z_norm, xi=xi, G0=g0,
                     omega_e=omega_e, omega_g=omega_g,
                     hbar_tilde=float(hbar_tilde))


def build_quench_map(basis_g, basis_e, hbar_tilde):
    """Full Bogoliubov bundle connecting two normal-mode bases.

    Both bases must be stable, of the same size, carry their equilibria,
    and (for zigzag structures) sit on the same canonical symmetry branch;
    otherwise the mode displacements silently pick up the inter-branch
    distance and every overlap collapses.
    """
    if basis_g.size != basis_e.size:
        raise InvalidInputError("bases must have the same number of modes")
    if basis_g.equilibrium is None or basis_e.equilibrium is None:
        raise InvalidInputError(
            "both bases must reference their equilibrium configurations")
    d = basis_e.equilibrium.positions - basis_g.equilibrium.positions
    T = basis_g.mode_matrix.T @ basis_e.mode_matrix
    D = basis_g.mode_matrix.T @ d
    return _assemble(T, D, basis_g.frequencies, basis_e.frequencies, hbar_tilde)


def ground_state_overlap(qmap):
    """Overlap of the two motional ground states, recomputed from the map."""
    return float(qmap.Z * np.exp(0.5 * qmap.beta_e @ qmap.A @ qmap.beta_e
                                 - 0.5 * qmap.beta_e @ qmap.beta_e))


def prepare_quench(system, hbar_tilde):
    """Equilibria, mode bases and Bogoliubov map for one ChainSystem."""
    eq_g = crystal.find_equilibrium(system, "g")
    eq_e = crystal.find_equilibrium(system, "e")
    basis_g = modes.mode_basis(eq_g, system)
    basis_e = modes.mode_basis(eq_e, system)
    return build_quench_map(basis_g, basis_e, hbar_tilde)
