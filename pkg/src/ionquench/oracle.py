"""Brute-force truncated Fock-space reference for 1- and 2-mode quenches.

Builds position and momentum operators on the truncated number basis of
the post-quench (e) modes, expresses the pre-quench (g) Hamiltonian
through the coordinate relation Q^g = T Q^e + D, finds its ground state
by dense diagonalization, and propagates with the diagonal e-mode phases.
The zero-point and classical-offset phases are dropped so the reported
complex overlap is directly comparable with the closed-form evaluation
(which tracks coherent-state labels only); |O| is unaffected.

Validation only: never a production path, capped at 2 modes.
"""

from dataclasses import dataclass

import numpy as np

from . import quench
from .errors import CutoffError, InvalidInputError

_MAX_DENSE_DIM = 14400


@dataclass(frozen=True)
class FockInstance:
    """A small synthetic quench with an explicit truncation."""

    n_modes: int
    omega_g: np.ndarray
    omega_e: np.ndarray
    T_rot: np.ndarray         # orthogonal mode mixing
    displacement: np.ndarray  # mode displacements D
    cutoff: int               # Fock states per mode
    hbar_tilde: float = 1.0

    def __post_init__(self):
        if self.n_modes not in (1, 2):
            raise InvalidInputError(
                f"oracle supports 1 or 2 modes, got {self.n_modes}")
        for name in ("omega_g", "omega_e", "displacement"):
            arr = np.asarray(getattr(self, name), dtype=float)
            if arr.shape != (self.n_modes,):
                raise InvalidInputError(
                    f"{name} must have shape ({self.n_modes},), got {arr.shape}")
            object.__setattr__(self, name, arr)
        if np.any(self.omega_g <= 0) or np.any(self.omega_e <= 0):
            raise InvalidInputError("mode frequencies must be positive")
        t_rot = np.asarray(self.T_rot, dtype=float)
        if t_rot.shape != (self.n_modes, self.n_modes):
            raise InvalidInputError(
                f"T_rot must be {self.n_modes} x {self.n_modes}")
        if np.max(np.abs(t_rot.T @ t_rot - np.eye(self.n_modes))) > 1e-10:
            raise InvalidInputError("T_rot must be orthogonal")
        object.__setattr__(self, "T_rot", t_rot)
        if self.cutoff < 20:
            raise InvalidInputError(f"cutoff must be >= 20, got {self.cutoff}")
        if self.cutoff ** self.n_modes > _MAX_DENSE_DIM:
            raise InvalidInputError(
                f"dense dimension {self.cutoff ** self.n_modes} exceeds "
                f"{_MAX_DENSE_DIM}")
        if self.hbar_tilde <= 0:
            raise InvalidInputError("hbar_tilde must be positive")


def synthetic_quench_map(omega_g, omega_e, T_rot, displacement, hbar_tilde=1.0):
    """QuenchMap assembled directly from mode data, bypassing any crystal."""
    t_rot = np.asarray(T_rot, dtype=float)
    if np.max(np.abs(t_rot.T @ t_rot - np.eye(len(t_rot)))) > 1e-10:
        raise InvalidInputError("T_rot must be orthogonal")
    return quench._assemble(t_rot, displacement, omega_g, omega_e, hbar_tilde)


def _mode_operators(cutoff, omega):
    """Scaled position and i-times-momentum on one truncated oscillator.

    The momentum is returned as the real antisymmetric matrix
    W = -i P = sqrt(omega/2) (a_dag - a), so the whole Hamiltonian build
    stays in real arithmetic (P P = -W W).
    """
    ladder = np.diag(np.sqrt(np.arange(1, cutoff)), 1)  # annihilation
    x_op = (ladder + ladder.T) / np.sqrt(2.0 * omega)
    w_op = np.sqrt(omega / 2.0) * (ladder.T - ladder)
    return x_op, w_op


def _embedded_operators(inst, cutoff):
    """Position/momentum of each e mode embedded in the product space."""
    xs, ws = [], []
    for k in range(inst.n_modes):
        x_op, w_op = _mode_operators(cutoff, inst.omega_e[k])
        if inst.n_modes == 1:
            xs.append(x_op)
            ws.append(w_op)
        else:
            eye = np.eye(cutoff)
            if k == 0:
                xs.append(np.kron(x_op, eye))
                ws.append(np.kron(w_op, eye))
            else:
                xs.append(np.kron(eye, x_op))
                ws.append(np.kron(eye, w_op))
    return xs, ws


def _ground_state(inst, cutoff):
    """Ground state of the g Hamiltonian in the truncated e basis."""
    xs, ws = _embedded_operators(inst, cutoff)
    dim = cutoff ** inst.n_modes
    # positions and momenta are rescaled by sqrt(hbar_tilde), so H/hbar_tilde
    # depends on the displacement only through D / sqrt(hbar_tilde)
    shift = inst.displacement / np.sqrt(inst.hbar_tilde)
    ham = np.zeros((dim, dim))
    for j in range(inst.n_modes):
        x_j = sum(inst.T_rot[j, k] * xs[k] for k in range(inst.n_modes))
        w_j = sum(inst.T_rot[j, k] * ws[k] for k in range(inst.n_modes))
        x_j = x_j + shift[j] * np.eye(dim)
        ham += -0.5 * (w_j @ w_j) + 0.5 * inst.omega_g[j] ** 2 * (x_j @ x_j)
    ham = 0.5 * (ham + ham.T)
    _, vecs = np.linalg.eigh(ham)
    psi0 = vecs[:, 0]

    counts = np.arange(cutoff)
    if inst.n_modes == 1:
        energies = inst.omega_e[0] * counts
        number = counts.astype(float)
    else:
        energies = np.add.outer(inst.omega_e[0] * counts,
                                inst.omega_e[1] * counts).ravel()
        number = np.add.outer(counts, counts).ravel().astype(float)
    return psi0, energies, number


def _overlap_values(inst, cutoff, ts):
    psi0, energies, _ = _ground_state(inst, cutoff)
    weights = np.abs(psi0) ** 2
    return np.exp(-1j * np.outer(ts, energies)) @ weights


def fock_overlap(inst, t, certify=False):
    """Overlap O(t) by dense truncated-basis propagation.

    certify=True re-evaluates at double the cutoff and raises CutoffError
    if the reported overlap moves by more than 1e-9.
    """
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    values = _overlap_values(inst, inst.cutoff, ts)
    if certify:
        if (2 * inst.cutoff) ** inst.n_modes > _MAX_DENSE_DIM:
            raise CutoffError(
                f"cannot certify: doubled cutoff {2 * inst.cutoff} exceeds the "
                f"dense cap; start from a smaller cutoff")
        refined = _overlap_values(inst, 2 * inst.cutoff, ts)
        drift = float(np.max(np.abs(refined - values)))
        if drift > 1e-9:
            raise CutoffError(
                f"truncation not converged: doubling the cutoff moved the "
                f"overlap by {drift:.3e}; increase cutoff beyond {inst.cutoff}")
        values = refined
    return values if np.ndim(t) else complex(values[0])


def fock_ground_variance(inst):
    """Variance of the e-state Hamiltonian (units hbar_tilde nu_x) in the
    g ground state; equals -eta for the corresponding quench map."""
    psi0, energies, _ = _ground_state(inst, inst.cutoff)
    weights = np.abs(psi0) ** 2
    mean = float(weights @ energies)
    return float(weights @ (energies - mean) ** 2)


def fock_vacuum_overlap(inst):
    """|<vac_e|0_g>|: modulus of the overlap of the two ground states."""
    psi0, _, _ = _ground_state(inst, inst.cutoff)
    return float(abs(psi0[0]))
