"""Normal modes of a chain about a state-dependent equilibrium.

The mass-scaled Hessian of the potential at an equilibrium is
diagonalized by an orthogonal matrix M whose columns are the modes;
its eigenvalues are the squared mode frequencies in units of nu_x^2.
"""

from dataclasses import dataclass

import numpy as np

from . import crystal
from .errors import InvalidInputError, UnstableStructureError

# smallest admissible squared frequency; anything below this means the
# structure is (marginally) unstable and no phonon basis exists
OMEGA2_FLOOR = 1e-9

# eigenvalues closer than this count as degenerate for ordering purposes
_DEGENERACY_TOL = 1e-9


@dataclass(frozen=True)
class NormalModeBasis:
    """Orthogonal mode matrix and frequencies for one structure.

    Columns of mode_matrix are modes, ordered by ascending frequency;
    frequencies are in units of nu_x.
    """

    state_label: str
    mode_matrix: np.ndarray  # (2N, 2N)
    frequencies: np.ndarray  # (2N,)
    equilibrium: crystal.EquilibriumConfiguration | None = None

    @property
    def size(self):
        return self.frequencies.size


def hessian(config, system, state):
    """Mass-scaled Hessian of the state-s potential at an equilibrium."""
    return crystal.potential_hessian(config.positions, system, state)


def _fix_column_signs(vecs):
    """Largest-magnitude entry of each column made positive (ties: lowest index)."""
    idx = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs[None, :]


def _order_degenerate(vals, vecs):
    """Deterministic column order inside degenerate eigenvalue groups."""
    n = vals.size
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and vals[stop] - vals[stop - 1] <= _DEGENERACY_TOL * max(
                1.0, abs(vals[stop])):
            stop += 1
        if stop - start > 1:
            cols = sorted(range(start, stop), key=lambda j: tuple(vecs[:, j]))
            vecs[:, start:stop] = vecs[:, cols]
            vals[start:stop] = vals[cols]
        start = stop
    return vals, vecs


def normal_modes(hess, state, equilibrium=None):
    """Diagonalize a Hessian into a NormalModeBasis.

    Raises UnstableStructureError if any eigenvalue is below the omega^2
    floor, which happens exactly when an unstable structure (e.g. the
    e-state linear chain beyond g_c) is probed.
    """
    hess = np.asarray(hess, dtype=float)
    if hess.ndim != 2 or hess.shape[0] != hess.shape[1]:
        raise InvalidInputError(f"hessian must be square, got {hess.shape}")
    if not np.allclose(hess, hess.T, atol=1e-12, rtol=0.0):
        raise InvalidInputError("hessian must be symmetric")
    vals, vecs = np.linalg.eigh(hess)
    if vals[0] < OMEGA2_FLOOR:
        raise UnstableStructureError(
            f"unstable structure: smallest Hessian eigenvalue {vals[0]:.3e} "
            f"is below the omega^2 floor {OMEGA2_FLOOR:.0e}")
    vecs = _fix_column_signs(vecs)
    vals, vecs = _order_degenerate(vals.copy(), vecs.copy())
    freqs = np.sqrt(vals)
    vecs.setflags(write=False)
    freqs.setflags(write=False)
    return NormalModeBasis(
        state_label=state,
        mode_matrix=vecs,
        frequencies=freqs,
        equilibrium=equilibrium,
    )


def mode_basis(config, system, state=None):
    """Hessian plus diagonalization in one step for an equilibrium."""
    if state is None:
        state = config.state_label
    return normal_modes(hessian(config, system, state), state, equilibrium=config)
