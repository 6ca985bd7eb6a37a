"""Time-dependent overlap of the two motional branches and its modulus.

The overlap of the g- and e-evolved motional states of an entangled
spin-motion superposition has the closed form

    O(t) = exp(1/4 w^T Omega^-1 w) / sqrt(det Omega) * |G0|^2,

with the complex symmetric 4N x 4N matrix and 4N vector

    Omega = [[1 - L+,  -i L-], [-i L-,  1 + L+]],      w = (S+, -i S-),
    L±_jk = 1/2 A_jk [exp(-i (w^e_j + w^e_k) t) ± 1],
    S±_j  = S_j(beta*) ± S_j(beta) exp(-i w^e_j t),
    S_j(beta) = sum_k A_jk beta_k - beta_j*.

Production evaluation goes through the Schur complement of Xi = 1 + L+:

    Theta = (1 - L+) + L- Xi^-1 L-,     det Omega = det Xi det Theta,
    w^T Omega^-1 w = z^T Theta^-1 z - S-^T Xi^-1 S-,   z = S+ + L- Xi^-1 S-,

which needs only 2N x 2N solves.  The direct 4N x 4N assembly is kept
behind a debug flag for cross-checking.  Only |O| is contractually
meaningful; the phase of sqrt(det Omega) uses the principal branch of the
accumulated log-determinant with no continuity tracking.

The fringe contrast (visibility) is V(t) = |O(t)|, and the Ramsey
ground-state probability after the closing pulse is
P_g = 1/2 {1 + Re[exp(i phi) O(t)]}.
"""

from dataclasses import dataclass, field

import numpy as np

from . import crystal, quench
from .errors import (
    ConvergenceViolationError,
    InvalidInputError,
    NumericError,
    SimulationError,
)

# batched time evaluation is chunked to bound the (M, 2N, 2N) temporaries
_CHUNK = 4096


@dataclass(frozen=True)
class VisibilitySeries:
    """Overlap and visibility sampled on a time grid (units of 1/nu_x)."""

    times: np.ndarray
    overlap: np.ndarray     # complex
    visibility: np.ndarray  # |overlap|


@dataclass(frozen=True)
class OmegaAssembly:
    """The full Gaussian-integral objects at one instant, for diagnostics."""

    Lambda_plus: np.ndarray
    Lambda_minus: np.ndarray
    S_plus: np.ndarray
    S_minus: np.ndarray
    Omega: np.ndarray  # (4N, 4N) complex symmetric
    w: np.ndarray      # (4N,) complex


@dataclass(frozen=True)
class CurvatureSurface:
    """Short-time curvature eta over a (Delta, g) grid.

    eta has shape (len(delta_values), len(g_values)); points where either
    structure is unstable hold NaN, with the reason kept in failures.
    """

    delta_values: np.ndarray
    g_values: np.ndarray
    eta: np.ndarray
    failures: list = field(default_factory=list)


def _parts(qmap, ts):
    """L+, L-, S+, S- stacked over a time array of shape (M,)."""
    a_matrix = qmap.A
    s_vec = a_matrix @ qmap.beta_e - qmap.beta_e  # beta_e is real
    ph1 = np.exp(-1j * np.outer(ts, qmap.omega_e))        # (M, 2N)
    pair = ph1[:, :, None] * ph1[:, None, :]              # (M, 2N, 2N)
    lam_p = 0.5 * a_matrix[None, :, :] * (pair + 1.0)
    lam_m = 0.5 * a_matrix[None, :, :] * (pair - 1.0)
    s_plus = s_vec[None, :] * (1.0 + ph1)
    s_minus = s_vec[None, :] * (1.0 - ph1)
    return lam_p, lam_m, s_plus, s_minus


def _overlap_batch(qmap, ts):
    """Schur-complement evaluation of O(t) over a time array."""
    lam_p, lam_m, s_plus, s_minus = _parts(qmap, ts)
    eye = np.eye(qmap.size)
    xi = eye[None, :, :] + lam_p
    try:
        y = np.linalg.solve(xi, s_minus[..., None])[..., 0]
        xi_inv_lm = np.linalg.solve(xi, lam_m)
    except np.linalg.LinAlgError as err:
        raise NumericError(f"Xi block is singular: {err}",
                           diagnostics={"t": ts}) from err
    theta = (eye[None, :, :] - lam_p) + lam_m @ xi_inv_lm
    z = s_plus + (lam_m @ y[..., None])[..., 0]
    try:
        x = np.linalg.solve(theta, z[..., None])[..., 0]
    except np.linalg.LinAlgError as err:
        raise NumericError(f"Theta block is singular: {err}",
                           diagnostics={"t": ts}) from err
    quad = np.sum(z * x, axis=-1) - np.sum(s_minus * y, axis=-1)
    sign_xi, logabs_xi = np.linalg.slogdet(xi)
    sign_th, logabs_th = np.linalg.slogdet(theta)
    logabs = logabs_xi + logabs_th
    angle = np.angle(sign_xi * sign_th)
    overlap = np.exp(0.25 * quad - 0.5 * logabs - 0.5j * angle) * qmap.G0 ** 2
    if not np.all(np.isfinite(overlap)):
        raise NumericError(
            "overlap evaluation produced non-finite values",
            diagnostics={
                "cond_xi": float(np.max(np.linalg.cond(xi))),
                "cond_theta": float(np.max(np.linalg.cond(theta))),
            })
    return overlap


def assemble_omega(qmap, t):
    """Build the full 4N x 4N matrix and 4N vector at one instant."""
    lam_p, lam_m, s_plus, s_minus = _parts(qmap, np.atleast_1d(float(t)))
    lam_p, lam_m = lam_p[0], lam_m[0]
    s_plus, s_minus = s_plus[0], s_minus[0]
    eye = np.eye(qmap.size)
    omega = np.block([[eye - lam_p, -1j * lam_m],
                      [-1j * lam_m, eye + lam_p]])
    w = np.concatenate([s_plus, -1j * s_minus])
    return OmegaAssembly(Lambda_plus=lam_p, Lambda_minus=lam_m,
                         S_plus=s_plus, S_minus=s_minus, Omega=omega, w=w)


def _overlap_direct(qmap, t):
    om = assemble_omega(qmap, t)
    try:
        sol = np.linalg.solve(om.Omega, om.w)
    except np.linalg.LinAlgError as err:
        raise NumericError(f"Omega is singular at t={t}: {err}") from err
    quad = om.w @ sol
    sign, logabs = np.linalg.slogdet(om.Omega)
    return complex(np.exp(0.25 * quad - 0.5 * logabs - 0.5j * np.angle(sign))
                   * qmap.G0 ** 2)


def overlap_at(qmap, t, direct=False, validate=False):
    """Complex overlap O(t) of the two evolved motional states.

    direct=True evaluates through the assembled 4N x 4N matrix instead of
    the Schur complement (debug cross-check).  validate=True additionally
    verifies that every eigenvalue of the assembled matrix has a positive
    real part, which a physical map (spectral norm of the kernel < 1)
    guarantees.
    """
    t = float(t)
    if t < 0:
        raise InvalidInputError(f"t must be non-negative, got {t}")
    if validate:
        om = assemble_omega(qmap, t)
        re_min = float(np.min(np.linalg.eigvals(om.Omega).real))
        if re_min <= 0:
            raise ConvergenceViolationError(
                f"Omega eigenvalue with real part {re_min:.3e} <= 0 at t={t}; "
                "the squeezing kernel upstream must have spectral norm >= 1")
    if direct:
        return _overlap_direct(qmap, t)
    return complex(_overlap_batch(qmap, np.array([t]))[0])


def visibility_series(qmap, t_grid):
    """V(t) = |O(t)| element-wise on a sorted, non-negative time grid."""
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or t_grid.size == 0:
        raise InvalidInputError("t_grid must be a non-empty 1-d array")
    if t_grid[0] < 0 or np.any(np.diff(t_grid) < 0):
        raise InvalidInputError("t_grid must be sorted and non-negative")
    overlap = np.empty(t_grid.size, dtype=complex)
    for start in range(0, t_grid.size, _CHUNK):
        chunk = t_grid[start:start + _CHUNK]
        overlap[start:start + _CHUNK] = _overlap_batch(qmap, chunk)
    vis = np.abs(overlap)
    if np.max(vis) > 1.0 + 1e-9:
        raise NumericError(
            f"visibility exceeds unity by {np.max(vis) - 1.0:.3e}")
    for arr in (t_grid, overlap, vis):
        arr.setflags(write=False)
    return VisibilitySeries(times=t_grid, overlap=overlap, visibility=vis)


def ramsey_probability(overlap, phi):
    """Probability of finding the central ion back in its ground state."""
    overlap = complex(overlap)
    if abs(overlap) > 1.0 + 1e-9:
        raise InvalidInputError(
            f"|overlap| = {abs(overlap):.12f} exceeds 1")
    prob = 0.5 * (1.0 + (np.exp(1j * phi) * overlap).real)
    return float(min(max(prob, 0.0), 1.0))


def curvature(qmap):
    """Short-time curvature eta of V(t) = 1 + eta t^2 / 2 (units nu_x^2).

    Richardson-extrapolated central second differences at t = 0 with
    steps h and h/2, h = 1e-3 / max(omega_e); eta equals minus the
    variance of the post-quench Hamiltonian in the initial state.
    """
    h = 1e-3 / float(np.max(qmap.omega_e))
    vis = np.abs(_overlap_batch(qmap, np.array([0.0, 0.5 * h, h])))
    d_h = 2.0 * (vis[2] - vis[0]) / h ** 2
    d_half = 2.0 * (vis[1] - vis[0]) / (0.5 * h) ** 2
    eta = (4.0 * d_half - d_h) / 3.0
    if eta > 1e-9:
        raise NumericError(
            f"curvature came out positive ({eta:.3e}); "
            "the second-difference step is inconsistent with this map")
    return float(eta)


def curvature_surface(n, delta_grid, g_grid, hbar_tilde):
    """Curvature on a (Delta, g) grid; unstable points are NaN, not fatal."""
    delta_grid = np.asarray(delta_grid, dtype=float)
    g_grid = np.asarray(g_grid, dtype=float)
    if delta_grid.size == 0 or g_grid.size == 0:
        raise InvalidInputError("grids must be non-empty")
    eta = np.full((delta_grid.size, g_grid.size), np.nan)
    failures = []
    for i, delta in enumerate(delta_grid):
        for j, g in enumerate(g_grid):
            try:
                system = crystal.ChainSystem.from_g_delta(n, g, delta)
                qmap = quench.prepare_quench(system, hbar_tilde)
                eta[i, j] = curvature(qmap)
            except SimulationError as err:
                failures.append((i, j, f"{type(err).__name__}: {err}"))
    return CurvatureSurface(delta_values=delta_grid, g_values=g_grid,
                            eta=eta, failures=failures)


def revival_peaks(times, values, min_height):
    """Times of strict local maxima above min_height, parabolically refined."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    peaks = []
    for k in range(1, len(values) - 1):
        if values[k] > values[k - 1] and values[k] > values[k + 1] \
                and values[k] > min_height:
            denom = values[k - 1] - 2.0 * values[k] + values[k + 1]
            offset = 0.0
            if denom < 0:
                offset = 0.5 * (values[k - 1] - values[k + 1]) / denom
            dt = times[k + 1] - times[k]
            peaks.append(times[k] + offset * dt)
    return np.array(peaks)


def first_revival_time(series, threshold=0.05):
    """First local maximum of V above threshold after V first drops below it.

    Returns None when the visibility never collapses below the threshold
    or never recovers above it.
    """
    vis = series.visibility
    below = np.nonzero(vis < threshold)[0]
    if below.size == 0:
        return None
    start = below[0]
    peaks = revival_peaks(series.times[start:], vis[start:], threshold)
    if peaks.size == 0:
        return None
    return float(peaks[0])
