"""Finite-window Fourier analysis of the visibility signal.

Transforms are plain finite-window integrals on a uniform grid,

    F(w_n)   = (1/T) int_0^T V(t) exp(-i w_n t) dt,
    F_L(w_n) = (1/T) int_0^T ln[V(t)] exp(-i w_n t) dt,

with w_n = 2 pi n / T, evaluated by the trapezoid rule (endpoint samples
wrap exactly because exp(-i w_n T) = 1).  The log channel clamps V at
eps_log = 1e-12 and records how many samples were clamped.  Peaks of
|F_L| are labeled against the excited-state mode frequencies, their
doubles, and pairwise sums.
"""

from dataclasses import dataclass, field

import numpy as np

from . import crystal, quench, visibility
from .errors import InvalidInputError, SimulationError

EPS_LOG = 1e-12

# spectrum defaults: window covering many soft-mode periods with dense
# sampling of the fastest mode, satisfying T nu_min >> 1
DEFAULT_WINDOW_PERIODS = 400
DEFAULT_POINTS_PER_PERIOD = 32


@dataclass(frozen=True)
class Peak:
    omega: float
    magnitude: float
    label: str


@dataclass(frozen=True)
class SpectrumResult:
    """Both transforms on the w_n grid, plus any labeled peaks of |F_L|."""

    frequencies: np.ndarray  # 2 pi n / T, n = 0 .. M-1
    F: np.ndarray            # transform of V
    F_log: np.ndarray        # transform of ln V
    window: float            # T
    clamped_count: int
    peaks: list = field(default_factory=list)


@dataclass(frozen=True)
class SpectrumMap:
    """|F_L| stacked over a g sweep on a common frequency grid."""

    g_values: np.ndarray
    frequencies: np.ndarray
    magnitude: np.ndarray  # (len(frequencies), len(g_values))
    failures: list = field(default_factory=list)


def _wrap_endpoints(samples):
    """Fold the trapezoid endpoint weights into a length-M DFT input."""
    wrapped = samples[:-1].astype(float).copy()
    wrapped[0] = 0.5 * (samples[0] + samples[-1])
    return wrapped


def compute_spectra(series, window_T=None):
    """Finite-window transforms of a visibility series covering [0, T]."""
    t = series.times
    if t.size < 3:
        raise InvalidInputError("series too short for a spectrum")
    if abs(t[0]) > 1e-12:
        raise InvalidInputError("series must start at t = 0")
    dt = np.diff(t)
    if np.max(np.abs(dt - dt[0])) > 1e-9 * dt[0]:
        raise InvalidInputError("series must be uniformly sampled")
    span = float(t[-1])
    if window_T is None:
        window_T = span
    elif abs(span - window_T) > 1e-9 * window_T:
        raise InvalidInputError(
            f"series spans {span}, expected window {window_T}")

    m = t.size - 1
    vis = series.visibility
    clamped = int(np.count_nonzero(vis < EPS_LOG))
    log_vis = np.log(np.maximum(vis, EPS_LOG))

    f_vis = np.fft.fft(_wrap_endpoints(vis)) / m
    f_log = np.fft.fft(_wrap_endpoints(log_vis)) / m
    freqs = 2.0 * np.pi * np.arange(m) / window_T
    for arr in (freqs, f_vis, f_log):
        arr.setflags(write=False)
    return SpectrumResult(frequencies=freqs, F=f_vis, F_log=f_log,
                          window=window_T, clamped_count=clamped)


def _candidates(mode_freqs):
    """(frequency, label) candidates: singles, doubles, pairwise sums."""
    mode_freqs = np.sort(np.asarray(mode_freqs, dtype=float))
    cands = [(w, f"w{j + 1}") for j, w in enumerate(mode_freqs)]
    cands += [(2.0 * w, f"2w{j + 1}") for j, w in enumerate(mode_freqs)]
    for j in range(len(mode_freqs)):
        for k in range(j + 1, len(mode_freqs)):
            cands.append((mode_freqs[j] + mode_freqs[k], f"w{j + 1}+w{k + 1}"))
    return cands


def label_peaks(spec, mode_freqs, tol=None, min_magnitude=None):
    """Label local maxima of |F_L| against combinations of mode frequencies.

    A peak is a sample strictly greater than both neighbors, above
    min_magnitude (default: 5% of the largest nonzero-frequency |F_L|).
    Each peak gets the nearest candidate within tol (default: one
    frequency bin, 2 pi / T); otherwise it is "unassigned".
    """
    if tol is None:
        tol = 2.0 * np.pi / spec.window
    nyquist = spec.frequencies.size // 2
    mag = np.abs(spec.F_log[:nyquist + 1])
    if min_magnitude is None:
        min_magnitude = 0.05 * (np.max(mag[1:]) if mag.size > 1 else 0.0)
    cands = _candidates(mode_freqs)

    peaks = []
    for n in range(1, len(mag) - 1):
        if not (mag[n] > mag[n - 1] and mag[n] > mag[n + 1]):
            continue
        if mag[n] < min_magnitude:
            continue
        w_peak = spec.frequencies[n]
        best = None
        best_dist = tol
        for w_cand, label in cands:
            dist = abs(w_cand - w_peak)
            if dist < best_dist:
                best, best_dist = label, dist
        peaks.append(Peak(omega=float(w_peak), magnitude=float(mag[n]),
                          label=best if best is not None else "unassigned"))
    return SpectrumResult(frequencies=spec.frequencies, F=spec.F,
                          F_log=spec.F_log, window=spec.window,
                          clamped_count=spec.clamped_count, peaks=peaks)


def spectrum_for_map(qmap, window_T=None,
                     points_per_period=DEFAULT_POINTS_PER_PERIOD):
    """Visibility spectrum of one quench map with labeled peaks."""
    if window_T is None:
        window_T = DEFAULT_WINDOW_PERIODS * 2.0 * np.pi / float(qmap.omega_e[0])
    dt = 2.0 * np.pi / (points_per_period * float(np.max(qmap.omega_e)))
    m = max(int(round(window_T / dt)), 16)
    t_grid = np.linspace(0.0, window_T, m + 1)
    series = visibility.visibility_series(qmap, t_grid)
    spec = compute_spectra(series, window_T)
    return label_peaks(spec, qmap.omega_e)


def spectrum_map(n, delta, g_grid, window_T, hbar_tilde,
                 points_per_period=DEFAULT_POINTS_PER_PERIOD):
    """|F_L| columns over a g sweep at fixed Delta, common frequency grid."""
    g_grid = np.asarray(g_grid, dtype=float)
    if g_grid.size == 0:
        raise InvalidInputError("g grid must be non-empty")
    maps = {}
    failures = []
    omega_fast = 0.0
    for j, g in enumerate(g_grid):
        try:
            system = crystal.ChainSystem.from_g_delta(n, g, delta)
            maps[j] = quench.prepare_quench(system, hbar_tilde)
            omega_fast = max(omega_fast, float(np.max(maps[j].omega_e)))
        except SimulationError as err:
            failures.append((j, f"{type(err).__name__}: {err}"))
    if not maps:
        raise InvalidInputError("no stable point on the g grid")

    dt = 2.0 * np.pi / (points_per_period * omega_fast)
    m = max(int(round(window_T / dt)), 16)
    t_grid = np.linspace(0.0, window_T, m + 1)
    freqs = 2.0 * np.pi * np.arange(m // 2 + 1) / window_T
    mag = np.full((freqs.size, g_grid.size), np.nan)
    for j, qmap in maps.items():
        series = visibility.visibility_series(qmap, t_grid)
        spec = compute_spectra(series, window_T)
        mag[:, j] = np.abs(spec.F_log[:freqs.size])
    return SpectrumMap(g_values=g_grid, frequencies=freqs,
                       magnitude=mag, failures=failures)
