"""Command-line surface: scenario configs in, figure-ready CSV data out.

Subcommands: visibility, curvature, phase-diagram, spectrum, spectrum-map,
revivals, modes.  Every run writes the requested dataset(s), a manifest
with all resolved physical and dimensionless parameters plus tolerances
(no timestamps, so reruns are byte-identical), and a separate runinfo
file carrying the timestamp.  Exit codes: 0 success, 2 config error,
3 numeric error.

Config files are flat INI key-value text; the full schema is documented
in the README.  Frequencies are given as nu / 2pi in Hz (keys *_hz).
"""

import argparse
import concurrent.futures
import configparser
import datetime
import hashlib
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import crystal, params, quench, spectrum, visibility
from .errors import ConfigError, SimulationError

_REQUIRED = object()

_TWO_PI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# config parsing

def load_config(path):
    if not os.path.isfile(path):
        raise ConfigError(f"config file not found: {path}")
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path, encoding="utf-8") as handle:
            parser.read_file(handle)
    except (configparser.Error, UnicodeDecodeError) as err:
        raise ConfigError(f"cannot parse {path}: {err}") from err
    return parser


def _get(cfg, section, key, cast, default=_REQUIRED):
    if not cfg.has_section(section) or not cfg.has_option(section, key):
        if default is _REQUIRED:
            raise ConfigError(f"[{section}] {key}: required key is missing")
        return default
    raw = cfg.get(section, key).strip()
    try:
        return cast(raw)
    except ValueError as err:
        raise ConfigError(f"[{section}] {key}: bad value {raw!r}: {err}") from err


def _int_list(raw):
    return [int(tok) for tok in raw.replace(",", " ").split()]


@dataclass
class Scenario:
    """Everything a command needs, resolved from one config file."""

    ion_count: int
    mass_amu: float
    charge_e: float
    nu_x: float          # angular, rad/s
    alpha_c: float
    nu_c: float          # angular
    hbar_tilde: float
    length_unit: float
    # quench point (None when the config has no [quench] section)
    g: float | None = None
    delta: float | None = None
    nu_y: float | None = None
    nu_dip: float | None = None
    # time grid
    t_max_us: float | None = None
    samples: int | None = None
    # spectrum window
    window_periods: float | None = None
    window_us: float | None = None
    points_per_period: int = spectrum.DEFAULT_POINTS_PER_PERIOD
    # sweep axes
    g_axis: np.ndarray | None = None
    delta_axis: np.ndarray | None = None
    sweep_delta: float | None = None
    # revivals
    ion_counts: list | None = None
    revival_threshold: float = 0.05
    revival_t_max_periods: float = 3.0
    revival_samples_per_period: int = 800
    config_sha256: str = ""

    def t_dimless(self, t_us):
        """Physical microseconds to units of 1/nu_x."""
        return t_us * 1e-6 * self.nu_x

    def t_us(self, t_dimless):
        return t_dimless / self.nu_x * 1e6


def _resolve_quench(cfg, scenario):
    has_phys = cfg.has_option("quench", "nu_y_hz") or \
        cfg.has_option("quench", "nu_dip_hz")
    has_dimless = cfg.has_option("quench", "g") or \
        cfg.has_option("quench", "delta")
    if has_phys and has_dimless:
        raise ConfigError(
            "[quench]: give either (nu_y_hz, nu_dip_hz) or (g, delta), not both")
    if not has_phys and not has_dimless:
        raise ConfigError(
            "[quench]: one of (nu_y_hz, nu_dip_hz) or (g, delta) is required")
    if has_phys:
        nu_y = _TWO_PI * _get(cfg, "quench", "nu_y_hz", float)
        nu_dip = _TWO_PI * _get(cfg, "quench", "nu_dip_hz", float, 0.0)
        g = (nu_y ** 2 - scenario.nu_c ** 2) / scenario.nu_c ** 2
        delta = nu_dip ** 2 / scenario.nu_c ** 2
    else:
        g = _get(cfg, "quench", "g", float)
        delta = _get(cfg, "quench", "delta", float, 0.0)
        nu_y = params.transverse_from_g(g, scenario.nu_c)
        nu_dip = params.dip_from_delta(delta, scenario.nu_c)
    scenario.g, scenario.delta = g, delta
    scenario.nu_y, scenario.nu_dip = nu_y, nu_dip


def _axis(cfg, prefix):
    lo = _get(cfg, "sweep", f"{prefix}_min", float, None)
    hi = _get(cfg, "sweep", f"{prefix}_max", float, None)
    steps = _get(cfg, "sweep", f"{prefix}_steps", int, None)
    if lo is None and hi is None and steps is None:
        return None
    if lo is None or hi is None or steps is None or steps < 1:
        raise ConfigError(
            f"[sweep]: {prefix}_min, {prefix}_max and {prefix}_steps >= 1 "
            "must be given together")
    return np.linspace(lo, hi, steps)


def resolve_scenario(cfg, config_text=""):
    ion_count = _get(cfg, "trap", "ion_count", int)
    mass_amu = _get(cfg, "trap", "mass_amu", float)
    charge_e = _get(cfg, "trap", "charge_e", float, 1.0)
    nu_x = _TWO_PI * _get(cfg, "trap", "nu_x_hz", float)
    if ion_count < 3 or ion_count % 2 == 0:
        raise ConfigError(f"[trap] ion_count: must be odd and >= 3, got {ion_count}")
    if mass_amu <= 0 or charge_e <= 0 or nu_x <= 0:
        raise ConfigError("[trap]: mass_amu, charge_e and nu_x_hz must be positive")

    alpha_c = crystal.critical_aspect_ratio(ion_count)
    nu_c = nu_x * math.sqrt(alpha_c)
    ell = params.characteristic_length(mass_amu, charge_e, nu_x)
    hbar_tilde = params.HBAR / (mass_amu * params.ATOMIC_MASS * nu_x * ell ** 2)

    scenario = Scenario(
        ion_count=ion_count, mass_amu=mass_amu, charge_e=charge_e,
        nu_x=nu_x, alpha_c=alpha_c, nu_c=nu_c,
        hbar_tilde=hbar_tilde, length_unit=ell,
        config_sha256=hashlib.sha256(config_text.encode()).hexdigest(),
    )

    if cfg.has_section("quench"):
        _resolve_quench(cfg, scenario)
    if cfg.has_section("time"):
        scenario.t_max_us = _get(cfg, "time", "t_max_us", float)
        scenario.samples = _get(cfg, "time", "samples", int)
        if scenario.t_max_us <= 0 or scenario.samples < 2:
            raise ConfigError("[time]: t_max_us must be > 0 and samples >= 2")
    if cfg.has_section("spectrum"):
        scenario.window_periods = _get(cfg, "spectrum", "window_periods", float, None)
        scenario.window_us = _get(cfg, "spectrum", "window_us", float, None)
        scenario.points_per_period = _get(
            cfg, "spectrum", "points_per_period", int,
            spectrum.DEFAULT_POINTS_PER_PERIOD)
    if cfg.has_section("sweep"):
        scenario.g_axis = _axis(cfg, "g")
        scenario.delta_axis = _axis(cfg, "delta")
        scenario.sweep_delta = _get(cfg, "sweep", "delta", float, None)
    if cfg.has_section("revivals"):
        scenario.ion_counts = _get(cfg, "revivals", "ion_counts", _int_list, None)
        scenario.revival_threshold = _get(cfg, "revivals", "threshold", float, 0.05)
        scenario.revival_t_max_periods = _get(
            cfg, "revivals", "t_max_periods", float, 3.0)
        scenario.revival_samples_per_period = _get(
            cfg, "revivals", "samples_per_period", int, 800)
    return scenario


# ---------------------------------------------------------------------------
# output helpers

def _fmt(value):
    if isinstance(value, (bool,)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        if math.isnan(value):
            return "nan"
        text = f"{value:.15g}"
        if text.lstrip("+-").replace("inf", "").isdigit():
            text += ".0"
        return text
    return str(value)


def _write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(",".join(header) + "\n")
        for row in rows:
            handle.write(",".join(_fmt(v) for v in row) + "\n")


def _write_manifest(path, entries):
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        for key, value in entries:
            handle.write(f"{key} = {_fmt(value)}\n")


def _write_runinfo(path):
    stamp = datetime.datetime.now(datetime.timezone.utc).isoformat()
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        handle.write(f"generated_at = {stamp}\n")


def _base_entries(command, scenario):
    entries = [
        ("command", command),
        ("config_sha256", scenario.config_sha256),
        ("ion_count", scenario.ion_count),
        ("mass_amu", scenario.mass_amu),
        ("charge_e", scenario.charge_e),
        ("nu_x_hz", scenario.nu_x / _TWO_PI),
        ("alpha_c", scenario.alpha_c),
        ("nu_c_hz", scenario.nu_c / _TWO_PI),
        ("length_unit_m", scenario.length_unit),
        ("time_unit_s", 1.0 / scenario.nu_x),
        ("hbar_tilde", scenario.hbar_tilde),
        ("linear_deadband", crystal.LINEAR_DEADBAND),
    ]
    if scenario.g is not None:
        entries += [
            ("g", scenario.g),
            ("delta", scenario.delta),
            ("nu_y_hz", scenario.nu_y / _TWO_PI),
            ("nu_dip_hz", scenario.nu_dip / _TWO_PI),
            ("alpha", (scenario.nu_y / scenario.nu_x) ** 2),
            ("alpha_dip", (scenario.nu_dip / scenario.nu_x) ** 2),
        ]
    return entries


def _map_indexed(worker, tasks, threads):
    """Apply worker over tasks; output order is task order regardless of
    completion order."""
    if threads <= 1 or len(tasks) <= 1:
        return [worker(task) for task in tasks]
    chunk = max(1, len(tasks) // (threads * 4))
    with concurrent.futures.ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(worker, tasks, chunksize=chunk))


def _require(scenario, attr, message):
    value = getattr(scenario, attr)
    if value is None:
        raise ConfigError(message)
    return value


def _quench_map(scenario, g=None, delta=None, ion_count=None):
    n = scenario.ion_count if ion_count is None else ion_count
    g = scenario.g if g is None else g
    delta = scenario.delta if delta is None else delta
    system = crystal.ChainSystem.from_g_delta(n, g, delta)
    return quench.prepare_quench(system, scenario.hbar_tilde)


# ---------------------------------------------------------------------------
# sweep workers (top-level so process pools can pickle them)

def _phase_worker(task):
    n, alpha_c, g, delta = task
    try:
        point = crystal.phase_point(n, g, delta, alpha_c)
        return point.structure_g, point.structure_e, ""
    except SimulationError as err:
        return "error", "error", f"{type(err).__name__}: {err}"


def _curvature_worker(task):
    n, g, delta, hbar_tilde = task
    try:
        system = crystal.ChainSystem.from_g_delta(n, g, delta)
        qmap = quench.prepare_quench(system, hbar_tilde)
        return visibility.curvature(qmap), ""
    except SimulationError as err:
        return float("nan"), f"{type(err).__name__}: {err}"


def _revival_worker(task):
    (n, g, delta, hbar_tilde, nu_x, threshold, t_max_periods,
     samples_per_period) = task
    try:
        system = crystal.ChainSystem.from_g_delta(n, g, delta)
        qmap = quench.prepare_quench(system, hbar_tilde)
        period = _TWO_PI / float(qmap.omega_e[0])
        n_samples = int(round(t_max_periods * samples_per_period))
        t_grid = np.linspace(0.0, t_max_periods * period, n_samples + 1)
        series = visibility.visibility_series(qmap, t_grid)
        t_peak = visibility.first_revival_time(series, threshold)
        if t_peak is None:
            return float("nan"), "no revival above threshold in the window"
        return t_peak / nu_x * 1e6, ""
    except SimulationError as err:
        return float("nan"), f"{type(err).__name__}: {err}"


def _spectrum_column_worker(task):
    n, g, delta, hbar_tilde, t_grid = task
    try:
        system = crystal.ChainSystem.from_g_delta(n, g, delta)
        qmap = quench.prepare_quench(system, hbar_tilde)
        series = visibility.visibility_series(qmap, t_grid)
        spec = spectrum.compute_spectra(series)
        nyquist = (t_grid.size - 1) // 2 + 1
        return np.abs(spec.F_log[:nyquist]), ""
    except SimulationError as err:
        return None, f"{type(err).__name__}: {err}"


# ---------------------------------------------------------------------------
# commands

def _cmd_visibility(scenario, out_dir, threads):
    _require(scenario, "g", "visibility needs a [quench] section")
    t_max = _require(scenario, "t_max_us", "visibility needs a [time] section")
    qmap = _quench_map(scenario)
    t_us = np.linspace(0.0, t_max, scenario.samples)
    series = visibility.visibility_series(qmap, scenario.t_dimless(t_us))
    rows = []
    for k in range(t_us.size):
        if t_us[k] == 0.0:
            # O(0) = 1 is an identity of the overlap formula; do not emit
            # the cancellation residue of the numerical evaluation
            rows.append((0.0, 1.0, 1.0, 0.0))
        else:
            rows.append((t_us[k], series.visibility[k],
                         series.overlap[k].real, series.overlap[k].imag))
    _write_csv(os.path.join(out_dir, "visibility.csv"),
               ["t_us", "visibility", "overlap_re", "overlap_im"], rows)
    entries = _base_entries("visibility", scenario) + [
        ("t_max_us", t_max),
        ("samples", scenario.samples),
        ("omega_e_min", float(qmap.omega_e[0])),
        ("omega_e_max", float(qmap.omega_e[-1])),
        ("ground_state_overlap", qmap.G0),
    ]
    return {"visibility": entries}


def _cmd_modes(scenario, out_dir, threads):
    _require(scenario, "g", "modes needs a [quench] section")
    system = crystal.ChainSystem.from_g_delta(
        scenario.ion_count, scenario.g, scenario.delta)
    from . import modes as modes_mod
    mode_rows, eq_rows = [], []
    entries = _base_entries("modes", scenario)
    for state in ("g", "e"):
        eq = crystal.find_equilibrium(system, state)
        basis = modes_mod.mode_basis(eq, system)
        for idx, omega in enumerate(basis.frequencies):
            mode_rows.append((state, idx + 1, float(omega),
                              float(omega) * scenario.nu_x / _TWO_PI))
        for i in range(scenario.ion_count):
            eq_rows.append((state, i + 1, eq.x[i], eq.y[i],
                            eq.x[i] * scenario.length_unit * 1e6,
                            eq.y[i] * scenario.length_unit * 1e6))
        entries += [(f"structure_{state}", eq.structure),
                    (f"energy_{state}", eq.energy)]
    _write_csv(os.path.join(out_dir, "modes.csv"),
               ["state", "mode_index", "omega_nu_x", "freq_hz"], mode_rows)
    _write_csv(os.path.join(out_dir, "equilibrium.csv"),
               ["state", "ion", "x", "y", "x_um", "y_um"], eq_rows)
    return {"modes": entries}


def _cmd_phase_diagram(scenario, out_dir, threads):
    g_axis = _require(scenario, "g_axis", "phase-diagram needs [sweep] g axis")
    delta_axis = _require(scenario, "delta_axis",
                          "phase-diagram needs [sweep] delta axis")
    tasks = [(scenario.ion_count, scenario.alpha_c, float(g), float(delta))
             for delta in delta_axis for g in g_axis]
    results = _map_indexed(_phase_worker, tasks, threads)
    rows, errors = [], []
    for (n, _, g, delta), (sg, se, err) in zip(tasks, results):
        rows.append((g, delta, sg, se))
        if err:
            errors.append((g, delta, err))
    _write_csv(os.path.join(out_dir, "phase_diagram.csv"),
               ["g", "delta", "structure_g", "structure_e"], rows)

    boundary_rows = []
    for delta in delta_axis:
        try:
            boundary_rows.append(
                (float(delta), crystal.phase_boundary(scenario.ion_count,
                                                      float(delta))))
        except SimulationError as err:
            boundary_rows.append((float(delta), float("nan")))
            errors.append((float("nan"), float(delta),
                           f"{type(err).__name__}: {err}"))
    _write_csv(os.path.join(out_dir, "phase_boundary.csv"),
               ["delta", "g_c"], boundary_rows)

    entries = _base_entries("phase-diagram", scenario) + [
        ("g_axis_min", g_axis[0]), ("g_axis_max", g_axis[-1]),
        ("g_axis_steps", g_axis.size),
        ("delta_axis_min", delta_axis[0]), ("delta_axis_max", delta_axis[-1]),
        ("delta_axis_steps", delta_axis.size),
        ("phase_boundary_tolerance", 1e-10),
    ]
    for k, (g, delta, err) in enumerate(errors):
        entries.append((f"error.{k}", f"g={_fmt(g)} delta={_fmt(delta)}: {err}"))
    return {"phase_diagram": entries}


def _cmd_curvature(scenario, out_dir, threads):
    g_axis = _require(scenario, "g_axis", "curvature needs [sweep] g axis")
    delta_axis = _require(scenario, "delta_axis",
                          "curvature needs [sweep] delta axis")
    tasks = [(scenario.ion_count, float(g), float(delta), scenario.hbar_tilde)
             for delta in delta_axis for g in g_axis]
    results = _map_indexed(_curvature_worker, tasks, threads)
    rows, errors = [], []
    per_us2 = (scenario.nu_x * 1e-6) ** 2
    for (_, g, delta, _), (eta, err) in zip(tasks, results):
        rows.append((g, delta, eta, eta * per_us2))
        if err:
            errors.append((g, delta, err))
    _write_csv(os.path.join(out_dir, "curvature.csv"),
               ["g", "delta", "eta", "eta_per_us2"], rows)
    entries = _base_entries("curvature", scenario) + [
        ("g_axis_steps", g_axis.size),
        ("delta_axis_steps", delta_axis.size),
        ("eta_units", "nu_x^2"),
    ]
    for k, (g, delta, err) in enumerate(errors):
        entries.append((f"error.{k}", f"g={_fmt(g)} delta={_fmt(delta)}: {err}"))
    return {"curvature": entries}


def _window_dimless(scenario, qmap):
    if scenario.window_us is not None:
        return scenario.t_dimless(scenario.window_us)
    periods = scenario.window_periods or spectrum.DEFAULT_WINDOW_PERIODS
    return periods * _TWO_PI / float(qmap.omega_e[0])


def _cmd_spectrum(scenario, out_dir, threads):
    _require(scenario, "g", "spectrum needs a [quench] section")
    qmap = _quench_map(scenario)
    window = _window_dimless(scenario, qmap)
    result = spectrum.spectrum_for_map(
        qmap, window, points_per_period=scenario.points_per_period)
    nyquist = result.frequencies.size // 2 + 1
    hz = scenario.nu_x / _TWO_PI
    rows = [(result.frequencies[n], result.frequencies[n] * hz,
             result.F[n].real, result.F[n].imag,
             result.F_log[n].real, result.F_log[n].imag)
            for n in range(nyquist)]
    _write_csv(os.path.join(out_dir, "spectrum.csv"),
               ["omega_nu_x", "freq_hz", "F_re", "F_im", "Flog_re", "Flog_im"],
               rows)
    _write_csv(os.path.join(out_dir, "peaks.csv"),
               ["omega_nu_x", "magnitude", "label"],
               [(p.omega, p.magnitude, p.label) for p in result.peaks])
    entries = _base_entries("spectrum", scenario) + [
        ("window_dimless", window),
        ("window_us", scenario.t_us(window)),
        ("points_per_period", scenario.points_per_period),
        ("log_clamp", spectrum.EPS_LOG),
        ("clamped_samples", result.clamped_count),
        ("peak_tolerance", _TWO_PI / window),
    ]
    return {"spectrum": entries}


def _cmd_spectrum_map(scenario, out_dir, threads):
    g_axis = _require(scenario, "g_axis", "spectrum-map needs [sweep] g axis")
    delta = _require(scenario, "sweep_delta",
                     "spectrum-map needs [sweep] delta = <value>")
    if scenario.window_us is None:
        raise ConfigError("spectrum-map needs [spectrum] window_us")
    window = scenario.t_dimless(scenario.window_us)

    # first pass: probe each grid point for its fastest mode so all
    # columns share one time grid and one frequency axis
    omega_fast, point_errors = 0.0, {}
    for j, g in enumerate(g_axis):
        try:
            system = crystal.ChainSystem.from_g_delta(
                scenario.ion_count, float(g), delta)
            qmap = quench.prepare_quench(system, scenario.hbar_tilde)
            omega_fast = max(omega_fast, float(np.max(qmap.omega_e)))
        except SimulationError as err:
            point_errors[j] = f"{type(err).__name__}: {err}"
    if omega_fast == 0.0:
        raise ConfigError("spectrum-map: no stable point on the g axis")
    dt = _TWO_PI / (scenario.points_per_period * omega_fast)
    m = max(int(round(window / dt)), 16)
    t_grid = np.linspace(0.0, window, m + 1)
    freqs = _TWO_PI * np.arange(m // 2 + 1) / window

    tasks = [(scenario.ion_count, float(g), delta, scenario.hbar_tilde, t_grid)
             for j, g in enumerate(g_axis) if j not in point_errors]
    results = _map_indexed(_spectrum_column_worker, tasks, threads)

    rows = []
    it = iter(results)
    for j, g in enumerate(g_axis):
        if j in point_errors:
            continue
        column, err = next(it)
        if err:
            point_errors[j] = err
            continue
        for n in range(freqs.size):
            rows.append((float(g), freqs[n], column[n]))
    _write_csv(os.path.join(out_dir, "spectrum_map.csv"),
               ["g", "omega_nu_x", "Flog_abs"], rows)
    entries = _base_entries("spectrum-map", scenario) + [
        ("delta", delta),
        ("window_dimless", window),
        ("window_us", scenario.window_us),
        ("points_per_period", scenario.points_per_period),
        ("log_clamp", spectrum.EPS_LOG),
    ]
    for k in sorted(point_errors):
        entries.append((f"error.{k}", f"g={_fmt(float(g_axis[k]))}: "
                                      f"{point_errors[k]}"))
    return {"spectrum_map": entries}


def _cmd_revivals(scenario, out_dir, threads):
    g_axis = _require(scenario, "g_axis", "revivals needs [sweep] g axis")
    delta = _require(scenario, "sweep_delta",
                     "revivals needs [sweep] delta = <value>")
    ion_counts = scenario.ion_counts or [scenario.ion_count]
    for n in ion_counts:
        if n < 3 or n % 2 == 0:
            raise ConfigError(f"[revivals] ion_counts: {n} is not odd and >= 3")
    tasks = [(n, float(g), delta, scenario.hbar_tilde, scenario.nu_x,
              scenario.revival_threshold, scenario.revival_t_max_periods,
              scenario.revival_samples_per_period)
             for n in ion_counts for g in g_axis]
    results = _map_indexed(_revival_worker, tasks, threads)
    rows, errors = [], []
    for (n, g, *_), (t_us, err) in zip(tasks, results):
        rows.append((n, g, t_us))
        if err:
            errors.append((n, g, err))
    _write_csv(os.path.join(out_dir, "revivals.csv"),
               ["N", "g", "t_first_peak_us"], rows)
    entries = _base_entries("revivals", scenario) + [
        ("delta", delta),
        ("revival_threshold", scenario.revival_threshold),
        ("t_max_periods", scenario.revival_t_max_periods),
        ("samples_per_period", scenario.revival_samples_per_period),
        ("peak_definition",
         "first local maximum above threshold after V first drops below it"),
    ]
    for k, (n, g, err) in enumerate(errors):
        entries.append((f"error.{k}", f"N={n} g={_fmt(g)}: {err}"))
    return {"revivals": entries}


_COMMANDS = {
    "visibility": _cmd_visibility,
    "curvature": _cmd_curvature,
    "phase-diagram": _cmd_phase_diagram,
    "spectrum": _cmd_spectrum,
    "spectrum-map": _cmd_spectrum_map,
    "revivals": _cmd_revivals,
    "modes": _cmd_modes,
}


def run(command, scenario, out_dir=".", threads=1):
    """Execute one subcommand; writes data, manifest and runinfo files."""
    if command not in _COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    os.makedirs(out_dir, exist_ok=True)
    manifests = _COMMANDS[command](scenario, out_dir, threads)
    for stem, entries in manifests.items():
        _write_manifest(os.path.join(out_dir, f"{stem}_manifest.txt"), entries)
        _write_runinfo(os.path.join(out_dir, f"{stem}_runinfo.txt"))


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="ionquench",
        description="Ramsey visibility of ion chains quenched across the "
                    "linear-zigzag instability")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        cmd = sub.add_parser(name)
        cmd.add_argument("--config", required=True, help="scenario config file")
        cmd.add_argument("--out", default=".", help="output directory")
        cmd.add_argument("--threads", type=int, default=1,
                         help="worker processes for sweeps")
        cmd.add_argument("--format", default="csv", choices=["csv"],
                         help="output format (csv)")
    return parser


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        with open(args.config, encoding="utf-8") as handle:
            config_text = handle.read()
    except OSError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    try:
        cfg = load_config(args.config)
        scenario = resolve_scenario(cfg, config_text)
        run(args.command, scenario, out_dir=args.out, threads=args.threads)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    except SimulationError as err:
        print(f"numeric error: {type(err).__name__}: {err}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
