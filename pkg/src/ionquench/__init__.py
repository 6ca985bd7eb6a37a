"""Ramsey visibility of ion Coulomb crystals quenched across the
linear-zigzag instability.

A spin-dependent transverse potential on the central ion makes the
crystal structure conditional on its internal state; exciting the ion
into a superposition entangles spin and motion, and the contrast of a
Ramsey fringe measured on that ion equals the modulus of the overlap
between the two motional branches.  This package computes equilibrium
structures, normal modes, the Bogoliubov map between the two phonon
bases, the closed-form overlap and visibility, short-time curvature,
revival times and visibility spectra, validated against a truncated
Fock-space brute force.
"""

from .crystal import (
    ChainSystem,
    EquilibriumConfiguration,
    PhasePoint,
    classify_structure,
    critical_aspect_ratio,
    find_equilibrium,
    linear_chain_positions,
    phase_boundary,
    phase_point,
    potential_energy,
    potential_gradient,
    potential_hessian,
)
from .errors import (
    BracketError,
    ConfigError,
    ConvergenceError,
    ConvergenceViolationError,
    CutoffError,
    IllConditionedMapError,
    InvalidInputError,
    NonPhysicalMapError,
    NumericError,
    SimulationError,
    SingularConfigurationError,
    UnstableStructureError,
)
from .modes import NormalModeBasis, hessian, mode_basis, normal_modes
from .oracle import FockInstance, fock_ground_variance, fock_overlap, synthetic_quench_map
from .params import (
    DimensionlessParams,
    TrapSpec,
    characteristic_length,
    derive_dimensionless,
    dip_from_delta,
    transverse_from_g,
)
from .quench import (
    QuenchMap,
    build_quench_map,
    ground_state_overlap,
    prepare_quench,
    squeezing_parameters,
    takagi_symmetric,
)
from .spectrum import (
    SpectrumMap,
    SpectrumResult,
    compute_spectra,
    label_peaks,
    spectrum_for_map,
    spectrum_map,
)
from .visibility import (
    CurvatureSurface,
    OmegaAssembly,
    VisibilitySeries,
    assemble_omega,
    curvature,
    curvature_surface,
    first_revival_time,
    overlap_at,
    ramsey_probability,
    revival_peaks,
    visibility_series,
)

__version__ = "0.1.0"
