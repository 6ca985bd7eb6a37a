"""Unit system and control parameters of the spin-dependent ion trap.

All numerics downstream run in dimensionless units: lengths in the
characteristic length  l = (q^2 / (4 pi eps0 m nu_x^2))^(1/3),  times in
1/nu_x, energies in m nu_x^2 l^2.  Quantum mechanics enters through the
single scale  hbar_tilde = hbar / (m nu_x l^2).

The two structure-control parameters are

    g     = (nu_y^2 - nu_c^2) / nu_c^2      distance from the instability,
    Delta = nu_dip^2 / nu_c^2               spin-dependent stiffening,

with nu_c the critical transverse frequency of the N-ion chain
(nu_c^2 = alpha_c(N) nu_x^2); that alpha_c is supplied by the crystal
module.
"""

from dataclasses import dataclass
import math

from .errors import InvalidInputError

# Frozen CODATA values, 10 significant digits.
ELEMENTARY_CHARGE = 1.602176634e-19   # C (exact)
VACUUM_PERMITTIVITY = 8.854187813e-12  # F/m
HBAR = 1.054571817e-34                # J s (exact)
ATOMIC_MASS = 1.660539067e-27         # kg


@dataclass(frozen=True)
class TrapSpec:
    """Physical description of the trap, the ions and the optical pinning.

    Frequencies are angular (rad/s).  nu_dip is the extra transverse
    stiffening felt by the central ion in its excited internal state.
    """

    ion_count: int
    ion_mass: float    # atomic mass units
    ion_charge: float  # elementary charges
    nu_x: float
    nu_y: float
    nu_dip: float = 0.0

    def __post_init__(self):
        if self.ion_count < 3 or self.ion_count % 2 == 0:
            raise InvalidInputError(
                f"ion_count must be odd and >= 3, got {self.ion_count}")
        if self.ion_mass <= 0 or self.ion_charge <= 0:
            raise InvalidInputError("ion mass and charge must be positive")
        if self.nu_x <= 0 or self.nu_y <= 0:
            raise InvalidInputError("nu_x and nu_y must be positive")
        if self.nu_dip < 0:
            raise InvalidInputError("nu_dip must be non-negative")


@dataclass(frozen=True)
class DimensionlessParams:
    """Dimensionless counterpart of a TrapSpec for a given alpha_c(N)."""

    length_unit: float  # meters
    time_unit: float    # seconds
    hbar_tilde: float
    alpha: float        # nu_y^2 / nu_x^2
    alpha_dip: float    # nu_dip^2 / nu_x^2
    g: float
    delta: float


def characteristic_length(mass_amu, charge_e, nu_x):
    """Length unit l = (q^2 / (4 pi eps0 m nu_x^2))^(1/3) in meters."""
    q = charge_e * ELEMENTARY_CHARGE
    m = mass_amu * ATOMIC_MASS
    return (q * q / (4.0 * math.pi * VACUUM_PERMITTIVITY * m * nu_x ** 2)) ** (1.0 / 3.0)


def derive_dimensionless(spec, alpha_c):
    """Convert a TrapSpec into the dimensionless parameter set.

    alpha_c is the critical aspect ratio for this ion number, i.e.
    nu_c^2 / nu_x^2.  Pure arithmetic, no search.
    """
    if alpha_c <= 0:
        raise InvalidInputError(f"alpha_c must be positive, got {alpha_c}")
    ell = characteristic_length(spec.ion_mass, spec.ion_charge, spec.nu_x)
    m = spec.ion_mass * ATOMIC_MASS
    hbar_tilde = HBAR / (m * spec.nu_x * ell ** 2)
    alpha = (spec.nu_y / spec.nu_x) ** 2
    alpha_dip = (spec.nu_dip / spec.nu_x) ** 2
    nu_c_sq = alpha_c * spec.nu_x ** 2
    g = (spec.nu_y ** 2 - nu_c_sq) / nu_c_sq
    delta = spec.nu_dip ** 2 / nu_c_sq
    return DimensionlessParams(
        length_unit=ell,
        time_unit=1.0 / spec.nu_x,
        hbar_tilde=hbar_tilde,
        alpha=alpha,
        alpha_dip=alpha_dip,
        g=g,
        delta=delta,
    )


def dip_from_delta(delta, nu_c):
    """Pinning frequency nu_dip = nu_c sqrt(Delta)."""
    if delta < 0:
        raise InvalidInputError(f"delta must be non-negative, got {delta}")
    if nu_c <= 0:
        raise InvalidInputError(f"nu_c must be positive, got {nu_c}")
    return nu_c * math.sqrt(delta)


def transverse_from_g(g, nu_c):
    """Transverse trap frequency nu_y = nu_c sqrt(1 + g)."""
    if nu_c <= 0:
        raise InvalidInputError(f"nu_c must be positive, got {nu_c}")
    if g <= -1.0:
        raise InvalidInputError(f"g must exceed -1, got {g}")
    return nu_c * math.sqrt(1.0 + g)
