"""Exception types raised by the simulation layers.

Every failure mode that callers are expected to branch on gets its own
class; all inherit from SimulationError so CLI-level code can map any
numeric failure to one exit code.
"""


class SimulationError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(SimulationError, ValueError):
    """A caller-supplied value violates a documented precondition."""


class SingularConfigurationError(SimulationError):
    """Two ions coincide; the Coulomb energy is undefined there."""


class ConvergenceError(SimulationError):
    """The equilibrium search exhausted its iteration budget.

    Carries the last iterate and its gradient max-norm for diagnosis.
    """

    def __init__(self, message, positions=None, grad_norm=None):
        super().__init__(message)
        self.positions = positions
        self.grad_norm = grad_norm


class BracketError(SimulationError):
    """A bisection bracket does not enclose a sign change."""

    def __init__(self, message, lo=None, hi=None):
        super().__init__(message)
        self.interval = (lo, hi)


class UnstableStructureError(SimulationError):
    """A configuration has a non-positive normal-mode eigenvalue."""


class IllConditionedMapError(SimulationError):
    """The Bogoliubov u block is too ill-conditioned to invert reliably."""


class NonPhysicalMapError(SimulationError):
    """The squeezing kernel has an eigenvalue with modulus >= 1."""


class ConvergenceViolationError(SimulationError):
    """The Gaussian-integral matrix has an eigenvalue with Re <= 0."""


class NumericError(SimulationError):
    """A linear-algebra step failed or produced non-finite values.

    `diagnostics` holds condition numbers or similar context.
    """

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class CutoffError(SimulationError):
    """The Fock-space truncation did not certify convergence."""


class ConfigError(SimulationError):
    """A scenario configuration file is missing or inconsistent."""
