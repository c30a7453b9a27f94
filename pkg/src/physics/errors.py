"""
Exception hierarchy shared by the numerical engines.

Engines raise these; the runner maps them onto exit codes.
"""


class SimulationError(Exception):
    """Base class for every engine error."""

    pass


class LatticeError(SimulationError, ValueError):
    """Invalid grid, or samples that do not live on the expected grid."""

    pass


class ParameterError(SimulationError, ValueError):
    """Physical parameter outside its allowed range."""

    pass


class ConfigurationMismatchError(SimulationError):
    """Two results or ensembles that must share a configuration do not."""

    pass


class InsufficientRealizationsError(SimulationError):
    """Monte Carlo estimator called with too few realizations."""

    pass


class UnderResolvedError(SimulationError):
    """Lattice too coarse for an oscillating integrand or a narrow kernel."""

    pass


class ModeLeakError(SimulationError):
    """Temporal mode carries norm outside the lattice band."""

    pass


class InternalAssertionError(SimulationError):
    """A numerical self-check failed (e.g. imaginary residual of a real observable)."""

    pass
