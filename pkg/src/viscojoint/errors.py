"""Exception types shared across the toolkit."""


class ViscojointError(Exception):
    """Base class for all toolkit errors."""


class GeometryError(ViscojointError):
    """Damper geometry is infeasible (wall intersection, bad radius, ...)."""


class IntegrationDivergedError(ViscojointError):
    """Simulation produced a non-finite state."""

    def __init__(self, time: float):
        self.time = time
        super().__init__(f"integration diverged at t = {time:.6g} s")


class InsufficientDataError(ViscojointError):
    """Input series is too short for the requested analysis."""


class DegenerateSeriesError(ViscojointError):
    """A kinematic series has zero range and cannot be normalized."""


class SolverError(ViscojointError):
    """Equilibrium solve failed to converge."""


class UnreachableTargetError(ViscojointError):
    """Requested pose is beyond the static equilibrium of the chain."""


class BootstrapFailedError(ViscojointError):
    """Too many bootstrap resamples failed to fit."""


class IngestError(ViscojointError):
    """Tracker CSV could not be converted to a trajectory."""


class ConfigError(ViscojointError):
    """Configuration file violates the documented schema."""
