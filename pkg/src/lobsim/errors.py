"""Exceptions and warnings shared across the package."""


class LobsimError(Exception):
    """Base class for all package errors."""


class LayoutError(LobsimError):
    """Mode layouts are malformed, mismatched, or labels collide."""


class CutoffSaturationError(LobsimError):
    """An operation would push significant amplitude past a mode cutoff."""


class DegenerateStateError(LobsimError):
    """A requested state collapses to (numerically) the zero vector."""


class NonPhysicalOperationError(LobsimError):
    """The requested operation has no deterministic linear-optics realization."""


class MixedBranchError(LobsimError):
    """A coarse-grained measurement branch is not a pure product state."""


class InvariantViolationError(LobsimError):
    """An internal consistency check failed; indicates a bug."""


class CutoffSaturationWarning(UserWarning):
    """Amplitude is approaching a mode cutoff; results may lose accuracy."""


class DegenerateBasisWarning(UserWarning):
    """The chosen encoding parameters collapse the qubit basis."""
