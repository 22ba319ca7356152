"""Exception types raised across the package."""


class WalkPovmError(Exception):
    """Base class for all package errors."""


class InvalidInputError(WalkPovmError, ValueError):
    """Malformed or out-of-contract input (non-finite entries, wrong shapes, invalid POVMs)."""


class InfeasibleError(WalkPovmError, ValueError):
    """The requested construction does not exist for this input.

    Raised by the synthesis routines when a rank-1 element does not fit into the
    remaining operator, which only happens for inputs that are not valid POVMs
    (or are valid only up to a tolerance larger than the one configured).
    """


class ConsistencyError(WalkPovmError, RuntimeError):
    """An internal invariant was violated beyond tolerance."""


class NoAmplitudeError(WalkPovmError, ValueError):
    """Conditioning on an outcome that has (numerically) zero probability."""


class FormatError(WalkPovmError, ValueError):
    """A POVM, schedule or state file could not be parsed."""
