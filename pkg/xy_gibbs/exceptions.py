"""
Error hierarchy for xy_gibbs.

Every error carries the exit code the command-line surface maps it to, so a
management command can turn any library failure into a ``CommandError``
without a lookup table.
"""


class XYGibbsError(Exception):
    """Base class for all errors raised by the package."""

    exit_code = 1


class InvalidModelError(XYGibbsError, ValueError):
    """The chain parameters do not describe a supported XY model."""

    exit_code = 2


class DomainError(XYGibbsError, ValueError):
    """A numeric argument lies outside the domain of the operation."""

    exit_code = 2


class UnsupportedSectorError(XYGibbsError, ValueError):
    """The requested fermion-number sector has no closed-form profile."""

    exit_code = 2


class DegenerateRequestError(XYGibbsError, ValueError):
    """A subsystem selection that keeps nothing or everything."""

    exit_code = 2


class GateError(XYGibbsError, ValueError):
    """Malformed gate: bad qubit indices, non-unitary matrix or wrong parameter count."""

    exit_code = 2


class ResourceLimitError(XYGibbsError):
    """A configured size cap would be exceeded."""

    exit_code = 4

    def __init__(self, what, requested, cap):
        self.what = what
        self.requested = requested
        self.cap = cap
        super().__init__(f"{what} = {requested} exceeds the configured cap of {cap}")


class OptimizationFailedError(XYGibbsError):
    """Every optimizer restart diverged."""

    exit_code = 3

    def __init__(self, message, restart_log=None):
        super().__init__(message)
        self.restart_log = list(restart_log or [])
