"""Exception hierarchy shared across the package.

Every error raised by the library derives from :class:`CRInterfError` so
callers (notably the command-line front-end) can map failures onto a small
set of exit codes.
"""


class CRInterfError(Exception):
    """Base class for all package errors."""


class ConfigurationError(CRInterfError):
    """A scenario or parameter set violates a documented precondition."""


class ComparisonSetupError(ConfigurationError):
    """Scheme configs being compared do not satisfy the matched-edge-power
    preconditions (equal max power and equal inner radii)."""


class DomainError(CRInterfError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class InsufficientDataError(CRInterfError):
    """An operation needs more points/samples than were supplied."""


class InvariantViolationError(CRInterfError):
    """An input violates a structural invariant guaranteed by an upstream
    stage (e.g. a sub-hard-core distance reaching a power law)."""


class NumericError(CRInterfError):
    """A numeric routine failed to reach its accuracy target."""


class GridTooSmallError(NumericError):
    """A frequency grid could not be grown until the characteristic
    function decayed below the required edge magnitude."""


class ApplicabilityError(CRInterfError):
    """A closed form was requested outside its regime of validity."""


class DivergentMomentError(ApplicabilityError):
    """A requested cumulant does not exist (divergent defining integral)."""


class FitError(CRInterfError):
    """Distribution fitting received invalid moments."""


class ComparisonError(CRInterfError):
    """Two distribution estimates cannot be compared (e.g. disjoint
    supports)."""


class ValidationFailure(CRInterfError):
    """A cross-check in the validation suite exceeded its tolerance."""


#: Exit codes used by the command-line interface.
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
EXIT_VALIDATION = 4
EXIT_IO = 5
