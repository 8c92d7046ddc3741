"""Exception hierarchy.

Every error raised on purpose by the package derives from ``SieveClassError``
and carries the process exit code the command-line front end reports for it.
"""


class SieveClassError(Exception):
    exit_code = 1


class ArgumentError(SieveClassError, ValueError):
    """Invalid argument value (unknown model id, lag out of range, ...)."""

    exit_code = 2


class DomainError(ArgumentError):
    """Evaluation point outside the domain of a function."""


class DataError(SieveClassError):
    exit_code = 3


class InsufficientDataError(DataError):
    """Series too short for the requested AR order and basis size."""


class DegenerateInputError(DataError):
    """Series without variation (e.g. constant)."""


class VersionMismatchError(DataError):
    """Serialized model written by a different library version."""


class NumericalError(SieveClassError):
    exit_code = 4


class SingularCovarianceError(NumericalError):
    """Autocovariance Toeplitz matrix is not numerically positive definite."""


class IndeterminateClassesError(NumericalError):
    """Both class medians coincide, so no orientation can be chosen."""
