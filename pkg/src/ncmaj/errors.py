"""Exception types shared across the package."""


class InvalidInputError(ValueError):
    """An argument violates a documented precondition."""


class UnsupportedInputError(InvalidInputError):
    """The input is well formed but the requested operation cannot use it."""


class EnumerationLimitError(InvalidInputError):
    """Exact enumeration over the hypercube was requested for too many variables."""
