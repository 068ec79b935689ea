"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the operation."""


class NumericRangeError(ArithmeticError):
    """A quantity underflowed or a root bracket could not be established."""


class PreconditionError(ValueError):
    """A documented precondition of the operation does not hold."""


class CapacityError(RuntimeError):
    """An exhaustive search would exceed its configured size guard."""
