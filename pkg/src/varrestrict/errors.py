"""Exception and warning types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the requested operation."""


class CapError(DomainError):
    """An exhaustive computation was requested beyond its size cap."""


class QuadratureAccuracyWarning(RuntimeWarning):
    """A box quadrature could not reach its resolution target."""
