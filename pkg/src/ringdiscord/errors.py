"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain an operation accepts."""


class StateValidityError(ValueError):
    """A density matrix built from the model is not positive definite."""


class NotAStateError(ValueError):
    """A matrix passed as a density matrix has a significantly negative eigenvalue."""


class RegimeError(ValueError):
    """No closed-form high-temperature regime applies; use the numeric path."""
