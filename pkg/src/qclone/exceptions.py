"""Exception types raised by the toolkit."""


class InvalidStateError(ValueError):
    """An operator fails the density-matrix checks required by an operation."""


class ParameterDomainError(ValueError):
    """Machine parameters place a closed-form expression outside its domain."""


class IndeterminateError(ArithmeticError):
    """A stationary point cannot be determined because the Hessian is singular."""
