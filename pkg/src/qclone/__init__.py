"""Qubit cloning analyses: Buzek-Hillery overlaps, phase-covariant cloning,
and the four-machine-state protocol."""

from .exceptions import IndeterminateError, InvalidStateError, ParameterDomainError
from .qmat import DensityMatrix, PureQubit

__version__ = "0.1.0"

__all__ = [
    "DensityMatrix",
    "IndeterminateError",
    "InvalidStateError",
    "ParameterDomainError",
    "PureQubit",
    "__version__",
]
