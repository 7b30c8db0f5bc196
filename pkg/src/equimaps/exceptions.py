"""Exception hierarchy.

``SpecError`` subclasses signal bad input (CLI exit code 2), ``NumericalError``
subclasses signal a numerical certificate that could not be produced (exit 3).
"""


class EquimapsError(Exception):
    pass


class SpecError(EquimapsError, ValueError):
    pass


class DomainError(SpecError):
    """A point lies outside the domain of a section or geometry."""


class ParityError(SpecError):
    """A representation is not invariant under ``-Id`` on a projective group."""


class NumericalError(EquimapsError, ArithmeticError):
    pass


class ClosureError(NumericalError):
    """Products do not close in the span of the given vectors."""


class ProjectorError(NumericalError):
    """A quadrature average failed to be idempotent."""


class NonSemisimpleError(NumericalError):
    """The trace form of an algebra is degenerate."""
