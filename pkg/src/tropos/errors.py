"""Exception hierarchy shared by all tropos modules.

The CLI maps :class:`PreconditionError` to exit code 2 and
:class:`ResolutionError` to exit code 3.
"""


class TroposError(Exception):
    """Base class for tropos errors."""


class PreconditionError(TroposError, ValueError):
    """An input violates a documented precondition."""


class DomainError(PreconditionError):
    """A point lies outside the domain of a function."""


class ResolutionError(TroposError, ArithmeticError):
    """A numerical procedure could not reach the requested resolution."""


class OnCircleZeroError(ResolutionError):
    """The integrand vanishes on the integration contour."""
