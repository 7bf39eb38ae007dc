"""Tropical descent toolkit: tropicalization, almost periodic lifts and the
explicit-formula quadratic form, with exact arithmetic where it matters."""

__version__ = "0.1.0"

from tropos.errors import (  # noqa: F401
    DomainError,
    OnCircleZeroError,
    PreconditionError,
    ResolutionError,
    TroposError,
)
