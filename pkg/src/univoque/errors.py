"""Exception hierarchy shared by all modules."""


class UnivoqueError(Exception):
    """Base class for every error raised by this package."""


class DomainError(UnivoqueError, ValueError):
    """An argument lies outside the domain of the operation."""


class SizeError(DomainError):
    """A requested size exceeds a configured cap."""


class BracketError(UnivoqueError):
    """Root bracket endpoints do not have certified opposite signs."""


class Undecided(UnivoqueError):
    """An interval comparison could not be decided at the working precision.

    Raised inside adaptive computations; :func:`univoque.precise.adaptive`
    catches it and retries at a higher precision.
    """

    def __init__(self, context: str = ""):
        super().__init__(context or "comparison undecided at working precision")
        self.context = context


class PrecisionError(UnivoqueError):
    """A computation stayed undecided up to the precision cap."""

    def __init__(self, context: str = "", bits: int | None = None):
        msg = context or "undecided at precision cap"
        if bits is not None:
            msg = f"{msg} (precision {bits} bits)"
        super().__init__(msg)
        self.context = context
        self.bits = bits


class BoundaryError(PrecisionError):
    """The input sits on (or within precision of) a boundary value.

    ``index`` names the digit position for expansion routines.
    """

    def __init__(self, context: str = "", bits: int | None = None, index: int | None = None):
        super().__init__(context, bits)
        self.index = index
