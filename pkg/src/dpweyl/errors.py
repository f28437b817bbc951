"""Exception hierarchy shared by every module."""


class DpweylError(Exception):
    """Base class for all library errors."""


class DomainError(DpweylError, ValueError):
    """An input lies outside the domain an operation is defined on."""


class ResourceError(DpweylError):
    """A configured cap (elements, assignments, order search) was exceeded."""

    def __init__(self, message, cap=None):
        super().__init__(message)
        self.cap = cap


class RefusalError(DpweylError):
    """The request is well-formed but deliberately not served (e.g. too large)."""


class DecompositionError(DpweylError):
    """A module does not decompose into trivial, cyclotomic and regular pieces."""


class InternalError(DpweylError):
    """A self-check failed; indicates a bug rather than bad input."""
