"""Exception hierarchy shared by all compressor stages."""


class GpzError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(GpzError):
    """An input value violates a documented precondition."""


class WidthOverflow(GpzError):
    """Segment geometry does not fit the 64-bit linearization range."""


class CorruptData(GpzError):
    """A compressed payload failed a structural or range check."""
