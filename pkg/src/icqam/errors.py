"""Exception types shared across the package."""


class IcqamError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(IcqamError):
    """A problem instance, file or request failed validation."""


class DecodabilityError(IcqamError):
    """A receiver cannot recover its wanted message(s) from the code."""
