"""Exception types shared across the package."""


class Error(Exception):
    """Base class for every error this package raises on purpose."""


class DimensionError(Error):
    """Variable counts or vector lengths do not match."""


class ConfigurationError(Error):
    """A knob was set to a value the algorithm cannot work with."""


class NumericError(Error):
    """A computation produced or ran into non-finite values."""


class UsageError(Error):
    """An operation was called on inputs that violate its contract."""


class StructuralError(Error):
    """A network description is internally inconsistent."""


class ParseError(Error):
    """A file or text payload could not be parsed."""
