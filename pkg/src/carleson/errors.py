class CarlesonError(Exception):
    """Base class for all package errors."""


class ParseError(CarlesonError, ValueError):
    """Malformed text input (measure, closed set, lambda table)."""


class RangeError(CarlesonError, ValueError):
    """A parameter lies outside the range where the operation is defined."""


class GridError(CarlesonError, ValueError):
    """A dyadic grid cannot be built or is too shallow for the request."""


class ShootingError(CarlesonError, RuntimeError):
    """The radial shooting solver could not bracket the blow-up radius."""
