"""Exception types raised by the simulator."""


class RBSliptError(Exception):
    """Base class for all package errors."""


class InvalidGeometryError(RBSliptError):
    """A geometric parameter is outside its physical domain."""


class NoUniqueAxisError(RBSliptError):
    """The round-trip ray map has no unique fixed ray."""


class SamplingError(RBSliptError):
    """Grid sampling too coarse for the requested propagation.

    Carries ``suggested_grid_size``, the smallest power-of-two grid that
    satisfies the anti-aliasing bound for the same physical window.
    """

    def __init__(self, message: str, suggested_grid_size: int | None = None):
        super().__init__(message)
        self.suggested_grid_size = suggested_grid_size


class ZeroFieldError(RBSliptError):
    """An operation that needs a non-zero field received an empty one."""


class ModelRangeError(RBSliptError):
    """Model evaluated outside the parameter region where it is valid."""


class ConfigError(RBSliptError):
    """Invalid configuration value; ``field`` names the offending key."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field
