"""Exception types raised across the package."""


class FrameSyncError(Exception):
    """Base class for all package errors."""


class DimensionError(FrameSyncError, ValueError):
    pass


class DegenerateChannelError(FrameSyncError, ValueError):
    """A transition probability collapsed to exactly 0 or 1."""


class PrimitivityError(FrameSyncError, ValueError):
    """The feedback polynomial does not generate a maximal-length sequence."""


class SeedError(FrameSyncError, ValueError):
    pass


class ConstructionError(FrameSyncError, ValueError):
    """The sync-word sizing inequality has no solution (N < K)."""


class ConfigurationError(FrameSyncError, ValueError):
    pass


class UnsupportedConfigurationError(FrameSyncError, ValueError):
    pass


class InputError(FrameSyncError, ValueError):
    """An output stream ended before the decoder horizon was reached."""


class SizeError(FrameSyncError, ValueError):
    """An exact oracle was asked for an instance that is too large."""


class HorizonRangeError(FrameSyncError, OverflowError):
    """A required uncertainty window A exceeds the supported integer range."""
