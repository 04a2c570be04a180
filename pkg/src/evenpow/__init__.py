"""Search tools for powers of two whose decimal digits are all even."""

from .errors import CapacityError, CheckpointError, ConfigError, EvenPowError

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "CheckpointError",
    "ConfigError",
    "EvenPowError",
    "__version__",
]
