"""Exception types shared across the package."""


class EvenPowError(Exception):
    pass


class ConfigError(EvenPowError, ValueError):
    """Invalid parameters or a configuration that cannot be honoured."""


class CapacityError(ConfigError):
    """A requested size exceeds a declared implementation limit."""

    def __init__(self, what: str, value, limit):
        self.what = what
        self.value = value
        self.limit = limit
        super().__init__(f"{what}={value} exceeds limit {limit}")


class CheckpointError(EvenPowError):
    """A checkpoint file is unreadable or does not match the scan."""
