"""Exception types shared across the package."""


class TopowalkError(Exception):
    """Base class for all package errors."""


class WindowOverflowError(TopowalkError):
    """Amplitude reached the lattice edge: the window is too small for the run."""


class NumericalError(TopowalkError):
    """A numerical contract was violated (norm drift, invalid density matrix, ...)."""


class ConfigError(TopowalkError):
    """A run configuration field failed validation."""

    def __init__(self, field: str, message: str):
        self.field = field
        self.message = message
        super().__init__(f"config field '{field}': {message}")
