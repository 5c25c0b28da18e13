class TasteleakError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(TasteleakError, ValueError):
    """A population, weight or analysis config is malformed or out of range."""

    def __init__(self, message, errors=None):
        super().__init__(message)
        self.errors = list(errors) if errors else [message]


class UnobservableOutputError(TasteleakError, ValueError):
    """Conditioning on an output that has zero probability."""


class InvariantViolation(TasteleakError, AssertionError):
    """A computed probability table broke a structural invariant."""
