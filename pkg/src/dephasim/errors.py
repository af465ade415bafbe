"""Exception types shared across the package."""

__all__ = [
    "DephasimError",
    "ConfigError",
    "QuadratureError",
    "ComplexityError",
    "VanishingProbabilityError",
    "TruncationWarning",
]


class DephasimError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(DephasimError):
    """Invalid or inconsistent configuration (bad value, unknown key, ...)."""


class QuadratureError(DephasimError):
    """Adaptive integration failed to converge or produced a non-finite value.

    Carries the offending interval so callers can report which frequency
    range resisted refinement.
    """

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class ComplexityError(DephasimError):
    """Requested problem size exceeds a hard cost cap (refused, not attempted)."""


class VanishingProbabilityError(DephasimError):
    """Post-selection probability too small to normalize reliably."""


class TruncationWarning(UserWarning):
    """A truncated Fock space is leaking non-negligible thermal population."""
