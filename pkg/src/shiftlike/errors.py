"""Exception hierarchy."""


class ShiftlikeError(Exception):
    """Base class for all errors raised by this package."""


class OutOfRange(ShiftlikeError, KeyError):
    """An index was requested outside the tabulated range."""

    def __str__(self):
        return Exception.__str__(self)


class WeightOutOfRange(OutOfRange):
    pass


class NonIntegrableDensity(ShiftlikeError, ValueError):
    """A window integral of the density is zero or not finite."""


class ZeroDensity(ShiftlikeError, ValueError):
    """The density vanishes on a window where a ratio is needed."""


class ZeroVector(ShiftlikeError, ValueError):
    pass


class EpsilonTooLarge(ShiftlikeError, ValueError):
    pass


class NotFound(ShiftlikeError):
    """A finite search was exhausted.

    This only says the horizon was too short; it is not evidence that the
    searched-for object does not exist.
    """

    def __init__(self, message, scanned=None):
        super().__init__(message)
        self.scanned = scanned


class ConfigError(ShiftlikeError, ValueError):
    """Malformed system configuration; ``path`` locates the offending field."""

    def __init__(self, message, path=""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
