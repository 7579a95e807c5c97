"""Exception types shared across the package."""


class AdepthError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(AdepthError):
    """A quantity left its physical domain (e.g. point behind the camera)."""


class IntegrationError(AdepthError):
    """Numerical integration produced a non-finite state."""


class SingularityError(AdepthError):
    """The controller was evaluated at (or too close to) its singular point."""


class ConfigError(AdepthError):
    """A scenario configuration file is missing, unreadable, or invalid."""
