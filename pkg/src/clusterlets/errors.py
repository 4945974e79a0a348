"""Exception hierarchy shared across the package."""


class ClusterletsError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(ClusterletsError):
    """A flag, column name, or configuration value is missing or invalid."""


class ParseError(ClusterletsError):
    """Input data could not be parsed; the message names the offending cell."""


class ValidationError(ClusterletsError):
    """Structurally valid input violates a documented precondition."""


class DomainError(ClusterletsError):
    """A metric or matcher was evaluated outside its mathematical domain."""


class EmptySelectionError(ValidationError):
    """Every candidate record was removed by the limit-case filters."""

    def __init__(self, message, dropped_by_filter=None):
        super().__init__(message)
        self.dropped_by_filter = dict(dropped_by_filter or {})
