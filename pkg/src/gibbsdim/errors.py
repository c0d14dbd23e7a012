"""Exception taxonomy shared by the library and the CLI exit codes."""


class ToolkitError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1


class ValidationError(ToolkitError):
    """Invalid input or violated precondition."""

    exit_code = 2


class UnsupportedSpecError(ValidationError):
    """The shift space lacks a property the operation requires (e.g. mixing)."""


class InsufficientContextError(ValidationError):
    """A prefix is too short to determine the requested quantity exactly."""


class InfeasibleError(ValidationError):
    """A construction's hypothesis fails, so the object need not exist."""


class EmptyLevelSetError(ValidationError):
    """The requested ratio lies outside the attainable range."""


class NumericalError(ToolkitError):
    """An iteration failed to converge; carries the last certified bracket."""

    exit_code = 3

    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class CapacityError(ToolkitError):
    """An enumeration would exceed the configured size cap."""

    exit_code = 4
