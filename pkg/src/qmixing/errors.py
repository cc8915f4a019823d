"""Exception types shared across the toolkit."""


class ToolkitError(Exception):
    """Base class for all toolkit-specific errors."""


class ShapeError(ToolkitError, ValueError):
    """Malformed operator input: wrong shape, non-finite entries, and similar."""


class StateError(ToolkitError, ValueError):
    """Input fails density-matrix validation."""


class CapExceededError(ToolkitError, ValueError):
    """Requested dense object exceeds the desk-scale size cap."""


class NumericalError(ToolkitError, RuntimeError):
    """A numerical routine failed to meet its accuracy contract."""


class ModelFormatError(ToolkitError, ValueError):
    """Model file violates the schema; the message names the offending field path."""
