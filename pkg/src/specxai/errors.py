"""Exception types shared across the package.

Each maps to a CLI exit code: ConfigError -> 2, data-shaped errors
(InvalidInput, ParseError, RangeError, ShapeError, FormatError) -> 3,
OSError -> 4.
"""


class SpecxaiError(Exception):
    """Base class for all package errors."""


class InvalidInput(SpecxaiError):
    """An argument violates a documented precondition."""


class ParseError(SpecxaiError):
    """A text input (alignment CSV, config file, manifest) is malformed."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class RangeError(SpecxaiError):
    """An annotation or index lies outside the data it refers to."""


class ShapeError(SpecxaiError):
    """Array shapes do not agree."""


class FormatError(SpecxaiError):
    """A binary file (checkpoint) has bad magic, version, or is truncated."""


class ConfigError(SpecxaiError):
    """A run configuration is inconsistent or contains unknown keys."""
