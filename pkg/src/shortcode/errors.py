"""Exception types shared across the package."""


class ShortcodeError(Exception):
    """Base class for all package errors."""


class ParameterError(ShortcodeError, ValueError):
    """Mismatched shapes or graph parameters."""


class DomainError(ShortcodeError, ValueError):
    """An argument lies outside the domain of an operation."""


class PreconditionError(ShortcodeError, ValueError):
    """A documented precondition was violated by the caller."""


class ResourceError(ShortcodeError, RuntimeError):
    """An exact enumeration would exceed the configured cap."""

    def __init__(self, what: str, count: int, cap: int):
        super().__init__(f"{what}: {count} items exceeds cap {cap}")
        self.count = count
        self.cap = cap


class FormatError(ShortcodeError, ValueError):
    """Malformed input file or literal."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line
