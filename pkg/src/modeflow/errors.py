"""Exception types shared across the package."""


class ModeflowError(Exception):
    """Base class for all package errors."""


class DomainError(ModeflowError, ValueError):
    """An argument violates a mathematical precondition or type invariant."""


class FormatError(ModeflowError, ValueError):
    """Malformed serialized input (JSON/CSV structure, shapes)."""
