"""Exception types shared across the package."""


class MergeHopfError(Exception):
    """Base class for all errors raised by merge_hopf."""


class ParseError(MergeHopfError, ValueError):
    """Malformed text. ``offset`` is the byte offset (UTF-8) of the failure."""

    def __init__(self, message: str, offset: int = 0):
        super().__init__(f"{message} at byte {offset}")
        self.offset = offset
        self.reason = message


class AddressError(MergeHopfError, LookupError):
    """A vertex path or component index does not resolve."""


class PreconditionError(MergeHopfError, ValueError):
    """Arguments are well formed but violate an operation's precondition."""


class ConfigurationError(MergeHopfError, ValueError):
    """Bad configuration: empty alphabet, malformed language file, ..."""


class DomainError(MergeHopfError, ValueError):
    """A counting formula was asked for outside the range where it applies."""


class InvariantViolation(MergeHopfError, AssertionError):
    """A computed quantity disagrees with the expected table value."""
