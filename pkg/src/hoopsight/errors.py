"""Exception hierarchy shared across the engine."""


class HoopsightError(Exception):
    """Base class for all engine errors."""


class ParseError(HoopsightError):
    """A line of an input file could not be parsed.

    Carries the offending path and 1-based line number.
    """

    def __init__(self, path, line_no, message):
        super().__init__(f"{path}:{line_no}: {message}")
        self.path = str(path)
        self.line_no = line_no


class ValidationError(HoopsightError):
    """A record violates a domain invariant; names the offending field."""

    def __init__(self, message, field=None, line_no=None):
        loc = f" (line {line_no})" if line_no is not None else ""
        super().__init__(f"{message}{loc}")
        self.field = field
        self.line_no = line_no


class StateError(HoopsightError):
    """A computation was asked about a frame in an impossible state."""


class SessionError(HoopsightError):
    """Session-level protocol violation (unknown session, bad seek, ...)."""

    def __init__(self, code, message):
        super().__init__(message)
        self.code = code
