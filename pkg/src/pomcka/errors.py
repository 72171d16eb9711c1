"""Exception hierarchy shared by all modules."""


class PomsetError(Exception):
    """Base class for every error raised by pomcka."""


class CycleError(PomsetError, ValueError):
    """An edge set whose reflexive-transitive closure is not antisymmetric."""


class ParseError(PomsetError, ValueError):
    def __init__(self, message: str, path: str | None = None, line: int | None = None):
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)
        self.path = path
        self.line = line


class PreconditionError(PomsetError):
    """An operation was called outside its documented domain."""


class BoundExceeded(PreconditionError):
    """Explicit enumeration was asked to go beyond its event bound."""


class MalformedRf(PomsetError, ValueError):
    """A read-from map that is not total, crosses addresses or names a non-store."""


class OpaqueLabelError(PreconditionError):
    """A memory-model operation received an event without a memory-access label."""
