"""Exception hierarchy shared by every stage of the toolchain."""
from __future__ import annotations


class AparError(Exception):
    """Base class for all errors raised by apar."""


class SourceError(AparError):
    """An error tied to a position in the program source."""

    def __init__(self, message: str, pos: tuple[int, int] | None = None):
        self.message = message
        self.pos = pos
        if pos is not None:
            message = f"{pos[0]}:{pos[1]}: {message}"
        super().__init__(message)


class LexError(SourceError):
    pass


class ParseError(SourceError):
    pass


class ResolveError(SourceError):
    pass


class UnknownIdentifierError(ResolveError):
    pass


class ArityError(ResolveError):
    pass


class PurityError(ResolveError):
    pass


class GraphError(AparError):
    """The entry function cannot be turned into a dependency graph."""


class EvalError(AparError):
    pass


class KernelError(EvalError):
    """A builtin rejected its arguments (bad dimensions, wrong value kind)."""


class SchedulerError(AparError):
    """The scheduler was driven outside its task lifecycle."""


class CodecError(AparError):
    """Malformed frame or message on the wire."""


class FrameTooLargeError(CodecError):
    pass


class TransportError(AparError):
    """Connection, handshake or remote-worker failure."""
