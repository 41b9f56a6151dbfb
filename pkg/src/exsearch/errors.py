"""Exception types shared across the engine."""


class ExsearchError(Exception):
    pass


class CorpusError(ExsearchError):
    """Raised when a corpus file or record violates the interchange format."""

    def __init__(self, message, line=None):
        self.line = line
        self.message = message
        if line is not None:
            message = "line %d: %s" % (line, message)
        super().__init__(message)


class QueryError(ExsearchError):
    """Positioned query parse error: (offset, code, message)."""

    def __init__(self, offset, code, message):
        self.offset = offset
        self.code = code
        self.message = message
        super().__init__("at %d: [%s] %s" % (offset, code, message))


class SemanticError(ExsearchError):
    """Query is well-formed but cannot be compiled or evaluated."""


class IndexFormatError(ExsearchError):
    """Index file is missing, corrupt, or has an incompatible version."""
