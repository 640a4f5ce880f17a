"""Exception hierarchy shared by the library and the command line."""


class MMClustError(Exception):
    """Base class for all errors raised by :mod:`mmclust`."""


class ArityError(MMClustError, ValueError):
    """An operation received a context or pattern of the wrong arity."""


class ElementError(MMClustError, KeyError):
    """An element id or label is not valid for the requested mode."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class SizeGuardError(MMClustError, RuntimeError):
    """Exact enumeration refused because the input exceeds a size guard."""


class EncodingError(MMClustError, ValueError):
    """A relation does not have the structure an operation requires."""


class ParseError(MMClustError, ValueError):
    """Malformed input file. ``line`` is 1-based, or ``None`` if unknown."""

    def __init__(self, message, line=None, path=None):
        self.message = message
        self.line = line
        self.path = path
        super().__init__(message)

    def __str__(self):
        where = ""
        if self.path is not None:
            where = f"{self.path}:"
        if self.line is not None:
            where += f"{self.line}:"
        return f"{where} {self.message}" if where else self.message


class SchemaError(ParseError):
    """A cluster file does not follow the record schema or version."""
