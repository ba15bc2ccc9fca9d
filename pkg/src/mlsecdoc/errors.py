"""Exception hierarchy shared by all mlsecdoc modules."""

from __future__ import annotations


class DocError(Exception):
    """Base class for every error raised by mlsecdoc."""


class InvalidArgumentError(DocError, ValueError):
    pass


class PathError(DocError, LookupError):
    """A field path that does not exist for the document type."""


class FieldTypeError(DocError, TypeError):
    """A value whose type does not fit the addressed field."""


class InvariantError(DocError, ValueError):
    """A value of the right type that breaks a field invariant."""


class WrongDocTypeError(DocError, ValueError):
    pass


class DocEncodingError(DocError, ValueError):
    """Input bytes are not valid UTF-8."""


class ParseError(DocError):
    """Structural problems found while parsing; ``issues`` lists every one."""

    def __init__(self, issues):
        self.issues = list(issues)
        summary = "; ".join(f"{i.location}: {i.message}" for i in self.issues[:3])
        if len(self.issues) > 3:
            summary += f" (+{len(self.issues) - 3} more)"
        super().__init__(summary or "parse failed")
