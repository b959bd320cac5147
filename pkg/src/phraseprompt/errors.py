"""Exception hierarchy for the toolkit.

Every error raised on bad data or bad files derives from ToolkitError and
carries a stable machine-readable code (its class name), which the CLI
prints as ``ERROR <code>: <detail>``.
"""


class ToolkitError(Exception):
    """Base class for all data and format errors raised by this package."""

    @property
    def code(self) -> str:
        return type(self).__name__


# corpus / alignment parsing
class LineCountMismatch(ToolkitError):
    pass


class EmptyLine(ToolkitError):
    pass


class ReservedToken(ToolkitError):
    pass


class MalformedLink(ToolkitError):
    pass


class IndexOutOfRange(ToolkitError):
    pass


# phrase extraction
class MissingAlignments(ToolkitError):
    pass


# embeddings and vector files
class EmptySpan(ToolkitError):
    pass


class SpanOutOfRange(ToolkitError):
    pass


class BadMagic(ToolkitError):
    pass


class DimMismatch(ToolkitError):
    pass


class TruncatedFile(ToolkitError):
    pass


class TokenCountMismatch(ToolkitError):
    pass


# vector index
class BadShape(ToolkitError):
    pass


class EmptyInput(ToolkitError):
    pass


class NoOriginals(ToolkitError):
    pass


# phrase database
class EmptyDatabase(ToolkitError):
    pass


class VersionMismatch(ToolkitError):
    pass


class IoError(ToolkitError):
    pass


# prompts
class DanglingMarker(ToolkitError):
    pass


class EmptyPhrase(ToolkitError):
    pass


class MalformedConstraint(ToolkitError):
    pass


# evaluation
class LengthMismatch(ToolkitError):
    pass


class EmptyCorpus(ToolkitError):
    pass


class EmptyCaseSet(ToolkitError):
    pass
