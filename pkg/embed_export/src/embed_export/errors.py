class ExportError(Exception):
    """Base class for exporter failures."""

    @property
    def code(self) -> str:
        return type(self).__name__


class ModelLoadFailure(ExportError):
    pass


class TokenizationMismatch(ExportError):
    """A corpus word produced zero subword tokens, so it has no hidden
    states to pool."""
