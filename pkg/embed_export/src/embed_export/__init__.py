"""Per-token contextual vector export into RPPV1 files."""

from .errors import ExportError, ModelLoadFailure, TokenizationMismatch
from .exporter import (
    ExportConfig,
    compute_token_vectors,
    export_token_vectors,
    load_encoder,
    read_corpus_words,
    resolve_layer,
)
from .rppv import write_rppv

__version__ = "0.1.0"
