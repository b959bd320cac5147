"""Bilingual phrase databases keyed by contextual vectors, nearest-neighbor
prompt retrieval, mixed co-training data, and translation evaluation."""

from . import errors
from .corpus import (
    AlignmentSet,
    PAIR_MARKER,
    ParallelCorpus,
    RESERVED_TOKENS,
    SEP_MARKER,
    SentencePair,
    alignments_to_text,
    corpus_to_text,
    load_corpus,
    parse_alignments,
    parse_parallel,
)
from .database import (
    DatabaseStats,
    IndexConfig,
    PhraseDatabase,
    PhraseEntry,
    SearchParams,
    build_database,
    load_database,
    query,
    save_database,
    stats,
)
from .embed import (
    EmbeddingProvider,
    FileVectorsProvider,
    HashedContextEmbedder,
    TokenVectors,
    hashed_context_embed,
    load_vectors_file,
    pool_phrase,
    write_vectors_file,
)
from .extract import (
    DEFAULT_MAX_PHRASE_LEN,
    PhraseOccurrence,
    SpanPair,
    extract_corpus_phrases,
    extract_phrase_pairs,
    is_consistent,
    occurrences_to_tsv,
)
from .index import (
    FlatIndex,
    IvfPqIndex,
    SearchResult,
    build_ivfpq,
    flat_search,
    ivfpq_search,
    kmeans,
    load_index,
    save_index,
)
from .metrics import (
    ConstraintCase,
    bleu,
    constraint_accuracy,
    contains_token_subsequence,
)
from .mixing import MixConfig, make_mixed_corpus
from .prompts import (
    Prompt,
    PromptConfig,
    PromptPair,
    candidate_spans,
    constraint_prompt,
    constraints_for_sentence,
    parse_constraints_tsv,
    parse_prompted_line,
    render_prompt,
    retrieve_prompt,
)

__version__ = "0.1.0"
