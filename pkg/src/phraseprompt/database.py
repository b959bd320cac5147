"""The bilingual phrase database: occurrences keyed by contextual vectors.

Every extracted phrase occurrence becomes one entry whose key vector is the
mean of the contextual token vectors over the occurrence's source span.
Identical (src, tgt) strings may appear under many entries with different
vectors; ambiguous phrases are told apart by their context. Entries carry
their sentence id so training-time self-retrieval can be excluded.

Database file (binary, little-endian): magic ``RPPD1\\0``, u32 format
version, an embedded index block (see index module), then a u64
byte-length-prefixed UTF-8 text block of ``entry_id \\t sentence_id \\t
src_phrase \\t tgt_phrase`` lines.
"""

from __future__ import annotations

import io
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .corpus import ParallelCorpus
from .embed import EmbeddingProvider, pool_phrase
from .errors import BadMagic, EmptyDatabase, TruncatedFile, VersionMismatch
from .extract import DEFAULT_MAX_PHRASE_LEN, extract_corpus_phrases
from .index import (
    DEFAULT_M,
    DEFAULT_NBITS,
    DEFAULT_RERANK_DEPTH,
    FlatIndex,
    IvfPqIndex,
    SearchResult,
    build_ivfpq,
    flat_search,
    ivfpq_search,
    read_index,
    write_index,
)

DATABASE_MAGIC = b"RPPD1\x00"
DATABASE_VERSION = 1


@dataclass
class PhraseEntry:
    """One key-value record: (context vector) -> (src_phrase, tgt_phrase).

    ``vector`` is None after loading a database whose index kept no original
    vectors (codes only); queries still work through the index.
    """

    entry_id: int
    src_phrase: str
    tgt_phrase: str
    sentence_id: int
    vector: np.ndarray | None


@dataclass
class IndexConfig:
    """How to index entry vectors: exact flat scan or IVF-PQ."""

    kind: str = "flat"  # "flat" | "ivfpq"
    nlist: int | None = None
    m: int = DEFAULT_M
    nbits: int = DEFAULT_NBITS
    train_sample: int | None = None
    seed: int = 0
    keep_originals: bool = True


@dataclass
class SearchParams:
    """Per-query knobs; only used by IVF-PQ indexes."""

    nprobe: int | None = None
    rerank_depth: int | None = None  # None: 100 when originals exist, else 0


@dataclass
class PhraseDatabase:
    entries: list[PhraseEntry]
    index: FlatIndex | IvfPqIndex

    @property
    def dim(self) -> int:
        return self.index.dim

    def __len__(self) -> int:
        return len(self.entries)


@dataclass
class DatabaseStats:
    entry_count: int
    distinct_src_phrases: int
    distinct_pairs: int
    dim: int


def build_database(
    corpus: ParallelCorpus,
    provider: EmbeddingProvider,
    max_len: int = DEFAULT_MAX_PHRASE_LEN,
    index_config: IndexConfig | None = None,
    dedupe_exact: bool = False,
) -> PhraseDatabase:
    """Extract, embed, and index every phrase occurrence of the corpus.

    With ``dedupe_exact`` the rare exact duplicates (same phrase strings and
    bitwise-equal vector) collapse to their first occurrence; entry ids are
    renumbered to stay contiguous.
    """
    cfg = index_config or IndexConfig()
    occurrences = extract_corpus_phrases(corpus, max_len)
    if not occurrences:
        raise EmptyDatabase("corpus yields zero phrase occurrences")

    sentence_vectors = {}
    records: list[tuple[str, str, int, np.ndarray]] = []
    for occ in occurrences:
        tv = sentence_vectors.get(occ.sentence_id)
        if tv is None:
            pair = corpus.pairs[occ.sentence_id]
            tv = provider.embed(pair.src_tokens, sentence_id=pair.id)
            sentence_vectors[occ.sentence_id] = tv
        vec = pool_phrase(tv, occ.span.src_span)
        records.append((occ.src_phrase, occ.tgt_phrase, occ.sentence_id, vec))

    if dedupe_exact:
        seen: set[tuple[str, str, bytes]] = set()
        kept = []
        for rec in records:
            key = (rec[0], rec[1], rec[3].tobytes())
            if key not in seen:
                seen.add(key)
                kept.append(rec)
        records = kept

    entries = [
        PhraseEntry(eid, src, tgt, sid, vec)
        for eid, (src, tgt, sid, vec) in enumerate(records)
    ]
    vectors = np.stack([rec[3] for rec in records]).astype(np.float32)
    ids = np.arange(len(entries), dtype=np.int64)
    if cfg.kind == "flat":
        index: FlatIndex | IvfPqIndex = FlatIndex(ids, vectors)
    elif cfg.kind == "ivfpq":
        index = build_ivfpq(
            list(zip(ids.tolist(), vectors)),
            nlist=cfg.nlist,
            m=cfg.m,
            nbits=cfg.nbits,
            train_sample=cfg.train_sample,
            seed=cfg.seed,
            keep_originals=cfg.keep_originals,
        )
    else:
        raise ValueError(f"unknown index kind {cfg.kind!r}")
    return PhraseDatabase(entries, index)


def _resolve_rerank(db: PhraseDatabase, params: SearchParams) -> int:
    if params.rerank_depth is not None:
        return params.rerank_depth
    if isinstance(db.index, IvfPqIndex) and not db.index.has_originals:
        return 0
    return DEFAULT_RERANK_DEPTH


def query(
    db: PhraseDatabase,
    query_vector,
    k: int,
    search_params: SearchParams | None = None,
) -> list[tuple[PhraseEntry, float]]:
    """k nearest entries by squared L2, resolved to PhraseEntry records."""
    params = search_params or SearchParams()
    if isinstance(db.index, FlatIndex):
        result: SearchResult = flat_search(db.index, query_vector, k)
    else:
        result = ivfpq_search(
            db.index,
            query_vector,
            k,
            nprobe=params.nprobe,
            rerank_depth=_resolve_rerank(db, params),
        )
    return [(db.entries[eid], dist) for eid, dist in result.hits]


def stats(db: PhraseDatabase) -> DatabaseStats:
    """Exact entry and distinct-phrase counts."""
    return DatabaseStats(
        entry_count=len(db.entries),
        distinct_src_phrases=len({e.src_phrase for e in db.entries}),
        distinct_pairs=len({(e.src_phrase, e.tgt_phrase) for e in db.entries}),
        dim=db.dim,
    )


def save_database(db: PhraseDatabase, path: str | Path) -> None:
    """Write the database as one artifact: index block plus entries block."""
    buf = io.BytesIO()
    write_index(buf, db.index)
    entries_text = "".join(
        f"{e.entry_id}\t{e.sentence_id}\t{e.src_phrase}\t{e.tgt_phrase}\n"
        for e in db.entries
    ).encode("utf-8")
    with open(path, "wb") as f:
        f.write(DATABASE_MAGIC)
        f.write(struct.pack("<I", DATABASE_VERSION))
        f.write(buf.getvalue())
        f.write(struct.pack("<Q", len(entries_text)))
        f.write(entries_text)


def load_database(path: str | Path) -> PhraseDatabase:
    """Inverse of save_database; entry vectors are restored from the index
    when it retains them (flat, or IVF-PQ with originals)."""
    with open(path, "rb") as f:
        magic = f.read(len(DATABASE_MAGIC))
        if len(magic) < len(DATABASE_MAGIC) or magic != DATABASE_MAGIC:
            raise BadMagic(f"{path}: not a phrase database file")
        version_raw = f.read(4)
        if len(version_raw) < 4:
            raise TruncatedFile(f"{path}: version field cut short")
        (version,) = struct.unpack("<I", version_raw)
        if version != DATABASE_VERSION:
            raise VersionMismatch(f"{path}: version {version}, expected {DATABASE_VERSION}")
        index = read_index(f)
        length_raw = f.read(8)
        if len(length_raw) < 8:
            raise TruncatedFile(f"{path}: entries block length cut short")
        (length,) = struct.unpack("<Q", length_raw)
        entries_raw = f.read(length)
        if len(entries_raw) < length:
            raise TruncatedFile(f"{path}: entries block cut short")

    vector_of = _vector_lookup(index)
    entries = []
    for line in entries_raw.decode("utf-8").splitlines():
        eid_s, sid_s, src, tgt = line.split("\t")
        eid = int(eid_s)
        entries.append(PhraseEntry(eid, src, tgt, int(sid_s), vector_of(eid)))
    return PhraseDatabase(entries, index)


def _vector_lookup(index: FlatIndex | IvfPqIndex):
    if isinstance(index, FlatIndex):
        rows = {int(i): r for r, i in enumerate(index.ids)}
        return lambda eid: index.vectors[rows[eid]]
    if index.has_originals:
        rows = {int(i): r for r, i in enumerate(index.orig_ids)}
        return lambda eid: index.orig_vectors[rows[eid]]
    return lambda eid: None
