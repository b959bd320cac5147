import numpy as np
import pytest

from phraseprompt import (
    FlatIndex,
    HashedContextEmbedder,
    IndexConfig,
    ParallelCorpus,
    PhraseDatabase,
    SearchParams,
    build_database,
    extract_corpus_phrases,
    load_database,
    query,
    save_database,
    stats,
)
from phraseprompt.corpus import AlignmentSet, SentencePair
from phraseprompt.errors import BadMagic, EmptyDatabase, TruncatedFile, VersionMismatch
from phraseprompt.oracles import oracle_knn


def single_link_corpus():
    return ParallelCorpus(
        pairs=[SentencePair(0, ("a", "b"), ("c", "d"))],
        alignments=[AlignmentSet(0, frozenset({(0, 0)}))],
    )


def empty_flat_db(dim=4):
    return PhraseDatabase(
        [], FlatIndex(np.empty(0, dtype=np.int64), np.empty((0, dim), dtype=np.float32))
    )


def test_build_database_entry_count_matches_extraction(embedder):
    corpus = single_link_corpus()
    db = build_database(corpus, embedder, max_len=2)
    assert len(db) == 4
    assert len(db) == len(extract_corpus_phrases(corpus, 2))
    assert [e.entry_id for e in db.entries] == [0, 1, 2, 3]


def test_build_database_zero_links_raises(embedder):
    corpus = ParallelCorpus(
        pairs=[SentencePair(0, ("a",), ("b",))],
        alignments=[AlignmentSet(0, frozenset())],
    )
    with pytest.raises(EmptyDatabase):
        build_database(corpus, embedder)


def test_self_retrieval_is_exact(diagonal_db):
    for entry in diagonal_db.entries[::500]:
        hits = query(diagonal_db, entry.vector, 1)
        assert hits[0][1] == 0.0
        top = hits[0][0]
        assert (top.src_phrase, top.tgt_phrase) == (entry.src_phrase, entry.tgt_phrase)


def test_query_matches_flat_oracle(diagonal_db):
    rng = np.random.default_rng(1)
    entries = [(e.entry_id, e.vector) for e in diagonal_db.entries]
    for _ in range(5):
        q = rng.standard_normal(diagonal_db.dim)
        got = query(diagonal_db, q, 7)
        want = oracle_knn(entries, q, 7)
        assert [e.entry_id for e, _ in got] == want.ids


def test_query_k_beyond_population(embedder):
    db = build_database(single_link_corpus(), embedder, max_len=2)
    assert len(query(db, db.entries[0].vector, 50)) == 4


def test_stats_counts(embedder):
    db = build_database(single_link_corpus(), embedder, max_len=2)
    s = stats(db)
    assert (s.entry_count, s.distinct_src_phrases, s.distinct_pairs) == (4, 2, 4)
    assert s.dim == embedder.dim


def test_stats_empty_database():
    s = stats(empty_flat_db())
    assert (s.entry_count, s.distinct_src_phrases, s.distinct_pairs) == (0, 0, 0)
    assert s.dim == 4


def test_stats_repeated_pair_across_sentences(embedder):
    corpus = ParallelCorpus(
        pairs=[
            SentencePair(0, ("x",), ("y",)),
            SentencePair(1, ("x",), ("y",)),
            SentencePair(2, ("u",), ("v",)),
        ],
        alignments=[AlignmentSet(i, frozenset({(0, 0)})) for i in range(3)],
    )
    db = build_database(corpus, embedder, max_len=1)
    s = stats(db)
    assert s.entry_count == 3
    assert s.distinct_pairs == s.entry_count - 1


def test_dedupe_exact_collapses_identical_context(embedder):
    corpus = ParallelCorpus(
        pairs=[SentencePair(0, ("x",), ("y",)), SentencePair(1, ("x",), ("y",))],
        alignments=[AlignmentSet(i, frozenset({(0, 0)})) for i in range(2)],
    )
    full = build_database(corpus, embedder, max_len=1)
    deduped = build_database(corpus, embedder, max_len=1, dedupe_exact=True)
    assert len(full) == 2 and len(deduped) == 1
    assert [e.entry_id for e in deduped.entries] == [0]


def test_database_round_trip_flat(tmp_path, diagonal_db):
    path = tmp_path / "d.rppd"
    save_database(diagonal_db, path)
    loaded = load_database(path)
    assert stats(loaded) == stats(diagonal_db)
    rng = np.random.default_rng(7)
    for _ in range(10):
        q = rng.standard_normal(diagonal_db.dim)
        a = [(e.entry_id, d) for e, d in query(diagonal_db, q, 5)]
        b = [(e.entry_id, d) for e, d in query(loaded, q, 5)]
        assert a == b
    for ea, eb in zip(diagonal_db.entries[:50], loaded.entries[:50]):
        assert (ea.src_phrase, ea.tgt_phrase, ea.sentence_id) == (
            eb.src_phrase,
            eb.tgt_phrase,
            eb.sentence_id,
        )
        assert np.array_equal(ea.vector, eb.vector)


@pytest.mark.parametrize("keep_originals", [True, False])
def test_database_round_trip_ivfpq(tmp_path, diagonal_corpus, embedder, keep_originals):
    cfg = IndexConfig(kind="ivfpq", nlist=16, seed=3, keep_originals=keep_originals)
    db = build_database(diagonal_corpus, embedder, index_config=cfg)
    path = tmp_path / "d.rppd"
    save_database(db, path)
    loaded = load_database(path)
    assert stats(loaded) == stats(db)
    params = SearchParams(nprobe=16)
    rng = np.random.default_rng(8)
    for _ in range(10):
        q = rng.standard_normal(db.dim)
        a = [(e.entry_id, d) for e, d in query(db, q, 5, params)]
        b = [(e.entry_id, d) for e, d in query(loaded, q, 5, params)]
        assert a == b
    if not keep_originals:
        assert loaded.entries[0].vector is None


def test_database_empty_round_trip(tmp_path):
    path = tmp_path / "e.rppd"
    save_database(empty_flat_db(), path)
    loaded = load_database(path)
    assert stats(loaded).entry_count == 0


def test_load_database_bad_magic(tmp_path):
    path = tmp_path / "bad.rppd"
    path.write_bytes(b"JUNK!\x00" + b"\x00" * 32)
    with pytest.raises(BadMagic):
        load_database(path)


def test_load_database_truncated(tmp_path, embedder):
    db = build_database(single_link_corpus(), embedder, max_len=2)
    path = tmp_path / "t.rppd"
    save_database(db, path)
    data = path.read_bytes()
    path.write_bytes(data[:-10])
    with pytest.raises(TruncatedFile):
        load_database(path)


def test_load_database_version_mismatch(tmp_path, embedder):
    db = build_database(single_link_corpus(), embedder, max_len=2)
    path = tmp_path / "v.rppd"
    save_database(db, path)
    data = bytearray(path.read_bytes())
    data[6] = 99  # version field follows the 6-byte magic
    path.write_bytes(bytes(data))
    with pytest.raises(VersionMismatch):
        load_database(path)


def test_entry_vectors_are_pooled_source_spans(embedder):
    corpus = single_link_corpus()
    db = build_database(corpus, embedder, max_len=2)
    tv = embedder.embed(corpus.pairs[0].src_tokens)
    from phraseprompt import pool_phrase

    occurrences = extract_corpus_phrases(corpus, 2)
    for entry, occ in zip(db.entries, occurrences):
        assert np.array_equal(entry.vector, pool_phrase(tv, occ.span.src_span))
