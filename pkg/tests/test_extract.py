import numpy as np
import pytest

from phraseprompt import (
    ParallelCorpus,
    SpanPair,
    extract_corpus_phrases,
    extract_phrase_pairs,
    is_consistent,
    occurrences_to_tsv,
)
from phraseprompt.corpus import AlignmentSet, SentencePair
from phraseprompt.errors import MissingAlignments
from phraseprompt.oracles import oracle_extract, random_aligned_pair


def spans(result):
    return sorted((s.s_begin, s.s_end, s.t_begin, s.t_end) for s in result)


def test_is_consistent_single_point():
    links = AlignmentSet(0, frozenset({(0, 0)}))
    assert is_consistent(links, SpanPair(0, 1, 0, 1))


def test_is_consistent_crossing_link_rejected():
    links = AlignmentSet(0, frozenset({(0, 0), (1, 2), (2, 1)}))
    assert not is_consistent(links, SpanPair(0, 2, 0, 3))


def test_is_consistent_requires_an_interior_link():
    links = AlignmentSet(0, frozenset())
    assert not is_consistent(links, SpanPair(0, 1, 0, 1))


def test_extract_single_aligned_pair():
    pair = SentencePair(0, ("a",), ("b",))
    links = AlignmentSet(0, frozenset({(0, 0)}))
    assert spans(extract_phrase_pairs(pair, links, 4)) == [(0, 1, 0, 1)]


def test_extract_three_by_three():
    pair = SentencePair(0, ("s0", "s1", "s2"), ("t0", "t1", "t2"))
    links = AlignmentSet(0, frozenset({(0, 0), (1, 2), (2, 1)}))
    assert spans(extract_phrase_pairs(pair, links, 3)) == [
        (0, 1, 0, 1),
        (0, 3, 0, 3),
        (1, 2, 2, 3),
        (1, 3, 1, 3),
        (2, 3, 1, 2),
    ]


def test_extract_unaligned_word_extensions():
    pair = SentencePair(0, ("s0", "s1"), ("t0", "t1"))
    links = AlignmentSet(0, frozenset({(0, 0)}))
    assert spans(extract_phrase_pairs(pair, links, 2)) == [
        (0, 1, 0, 1),
        (0, 1, 0, 2),
        (0, 2, 0, 1),
        (0, 2, 0, 2),
    ]


def test_extract_no_links_yields_nothing():
    pair = SentencePair(0, ("a", "b"), ("c", "d"))
    assert extract_phrase_pairs(pair, AlignmentSet(0, frozenset()), 4) == set()


def test_extract_matches_oracle_on_random_cases():
    rng = np.random.default_rng(321)
    for _ in range(200):
        pair, links = random_aligned_pair(rng)
        assert extract_phrase_pairs(pair, links, 4) == oracle_extract(pair, links, 4)


def test_extract_monotone_in_max_len():
    rng = np.random.default_rng(99)
    for _ in range(50):
        pair, links = random_aligned_pair(rng)
        for k in range(1, 4):
            assert extract_phrase_pairs(pair, links, k) <= extract_phrase_pairs(
                pair, links, k + 1
            )


def test_extract_closure_under_is_consistent():
    rng = np.random.default_rng(551)
    for _ in range(50):
        pair, links = random_aligned_pair(rng)
        for span in extract_phrase_pairs(pair, links, 4):
            assert is_consistent(links, span)


def test_corpus_extraction_order_and_ids(toy_corpus):
    occurrences = extract_corpus_phrases(toy_corpus, 3)
    assert [o.sentence_id for o in occurrences] == sorted(
        o.sentence_id for o in occurrences
    )
    first = occurrences[0]
    assert first.src_phrase == "a" and first.tgt_phrase == "c"
    by_sentence = [o for o in occurrences if o.sentence_id == 1]
    assert len(by_sentence) == 5
    keys = [(o.span.s_begin, o.span.s_end, o.span.t_begin, o.span.t_end) for o in by_sentence]
    assert keys == sorted(keys)


def test_corpus_extraction_duplicated_sentence():
    pair = SentencePair(0, ("s0", "s1", "s2"), ("t0", "t1", "t2"))
    links = frozenset({(0, 0), (1, 2), (2, 1)})
    corpus = ParallelCorpus(
        pairs=[pair, SentencePair(1, pair.src_tokens, pair.tgt_tokens)],
        alignments=[AlignmentSet(0, links), AlignmentSet(1, links)],
    )
    occurrences = extract_corpus_phrases(corpus, 3)
    assert len(occurrences) == 10
    assert sorted({o.sentence_id for o in occurrences}) == [0, 1]


def test_corpus_extraction_empty_corpus():
    assert extract_corpus_phrases(ParallelCorpus([], []), 4) == []


def test_corpus_extraction_requires_alignments():
    corpus = ParallelCorpus([SentencePair(0, ("a",), ("b",))], None)
    with pytest.raises(MissingAlignments):
        extract_corpus_phrases(corpus)


def test_phrase_strings_match_spans(diagonal_corpus):
    occurrences = extract_corpus_phrases(diagonal_corpus)
    for o in occurrences[:500]:
        pair = diagonal_corpus.pairs[o.sentence_id]
        assert o.src_phrase == " ".join(pair.src_tokens[o.span.s_begin : o.span.s_end])
        assert o.tgt_phrase == " ".join(pair.tgt_tokens[o.span.t_begin : o.span.t_end])


def test_tsv_dump(toy_corpus):
    occurrences = extract_corpus_phrases(toy_corpus, 3)
    lines = occurrences_to_tsv(occurrences).splitlines()
    assert lines[0] == "0\t0\t1\t0\t1\ta\tc"
    assert all(len(line.split("\t")) == 7 for line in lines)
