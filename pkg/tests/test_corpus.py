import pytest

from phraseprompt import (
    alignments_to_text,
    corpus_to_text,
    parse_alignments,
    parse_parallel,
)
from phraseprompt.errors import (
    EmptyLine,
    IndexOutOfRange,
    LineCountMismatch,
    MalformedLink,
    ReservedToken,
)


def test_parse_parallel_basic():
    corpus = parse_parallel("a b\n", "c\n")
    assert len(corpus) == 1
    assert corpus.pairs[0].src_tokens == ("a", "b")
    assert corpus.pairs[0].tgt_tokens == ("c",)
    assert corpus.pairs[0].id == 0


def test_parse_parallel_line_count_mismatch():
    with pytest.raises(LineCountMismatch):
        parse_parallel("a\nb\n", "c\n")


def test_parse_parallel_token_counts_for_real_sentence():
    src = "What is the risk associated with Poulvac FluFend H5N3 RG ?\n"
    tgt = "Welche Risiken sind mit Poulvac FluFend H5N3 RG verbunden ?\n"
    corpus = parse_parallel(src, tgt)
    assert len(corpus.pairs[0].src_tokens) == 11
    assert len(corpus.pairs[0].tgt_tokens) == 10


def test_parse_parallel_empty_line():
    with pytest.raises(EmptyLine):
        parse_parallel("a\n\n", "b\nc\n")


@pytest.mark.parametrize("marker", ["<q>", "<r>"])
def test_parse_parallel_reserved_token(marker):
    with pytest.raises(ReservedToken):
        parse_parallel(f"a {marker}\n", "b c\n")


def test_parse_alignments_basic():
    corpus = parse_parallel("x y z\n", "u v w\n")
    sets = parse_alignments("0-0 1-2 2-1\n", corpus)
    assert len(sets) == 1
    assert sets[0].links == {(0, 0), (1, 2), (2, 1)}


def test_parse_alignments_collapses_duplicates():
    corpus = parse_parallel("x y\n", "u v\n")
    sets = parse_alignments("0-0 0-0\n", corpus)
    assert sets[0].links == {(0, 0)}


def test_parse_alignments_order_insensitive():
    corpus = parse_parallel("x y z\n", "u v w\n")
    a = parse_alignments("0-0 1-2 2-1\n", corpus)
    b = parse_alignments("2-1 0-0 1-2\n", corpus)
    assert a == b


def test_parse_alignments_empty_line_is_legal():
    corpus = parse_parallel("x y\n", "u v\n")
    sets = parse_alignments("\n", corpus)
    assert sets[0].links == frozenset()


def test_parse_alignments_out_of_range():
    corpus = parse_parallel("x y\n", "u v\n")
    with pytest.raises(IndexOutOfRange):
        parse_alignments("0-5\n", corpus)


@pytest.mark.parametrize("bad", ["0:0", "a-1", "1-", "-1", "0--1", "1-2-3"])
def test_parse_alignments_malformed(bad):
    corpus = parse_parallel("x y\n", "u v\n")
    with pytest.raises(MalformedLink):
        parse_alignments(f"{bad}\n", corpus)


def test_parse_alignments_line_count_mismatch():
    corpus = parse_parallel("x\ny\n", "u\nv\n")
    with pytest.raises(LineCountMismatch):
        parse_alignments("0-0\n", corpus)


def test_corpus_round_trip_is_byte_exact():
    src = "a b\nc d e\n"
    tgt = "f\ng h\n"
    corpus = parse_parallel(src, tgt)
    assert corpus_to_text(corpus) == (src, tgt)


def test_alignment_round_trip_on_sorted_input():
    corpus = parse_parallel("x y z\n", "u v w\n")
    text = "0-0 1-2 2-1\n"
    assert alignments_to_text(parse_alignments(text, corpus)) == text
