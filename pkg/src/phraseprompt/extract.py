"""Consistent phrase-pair extraction from word-aligned sentence pairs.

A span pair is consistent when at least one alignment link falls inside both
spans and no link crosses a span boundary in either direction. Extraction
enumerates every consistent pair with both sides at most ``max_len`` tokens
long, including extensions over unaligned boundary words.
"""

from __future__ import annotations

from dataclasses import dataclass

from .corpus import AlignmentSet, ParallelCorpus, SentencePair
from .errors import MissingAlignments

DEFAULT_MAX_PHRASE_LEN = 4


@dataclass(frozen=True, order=True)
class SpanPair:
    """Half-open token spans [s_begin, s_end) x [t_begin, t_end).

    Field order gives the canonical sort used for deterministic output.
    """

    s_begin: int
    s_end: int
    t_begin: int
    t_end: int

    @property
    def src_span(self) -> tuple[int, int]:
        return (self.s_begin, self.s_end)

    @property
    def tgt_span(self) -> tuple[int, int]:
        return (self.t_begin, self.t_end)


@dataclass(frozen=True)
class PhraseOccurrence:
    """One extracted phrase pair with its provenance."""

    sentence_id: int
    span: SpanPair
    src_phrase: str
    tgt_phrase: str


def is_consistent(links: AlignmentSet, span_pair: SpanPair) -> bool:
    """True iff the span pair is consistent with the alignment.

    Requires at least one link inside both spans; rejects any link with one
    endpoint inside a span and the other endpoint outside the paired span.
    """
    inside = False
    for i, j in links.links:
        in_src = span_pair.s_begin <= i < span_pair.s_end
        in_tgt = span_pair.t_begin <= j < span_pair.t_end
        if in_src and in_tgt:
            inside = True
        elif in_src or in_tgt:
            return False
    return inside


def extract_phrase_pairs(
    pair: SentencePair, links: AlignmentSet, max_len: int = DEFAULT_MAX_PHRASE_LEN
) -> set[SpanPair]:
    """All consistent span pairs with both sides at most ``max_len`` long.

    Walks target spans, projects each onto the source side, checks that the
    projected block links back only into the target span, then extends both
    source boundaries over unaligned words. Sentences with no links yield
    the empty set.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    n, m = len(pair.src_tokens), len(pair.tgt_tokens)
    src_aligned = [False] * n
    tgt_to_src: list[list[int]] = [[] for _ in range(m)]
    src_to_tgt: list[list[int]] = [[] for _ in range(n)]
    for i, j in links.links:
        src_aligned[i] = True
        tgt_to_src[j].append(i)
        src_to_tgt[i].append(j)

    out: set[SpanPair] = set()
    for t_begin in range(m):
        for t_end in range(t_begin + 1, min(m, t_begin + max_len) + 1):
            s_min, s_max = n, -1
            for j in range(t_begin, t_end):
                for i in tgt_to_src[j]:
                    if i < s_min:
                        s_min = i
                    if i > s_max:
                        s_max = i
            if s_max < 0:
                continue  # no interior link
            consistent = True
            for i in range(s_min, s_max + 1):
                for j in src_to_tgt[i]:
                    if not (t_begin <= j < t_end):
                        consistent = False
                        break
                if not consistent:
                    break
            if not consistent:
                continue
            # extend over unaligned boundary words on the source side
            s_begin = s_min
            while s_begin >= 0 and (s_begin == s_min or not src_aligned[s_begin]):
                s_end = s_max + 1
                while s_end <= n and (s_end == s_max + 1 or not src_aligned[s_end - 1]):
                    if s_end - s_begin > max_len:
                        break
                    out.add(SpanPair(s_begin, s_end, t_begin, t_end))
                    s_end += 1
                s_begin -= 1
    return out


def extract_corpus_phrases(
    corpus: ParallelCorpus, max_len: int = DEFAULT_MAX_PHRASE_LEN
) -> list[PhraseOccurrence]:
    """Extract every phrase occurrence of the corpus in deterministic order.

    Occurrences are ordered by sentence id, then (s_begin, s_end, t_begin,
    t_end). Raises MissingAlignments when the corpus carries no alignments.
    """
    if corpus.alignments is None:
        raise MissingAlignments("corpus has no alignment sets")
    out: list[PhraseOccurrence] = []
    for pair, links in zip(corpus.pairs, corpus.alignments):
        for span in sorted(extract_phrase_pairs(pair, links, max_len)):
            out.append(
                PhraseOccurrence(
                    sentence_id=pair.id,
                    span=span,
                    src_phrase=" ".join(pair.src_tokens[span.s_begin : span.s_end]),
                    tgt_phrase=" ".join(pair.tgt_tokens[span.t_begin : span.t_end]),
                )
            )
    return out


def occurrences_to_tsv(occurrences: list[PhraseOccurrence]) -> str:
    """TSV dump: sentence_id, span bounds, then both phrase strings."""
    return "".join(
        f"{o.sentence_id}\t{o.span.s_begin}\t{o.span.s_end}"
        f"\t{o.span.t_begin}\t{o.span.t_end}\t{o.src_phrase}\t{o.tgt_phrase}\n"
        for o in occurrences
    )
