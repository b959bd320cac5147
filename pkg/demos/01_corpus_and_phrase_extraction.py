"""Parse a tiny aligned corpus and extract every consistent phrase pair.

Run with: python3 demos/01_corpus_and_phrase_extraction.py
"""

from phraseprompt import (
    extract_corpus_phrases,
    extract_phrase_pairs,
    is_consistent,
    occurrences_to_tsv,
    parse_alignments,
    parse_parallel,
)
from phraseprompt.extract import SpanPair

# Two pre-tokenized sentences plus Pharaoh alignments (src_index-tgt_index).
SRC = "the green house\nhe reads a book\n"
TGT = "das gruene Haus\ner liest ein Buch\n"
ALIGN = "0-0 1-1 2-2\n0-0 1-1 2-2 3-3\n"

corpus = parse_parallel(SRC, TGT)
corpus.alignments = parse_alignments(ALIGN, corpus)
print(f"parsed {len(corpus)} sentence pairs")

# The consistency criterion in action: a span pair is kept iff at least one
# link lands inside it and no link leaks across its boundary.
links = corpus.alignments[0]
print("\nconsistency checks on sentence 0:")
for span in (SpanPair(0, 2, 0, 2), SpanPair(0, 2, 0, 3), SpanPair(1, 3, 0, 2)):
    print(f"  src[{span.s_begin}:{span.s_end}) x tgt[{span.t_begin}:{span.t_end})"
          f" -> {is_consistent(links, span)}")

# Per-sentence extraction, capped at 3-token spans on both sides.
pairs = extract_phrase_pairs(corpus.pairs[0], links, max_len=3)
print(f"\nsentence 0 yields {len(pairs)} span pairs:")
for span in sorted(pairs):
    src = " ".join(corpus.pairs[0].src_tokens[span.s_begin : span.s_end])
    tgt = " ".join(corpus.pairs[0].tgt_tokens[span.t_begin : span.t_end])
    print(f"  {src!r} -> {tgt!r}")

# Whole-corpus extraction in deterministic order, ready for the database.
occurrences = extract_corpus_phrases(corpus, max_len=3)
print(f"\ncorpus yields {len(occurrences)} occurrences; TSV dump:")
print(occurrences_to_tsv(occurrences))
