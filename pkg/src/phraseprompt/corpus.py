"""Parallel corpus and Pharaoh alignment parsing.

The toolkit operates on pre-tokenized text and never re-tokenizes: one
sentence per line, tokens separated by single spaces, ``\\n`` terminators.
Alignment files follow the Pharaoh convention, whitespace-separated ``i-j``
items per line with 0-based indices, read as source index ``i`` aligned to
target index ``j``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path

from .errors import (
    EmptyLine,
    IndexOutOfRange,
    LineCountMismatch,
    MalformedLink,
    ReservedToken,
)

# Marker tokens of the prompt line format; forbidden as corpus tokens.
PAIR_MARKER = "<q>"
SEP_MARKER = "<r>"
RESERVED_TOKENS = (PAIR_MARKER, SEP_MARKER)

_LINK_RE = re.compile(r"^(\d+)-(\d+)$")


@dataclass(frozen=True)
class SentencePair:
    """One sentence pair; ``id`` is the 0-based line number."""

    id: int
    src_tokens: tuple[str, ...]
    tgt_tokens: tuple[str, ...]


@dataclass(frozen=True)
class AlignmentSet:
    """Word alignment links for one sentence pair, as (src_index, tgt_index)."""

    id: int
    links: frozenset[tuple[int, int]]


@dataclass
class ParallelCorpus:
    """Parsed corpus; ``alignments[i]`` (when present) belongs to ``pairs[i]``."""

    pairs: list[SentencePair]
    alignments: list[AlignmentSet] | None = None

    def __len__(self) -> int:
        return len(self.pairs)


def _checked_tokens(line: str, line_no: int) -> tuple[str, ...]:
    tokens = tuple(line.split())
    if not tokens:
        raise EmptyLine(f"line {line_no}: sentence has no tokens")
    for tok in tokens:
        if tok in RESERVED_TOKENS:
            raise ReservedToken(f"line {line_no}: token {tok!r} is a reserved marker")
    return tokens


def parse_parallel(src_text: str, tgt_text: str) -> ParallelCorpus:
    """Parse two line-aligned token streams into a ParallelCorpus.

    Raises LineCountMismatch, EmptyLine, or ReservedToken on bad input.
    """
    src_lines = src_text.splitlines()
    tgt_lines = tgt_text.splitlines()
    if len(src_lines) != len(tgt_lines):
        raise LineCountMismatch(
            f"source has {len(src_lines)} lines, target has {len(tgt_lines)}"
        )
    pairs = []
    for i, (src, tgt) in enumerate(zip(src_lines, tgt_lines)):
        pairs.append(SentencePair(i, _checked_tokens(src, i), _checked_tokens(tgt, i)))
    return ParallelCorpus(pairs)


def parse_alignments(align_text: str, corpus: ParallelCorpus) -> list[AlignmentSet]:
    """Parse a Pharaoh alignment file, one line per corpus sentence pair.

    Duplicate links collapse into the set; an empty line is legal and yields
    an empty link set. Raises MalformedLink, IndexOutOfRange, or
    LineCountMismatch.
    """
    lines = align_text.splitlines()
    if len(lines) != len(corpus.pairs):
        raise LineCountMismatch(
            f"alignment file has {len(lines)} lines, corpus has {len(corpus.pairs)}"
        )
    out = []
    for pair, line in zip(corpus.pairs, lines):
        links = set()
        for item in line.split():
            m = _LINK_RE.match(item)
            if m is None:
                raise MalformedLink(f"line {pair.id}: bad link item {item!r}")
            i, j = int(m.group(1)), int(m.group(2))
            if i >= len(pair.src_tokens) or j >= len(pair.tgt_tokens):
                raise IndexOutOfRange(
                    f"line {pair.id}: link {i}-{j} outside "
                    f"{len(pair.src_tokens)}x{len(pair.tgt_tokens)} sentence"
                )
            links.add((i, j))
        out.append(AlignmentSet(pair.id, frozenset(links)))
    return out


def corpus_to_text(corpus: ParallelCorpus) -> tuple[str, str]:
    """Serialize back to the canonical two-file form (inverse of parse_parallel)."""
    src = "".join(" ".join(p.src_tokens) + "\n" for p in corpus.pairs)
    tgt = "".join(" ".join(p.tgt_tokens) + "\n" for p in corpus.pairs)
    return src, tgt


def alignments_to_text(alignments: list[AlignmentSet]) -> str:
    """Serialize alignment sets, links sorted (i, j) within each line."""
    return "".join(
        " ".join(f"{i}-{j}" for i, j in sorted(a.links)) + "\n" for a in alignments
    )


def load_corpus(
    src_path: str | Path, tgt_path: str | Path, align_path: str | Path | None = None
) -> ParallelCorpus:
    """Read and parse corpus files from disk (UTF-8)."""
    src_text = Path(src_path).read_text(encoding="utf-8")
    tgt_text = Path(tgt_path).read_text(encoding="utf-8")
    corpus = parse_parallel(src_text, tgt_text)
    if align_path is not None:
        align_text = Path(align_path).read_text(encoding="utf-8")
        corpus.alignments = parse_alignments(align_text, corpus)
    return corpus
