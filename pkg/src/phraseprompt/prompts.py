"""Bilingual phrase prompts: retrieval, handcrafted constraints, and the
prompt line format.

A prompt is an ordered list of (source phrase, target phrase) pairs. The
rendered line joins each pair with the ``<q>`` marker, separates pairs with
``<r>``, and appends the source sentence after a final ``<r>``:

    p1src <q> p1tgt <r> p2src <q> p2tgt <r> SOURCE TOKENS

An empty prompt renders as the bare source line. Markers are literal
whitespace-delimited tokens, so prompted files stay greppable and the
format round-trips exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .corpus import PAIR_MARKER, SEP_MARKER
from .database import PhraseDatabase, SearchParams, _resolve_rerank, query
from .embed import EmbeddingProvider, pool_phrase
from .errors import (
    DanglingMarker,
    EmptyDatabase,
    EmptyPhrase,
    MalformedConstraint,
    ReservedToken,
)
from .extract import DEFAULT_MAX_PHRASE_LEN
from .metrics import contains_token_subsequence

DEFAULT_MAX_PAIRS = 8

STRATEGIES = ("greedy_cover", "all_ngrams")


@dataclass(frozen=True)
class PromptPair:
    """One prompt pair; distance and provenance are absent for handcrafted
    pairs and for pairs read back from a prompted line."""

    src_phrase: str
    tgt_phrase: str
    distance: float | None = None
    entry_id: int | None = None
    sentence_id: int | None = None


@dataclass
class Prompt:
    pairs: list[PromptPair]

    def pair_strings(self) -> list[tuple[str, str]]:
        return [(p.src_phrase, p.tgt_phrase) for p in self.pairs]

    def __len__(self) -> int:
        return len(self.pairs)


@dataclass
class PromptConfig:
    """Retrieval knobs; tau is the acceptance threshold on squared L2."""

    strategy: str = "greedy_cover"
    max_len: int = DEFAULT_MAX_PHRASE_LEN
    max_pairs: int = DEFAULT_MAX_PAIRS
    tau: float = math.inf
    search: SearchParams = field(default_factory=SearchParams)


def candidate_spans(
    tokens: Sequence[str], max_len: int, strategy: str = "all_ngrams"
) -> list[tuple[int, int]]:
    """Spans a retrieval pass will consider, in the order it tries them.

    all_ngrams: every span of length <= max_len, ordered by (begin, length).
    greedy_cover: longest-first at each begin position, the order the greedy
    cover tries spans at each cursor.
    """
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    n = len(tokens)
    if strategy == "all_ngrams":
        return [(b, b + ln) for b in range(n) for ln in range(1, min(max_len, n - b) + 1)]
    if strategy == "greedy_cover":
        return [(b, b + ln) for b in range(n) for ln in range(min(max_len, n - b), 0, -1)]
    raise ValueError(f"unknown strategy {strategy!r}")


def _marker_free(phrase: str) -> bool:
    return PAIR_MARKER not in phrase.split() and SEP_MARKER not in phrase.split()


def _nearest(
    db: PhraseDatabase,
    vec,
    params: SearchParams,
    exclude_sentence_id: int | None,
):
    """Nearest entry, optionally skipping entries from one sentence.

    Exclusion scans progressively deeper result lists; the re-rank depth
    grows along with k so the scan can pass a block of excluded entries
    larger than the configured depth.
    """
    if exclude_sentence_id is None:
        hits = query(db, vec, 1, params)
        return hits[0] if hits else None
    base_depth = _resolve_rerank(db, params)
    k = 8
    while True:
        deep = SearchParams(
            nprobe=params.nprobe,
            rerank_depth=max(base_depth, k) if base_depth > 0 else 0,
        )
        for entry, dist in query(db, vec, k, deep):
            if entry.sentence_id != exclude_sentence_id:
                return (entry, dist)
        if k >= len(db.entries):
            return None
        k = min(len(db.entries), k * 8)


def retrieve_prompt(
    db: PhraseDatabase,
    tokens: Sequence[str],
    provider: EmbeddingProvider,
    config: PromptConfig | None = None,
    exclude_sentence_id: int | None = None,
    sentence_id: int = -1,
) -> Prompt:
    """Build a prompt for one input sentence by nearest-neighbor retrieval.

    The sentence is embedded once; each candidate span is pooled into a
    query vector whose nearest database entry is fetched.

    greedy_cover walks a cursor over the sentence, trying spans longest
    first and accepting the first whose nearest distance is <= tau; the
    cursor then skips past the span, or advances one token when nothing is
    accepted. all_ngrams retrieves for every span, sorts the hits globally
    by distance, and greedily accepts non-overlapping spans. Both strategies
    stop at max_pairs, drop duplicate (src, tgt) strings keeping the first,
    and order the output by source position.
    """
    cfg = config or PromptConfig()
    if not db.entries:
        raise EmptyDatabase("cannot retrieve from an empty database")
    if cfg.strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {cfg.strategy!r}")
    tv = provider.embed(tokens, sentence_id=sentence_id)
    n = len(tokens)

    accepted: list[tuple[int, int, PromptPair]] = []
    seen: set[tuple[str, str]] = set()

    def _pair(entry, dist) -> PromptPair:
        return PromptPair(
            entry.src_phrase,
            entry.tgt_phrase,
            distance=dist,
            entry_id=entry.entry_id,
            sentence_id=entry.sentence_id,
        )

    if cfg.strategy == "greedy_cover":
        cursor = 0
        while cursor < n and len(accepted) < cfg.max_pairs:
            advanced = False
            for ln in range(min(cfg.max_len, n - cursor), 0, -1):
                span = (cursor, cursor + ln)
                found = _nearest(db, pool_phrase(tv, span), cfg.search, exclude_sentence_id)
                if found is None or found[1] > cfg.tau:
                    continue
                entry, dist = found
                key = (entry.src_phrase, entry.tgt_phrase)
                if key not in seen:
                    seen.add(key)
                    accepted.append((span[0], span[1], _pair(entry, dist)))
                cursor += ln
                advanced = True
                break
            if not advanced:
                cursor += 1
    else:  # all_ngrams
        candidates = []
        for span in candidate_spans(tokens, cfg.max_len, "all_ngrams"):
            found = _nearest(db, pool_phrase(tv, span), cfg.search, exclude_sentence_id)
            if found is None or found[1] > cfg.tau:
                continue
            candidates.append((found[1], span[0], span[1], found[0]))
        candidates.sort(key=lambda c: (c[0], c[1], c[2]))
        for dist, begin, end, entry in candidates:
            if len(accepted) >= cfg.max_pairs:
                break
            if any(begin < e and b < end for b, e, _ in accepted):
                continue
            key = (entry.src_phrase, entry.tgt_phrase)
            if key in seen:
                continue
            seen.add(key)
            accepted.append((begin, end, _pair(entry, dist)))

    accepted.sort(key=lambda item: (item[0], item[1]))
    return Prompt([pair for _, _, pair in accepted])


def render_prompt(prompt: Prompt, tokens: Sequence[str]) -> str:
    """Render a prompt plus source tokens as one text line."""
    for p in prompt.pairs:
        for phrase in (p.src_phrase, p.tgt_phrase):
            if not _marker_free(phrase):
                raise ReservedToken(f"phrase {phrase!r} contains a marker token")
    source = " ".join(tokens)
    if not prompt.pairs:
        return source
    rendered = f" {SEP_MARKER} ".join(
        f"{p.src_phrase} {PAIR_MARKER} {p.tgt_phrase}" for p in prompt.pairs
    )
    return f"{rendered} {SEP_MARKER} {source}"


def parse_prompted_line(line: str) -> tuple[Prompt, list[str]]:
    """Exact inverse of render_prompt (distances are not recoverable).

    A line without markers parses as an empty prompt plus its tokens.
    Raises DanglingMarker on grammar violations.
    """
    segments: list[list[str]] = [[]]
    for tok in line.split():
        if tok == SEP_MARKER:
            segments.append([])
        else:
            segments[-1].append(tok)
    if len(segments) == 1:
        if PAIR_MARKER in segments[0]:
            raise DanglingMarker("pair marker present but no source segment")
        return Prompt([]), segments[0]
    *pair_segments, source = segments
    if not source:
        raise DanglingMarker("trailing separator with no source segment")
    if PAIR_MARKER in source:
        raise DanglingMarker("source segment contains a pair marker")
    pairs: list[PromptPair] = []
    seen: set[tuple[str, str]] = set()
    for seg in pair_segments:
        if seg.count(PAIR_MARKER) != 1:
            raise DanglingMarker(f"malformed pair segment {' '.join(seg)!r}")
        cut = seg.index(PAIR_MARKER)
        src_toks, tgt_toks = seg[:cut], seg[cut + 1 :]
        if not src_toks or not tgt_toks:
            raise DanglingMarker(f"pair segment missing a side: {' '.join(seg)!r}")
        key = (" ".join(src_toks), " ".join(tgt_toks))
        if key not in seen:
            seen.add(key)
            pairs.append(PromptPair(*key))
    return Prompt(pairs), source


def constraint_prompt(pairs: Iterable[tuple[str, str]]) -> Prompt:
    """Handcrafted prompt from explicit (src, tgt) phrase pairs.

    Keeps the given order, drops duplicates, and rejects empty or
    marker-carrying phrases.
    """
    out: list[PromptPair] = []
    seen: set[tuple[str, str]] = set()
    for src, tgt in pairs:
        for phrase in (src, tgt):
            if not phrase.split():
                raise EmptyPhrase("constraint phrase is empty")
            if not _marker_free(phrase):
                raise ReservedToken(f"phrase {phrase!r} contains a marker token")
        key = (src, tgt)
        if key not in seen:
            seen.add(key)
            out.append(PromptPair(src, tgt))
    return Prompt(out)


def parse_constraints_tsv(text: str) -> list[tuple[str, str]]:
    """Parse ``src_phrase \\t tgt_phrase`` lines."""
    out = []
    for i, line in enumerate(text.splitlines()):
        parts = line.split("\t")
        if len(parts) != 2:
            raise MalformedConstraint(
                f"constraints line {i}: expected 2 tab-separated fields"
            )
        out.append((parts[0], parts[1]))
    return out


def constraints_for_sentence(
    constraints: Sequence[tuple[str, str]], tokens: Sequence[str]
) -> Prompt:
    """Constraint pairs whose source phrase occurs in the sentence, as a
    prompt (contiguous token-subsequence match)."""
    applicable = [
        (src, tgt)
        for src, tgt in constraints
        if contains_token_subsequence(tokens, src.split())
    ]
    return constraint_prompt(applicable)
