"""Translation scoring: corpus BLEU and lexical-constraint accuracy.

BLEU here is corpus-level with a single reference per hypothesis, clipped
n-gram precisions up to ``max_n`` aggregated over the corpus, geometric
mean, and the usual brevity penalty. No smoothing by default: any zero
precision zeroes the score. The optional add-one smoothing (orders n >= 2)
exists for short fixtures.

Constraint accuracy is the fraction of cases whose required target phrase
occurs as a contiguous, case-sensitive token subsequence of the hypothesis.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

from .errors import EmptyCaseSet, EmptyCorpus, LengthMismatch

TokenSeq = Sequence[str]


def _ngram_counts(tokens: TokenSeq, n: int) -> Counter:
    return Counter(tuple(tokens[i : i + n]) for i in range(len(tokens) - n + 1))


def bleu(
    hyps: Sequence[TokenSeq],
    refs: Sequence[TokenSeq],
    max_n: int = 4,
    smooth: bool = False,
) -> float:
    """Corpus-level BLEU in [0, 100] over pre-tokenized text.

    Raises LengthMismatch when hyps and refs differ in length and
    EmptyCorpus on empty input.
    """
    if len(hyps) != len(refs):
        raise LengthMismatch(f"{len(hyps)} hypotheses vs {len(refs)} references")
    if not hyps:
        raise EmptyCorpus("nothing to score")

    matched = [0] * (max_n + 1)
    total = [0] * (max_n + 1)
    hyp_len = 0
    ref_len = 0
    for hyp, ref in zip(hyps, refs):
        hyp_len += len(hyp)
        ref_len += len(ref)
        for n in range(1, max_n + 1):
            hyp_counts = _ngram_counts(hyp, n)
            if not hyp_counts:
                continue
            ref_counts = _ngram_counts(ref, n)
            matched[n] += sum(min(c, ref_counts[g]) for g, c in hyp_counts.items())
            total[n] += sum(hyp_counts.values())

    if hyp_len == 0:
        return 0.0
    log_sum = 0.0
    for n in range(1, max_n + 1):
        m, t = matched[n], total[n]
        if smooth and n >= 2:
            m, t = m + 1, t + 1
        if m == 0 or t == 0:
            return 0.0
        log_sum += math.log(m / t)
    bp = 1.0 if hyp_len >= ref_len else math.exp(1.0 - ref_len / hyp_len)
    return 100.0 * bp * math.exp(log_sum / max_n)


def contains_token_subsequence(haystack: TokenSeq, needle: TokenSeq) -> bool:
    """True iff needle occurs contiguously in haystack (token-exact)."""
    n, m = len(haystack), len(needle)
    if m == 0 or m > n:
        return m == 0
    needle = list(needle)
    return any(list(haystack[i : i + m]) == needle for i in range(n - m + 1))


@dataclass(frozen=True)
class ConstraintCase:
    """One lexical-constraint check: hypothesis tokens and the required
    target phrase tokens."""

    hyp_tokens: tuple[str, ...]
    constraint_tgt: tuple[str, ...]


def constraint_accuracy(cases: Sequence[ConstraintCase]) -> float:
    """Fraction of cases whose constraint phrase appears in the hypothesis."""
    if not cases:
        raise EmptyCaseSet("no constraint cases")
    satisfied = sum(
        1 for c in cases if contains_token_subsequence(c.hyp_tokens, c.constraint_tgt)
    )
    return satisfied / len(cases)
