"""Brute-force reference implementations and verification suites.

Everything here is re-derived from first principles and deliberately shares
no logic with the production code it checks: consistency is re-stated
inline, nearest neighbors come from a naive scan, and BLEU is recomputed
with a separate formulation. Oracles may be slow; they only run under tests
and the ``verify`` subcommand.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .corpus import AlignmentSet, SentencePair
from .extract import SpanPair, extract_phrase_pairs
from .index import FlatIndex, SearchResult, flat_search
from .metrics import bleu
from .prompts import Prompt, PromptPair, parse_prompted_line, render_prompt


@dataclass
class OracleReport:
    case_count: int
    mismatch_count: int
    first_mismatch: str | None = None

    def record(self, detail: str) -> None:
        self.mismatch_count += 1
        if self.first_mismatch is None:
            self.first_mismatch = detail


# --- independent re-implementations --------------------------------------


def oracle_extract(pair: SentencePair, links: AlignmentSet, max_len: int) -> set[SpanPair]:
    """Enumerate every span pair and keep the consistent ones (O(n^2 m^2 L))."""
    n, m = len(pair.src_tokens), len(pair.tgt_tokens)
    out = set()
    for sb in range(n):
        for se in range(sb + 1, min(n, sb + max_len) + 1):
            for tb in range(m):
                for te in range(tb + 1, min(m, tb + max_len) + 1):
                    has_inner = False
                    violated = False
                    for i, j in links.links:
                        src_in = sb <= i < se
                        tgt_in = tb <= j < te
                        if src_in and tgt_in:
                            has_inner = True
                        elif src_in != tgt_in:
                            violated = True
                            break
                    if has_inner and not violated:
                        out.add(SpanPair(sb, se, tb, te))
    return out


def oracle_knn(
    entries: Sequence[tuple[int, np.ndarray]], query: Sequence[float], k: int
) -> SearchResult:
    """Naive full scan: one squared distance per entry, then a stable sort."""
    q = np.asarray(query, dtype=np.float64)
    scored = []
    for eid, vec in entries:
        diff = np.asarray(vec, dtype=np.float64) - q
        scored.append((float(np.dot(diff, diff)), int(eid)))
    scored.sort()
    return SearchResult([(eid, dist) for dist, eid in scored[:k]])


def oracle_bleu(
    hyps: Sequence[Sequence[str]],
    refs: Sequence[Sequence[str]],
    max_n: int = 4,
    smooth: bool = False,
) -> float:
    """BLEU recomputed with per-order explicit dictionaries."""
    stats = {n: [0, 0] for n in range(1, max_n + 1)}
    hyp_len = sum(len(h) for h in hyps)
    ref_len = sum(len(r) for r in refs)
    for hyp, ref in zip(hyps, refs):
        for n in range(1, max_n + 1):
            hgrams = Counter(tuple(hyp[i : i + n]) for i in range(len(hyp) - n + 1))
            rgrams = Counter(tuple(ref[i : i + n]) for i in range(len(ref) - n + 1))
            overlap = 0
            for g, c in hgrams.items():
                overlap += min(c, rgrams.get(g, 0))
            stats[n][0] += overlap
            stats[n][1] += max(len(hyp) - n + 1, 0)
    if hyp_len == 0:
        return 0.0
    precisions = []
    for n in range(1, max_n + 1):
        o, t = stats[n]
        if smooth and n >= 2:
            o, t = o + 1, t + 1
        if o == 0 or t == 0:
            return 0.0
        precisions.append(o / t)
    geo = math.exp(sum(math.log(p) for p in precisions) / max_n)
    bp = math.exp(min(0.0, 1.0 - ref_len / hyp_len))
    return 100.0 * bp * geo


def oracle_contains(haystack: Sequence[str], needle: Sequence[str]) -> bool:
    """Subsequence search restated as an explicit O(n*m) double loop."""
    n, m = len(haystack), len(needle)
    if m == 0:
        return True
    for start in range(n - m + 1):
        hit = True
        for off in range(m):
            if haystack[start + off] != needle[off]:
                hit = False
                break
        if hit:
            return True
    return False


# --- seeded case generators -----------------------------------------------


def random_aligned_pair(
    rng: np.random.Generator, max_tokens: int = 8, max_density: float = 0.5
) -> tuple[SentencePair, AlignmentSet]:
    n = int(rng.integers(1, max_tokens + 1))
    m = int(rng.integers(1, max_tokens + 1))
    density = float(rng.uniform(0.0, max_density))
    links = {
        (i, j)
        for i in range(n)
        for j in range(m)
        if rng.random() < density
    }
    pair = SentencePair(
        0,
        tuple(f"s{i}" for i in range(n)),
        tuple(f"t{j}" for j in range(m)),
    )
    return pair, AlignmentSet(0, frozenset(links))


def random_prompt(rng: np.random.Generator) -> tuple[Prompt, list[str]]:
    def phrase() -> str:
        words = int(rng.integers(1, 4))
        return " ".join(
            "".join(rng.choice(list("abcdefghij"), size=int(rng.integers(1, 5))))
            for _ in range(words)
        )

    pairs: list[PromptPair] = []
    seen = set()
    for _ in range(int(rng.integers(0, 6))):
        key = (phrase(), phrase())
        if key not in seen:
            seen.add(key)
            pairs.append(PromptPair(*key))
    tokens = [phrase().split()[0] for _ in range(int(rng.integers(1, 9)))]
    return Prompt(pairs), tokens


# --- verification suites ---------------------------------------------------


def verify_extract(cases: int = 1000, seed: int = 1234, max_len: int = 4) -> OracleReport:
    """extract_phrase_pairs vs exhaustive enumeration on random sentences."""
    rng = np.random.default_rng(seed)
    report = OracleReport(cases, 0)
    for c in range(cases):
        pair, links = random_aligned_pair(rng)
        got = extract_phrase_pairs(pair, links, max_len)
        want = oracle_extract(pair, links, max_len)
        if got != want:
            report.record(
                f"case {c}: {len(pair.src_tokens)}x{len(pair.tgt_tokens)} "
                f"links={sorted(links.links)}: got {len(got)} spans, want {len(want)}"
            )
    return report


def verify_knn(
    cases: int = 100,
    n: int = 10000,
    dim: int = 32,
    k: int = 10,
    seed: int = 5678,
    rel_tol: float = 1e-6,
) -> OracleReport:
    """flat_search vs the naive scan on one seeded Gaussian vector set."""
    rng = np.random.default_rng(seed)
    vectors = rng.standard_normal((n, dim)).astype(np.float32)
    index = FlatIndex(np.arange(n, dtype=np.int64), vectors)
    entries = [(i, vectors[i]) for i in range(n)]
    report = OracleReport(cases, 0)
    for c in range(cases):
        q = rng.standard_normal(dim)
        got = flat_search(index, q, k)
        want = oracle_knn(entries, q, k)
        if got.ids != want.ids:
            report.record(f"case {c}: ids {got.ids} != {want.ids}")
            continue
        for (gid, gd), (_, wd) in zip(got.hits, want.hits):
            scale = max(abs(wd), 1e-12)
            if abs(gd - wd) / scale > rel_tol:
                report.record(f"case {c}: id {gid} distance {gd} vs {wd}")
                break
    return report


def verify_bleu(cases: int = 200, seed: int = 97) -> OracleReport:
    """Production BLEU vs the independent reformulation, plus hand cases."""
    rng = np.random.default_rng(seed)
    vocab = ["der", "die", "das", "und", "zu", "im", "auf", "mit"]
    report = OracleReport(cases + 3, 0)
    for c in range(cases):
        size = int(rng.integers(1, 5))
        hyps = [
            [vocab[int(v)] for v in rng.integers(0, len(vocab), int(rng.integers(1, 10)))]
            for _ in range(size)
        ]
        refs = [
            [vocab[int(v)] for v in rng.integers(0, len(vocab), int(rng.integers(1, 10)))]
            for _ in range(size)
        ]
        smooth = bool(rng.random() < 0.5)
        got = bleu(hyps, refs, smooth=smooth)
        want = oracle_bleu(hyps, refs, smooth=smooth)
        if abs(got - want) > 1e-9:
            report.record(f"case {c}: bleu {got} vs {want}")
    hand = [
        ([["a", "b", "c", "d", "e"]], [["a", "b", "c", "d", "e"]], 100.0),
        ([["a", "b", "c", "d"]], [["a", "b", "c", "d", "e"]], 100.0 * math.exp(-0.25)),
        ([["x", "y", "z", "w"]], [["a", "b", "c", "d"]], 0.0),
    ]
    for hyps, refs, want_score in hand:
        if abs(bleu(hyps, refs) - want_score) > 1e-6:
            report.record(f"hand case {hyps} vs {refs}: {bleu(hyps, refs)}")
    return report


def verify_roundtrip(cases: int = 1000, seed: int = 4242) -> OracleReport:
    """parse(render(prompt, tokens)) identity on random prompts."""
    rng = np.random.default_rng(seed)
    report = OracleReport(cases, 0)
    for c in range(cases):
        prompt, tokens = random_prompt(rng)
        line = render_prompt(prompt, tokens)
        back, back_tokens = parse_prompted_line(line)
        if back.pair_strings() != prompt.pair_strings() or back_tokens != tokens:
            report.record(f"case {c}: {line!r} round-tripped to {back.pair_strings()}")
    return report


SUITES = {
    "extract": verify_extract,
    "knn": verify_knn,
    "bleu": verify_bleu,
    "roundtrip": verify_roundtrip,
}


def run_suite(name: str, **kwargs) -> OracleReport:
    if name not in SUITES:
        raise ValueError(f"unknown suite {name!r}; choose from {sorted(SUITES)}")
    return SUITES[name](**kwargs)
