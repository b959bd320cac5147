import numpy as np
import pytest

from phraseprompt import (
    HashedContextEmbedder,
    ParallelCorpus,
    build_database,
    parse_alignments,
    parse_parallel,
)


def make_diagonal_corpus(n_sentences=200, seed=77, min_len=3, max_len=10):
    """Toy corpus with monotone 1:1 alignments: every span pair on the
    diagonal is consistent, so every n-gram of a sentence is in the database.

    Tokens are distinct within each sentence; targets are uppercased copies.
    """
    rng = np.random.default_rng(seed)
    vocab = [f"w{i:03d}" for i in range(300)]
    src_lines, tgt_lines, align_lines = [], [], []
    for _ in range(n_sentences):
        length = int(rng.integers(min_len, max_len + 1))
        words = rng.choice(len(vocab), size=length, replace=False)
        tokens = [vocab[int(w)] for w in words]
        src_lines.append(" ".join(tokens))
        tgt_lines.append(" ".join(t.upper() for t in tokens))
        align_lines.append(" ".join(f"{i}-{i}" for i in range(length)))
    src = "".join(line + "\n" for line in src_lines)
    tgt = "".join(line + "\n" for line in tgt_lines)
    align = "".join(line + "\n" for line in align_lines)
    return src, tgt, align


def corpus_from_text(src, tgt, align) -> ParallelCorpus:
    corpus = parse_parallel(src, tgt)
    corpus.alignments = parse_alignments(align, corpus)
    return corpus


@pytest.fixture(scope="session")
def toy_corpus() -> ParallelCorpus:
    """Two-sentence fixture: the 2x2 single-link sentence and a 3x3 one."""
    src = "a b\ns0 s1 s2\n"
    tgt = "c d\nt0 t1 t2\n"
    align = "0-0\n0-0 1-2 2-1\n"
    return corpus_from_text(src, tgt, align)


@pytest.fixture(scope="session")
def diagonal_corpus() -> ParallelCorpus:
    src, tgt, align = make_diagonal_corpus()
    return corpus_from_text(src, tgt, align)


@pytest.fixture(scope="session")
def embedder() -> HashedContextEmbedder:
    return HashedContextEmbedder()


@pytest.fixture(scope="session")
def diagonal_db(diagonal_corpus, embedder):
    return build_database(diagonal_corpus, embedder)
