"""Prompt-aware co-training data: originals mixed with prompted copies.

The mixed corpus keeps every original sentence pair unchanged and appends,
for a seeded random fraction of sentence ids, one extra pair whose source
line is the rendered prompt line and whose target line is the untouched
reference. Augmented lines come after all originals, in sentence-id order,
so output is deterministic and diffable; shuffling is the trainer's job.

With exclude_self (the default) retrieval skips database entries extracted
from the sentence being augmented, which blocks the copy shortcut a model
could otherwise learn from prompt to reference.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .corpus import ParallelCorpus
from .database import PhraseDatabase
from .embed import EmbeddingProvider
from .prompts import PromptConfig, render_prompt, retrieve_prompt


@dataclass
class MixConfig:
    ratio: float = 1.0
    seed: int = 0
    exclude_self: bool = True
    prompt_config: PromptConfig = field(default_factory=PromptConfig)


def make_mixed_corpus(
    corpus: ParallelCorpus,
    db: PhraseDatabase,
    provider: EmbeddingProvider,
    cfg: MixConfig | None = None,
) -> tuple[list[str], list[str]]:
    """Return (source lines, target lines) of the mixed corpus.

    Output length is n + round(ratio * n); fixed seeds give byte-identical
    output.
    """
    cfg = cfg or MixConfig()
    if not 0.0 <= cfg.ratio <= 1.0:
        raise ValueError(f"ratio must be in [0, 1], got {cfg.ratio}")
    n = len(corpus.pairs)
    out_src = [" ".join(p.src_tokens) for p in corpus.pairs]
    out_tgt = [" ".join(p.tgt_tokens) for p in corpus.pairs]

    count = int(round(cfg.ratio * n))
    if count == 0:
        return out_src, out_tgt
    rng = np.random.default_rng(cfg.seed)
    chosen = np.sort(rng.choice(n, size=count, replace=False))
    for sid in chosen.tolist():
        pair = corpus.pairs[sid]
        prompt = retrieve_prompt(
            db,
            pair.src_tokens,
            provider,
            cfg.prompt_config,
            exclude_sentence_id=pair.id if cfg.exclude_self else None,
            sentence_id=pair.id,
        )
        out_src.append(render_prompt(prompt, pair.src_tokens))
        out_tgt.append(" ".join(pair.tgt_tokens))
    return out_src, out_tgt
