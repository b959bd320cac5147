"""Export per-token contextual vectors from a pretrained encoder.

The corpus is pre-tokenized text, one sentence per line, whitespace-
separated words. Each word is fed to the encoder's subword tokenizer; its
vector is the mean of its subword hidden states at the chosen layer, so the
output has exactly one vector per corpus word and the file always validates
against the corpus it was built from.

Inference runs in eval mode with gradients off; for a fixed model, corpus,
layer, and batch size, repeated runs write bitwise-identical files.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from .errors import ModelLoadFailure, TokenizationMismatch
from .rppv import write_rppv


@dataclass
class ExportConfig:
    model: str  # HF model identifier or local checkpoint directory
    corpus: str | Path
    output: str | Path
    layer: int = -1  # hidden-state index; -1 is the last layer
    batch_size: int = 8


def read_corpus_words(path: str | Path) -> list[list[str]]:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    sentences = [line.split() for line in lines]
    for i, words in enumerate(sentences):
        if not words:
            raise ValueError(f"corpus line {i} is empty; canonical corpora have no empty lines")
    return sentences


def load_encoder(model_id: str):
    """Tokenizer and encoder in eval mode; wraps load failures."""
    from transformers import AutoModel, AutoTokenizer

    try:
        tokenizer = AutoTokenizer.from_pretrained(model_id)
        model = AutoModel.from_pretrained(model_id)
    except Exception as exc:
        raise ModelLoadFailure(f"cannot load {model_id!r}: {exc}") from exc
    if not getattr(tokenizer, "is_fast", False):
        raise ModelLoadFailure(
            f"{model_id!r} has no fast tokenizer; word-level pooling needs word_ids()"
        )
    model.eval()
    return tokenizer, model


def resolve_layer(model, layer: int) -> int:
    """Validate a hidden-state index; hidden_states has num_layers + 1
    entries (embeddings first)."""
    depth = int(model.config.num_hidden_layers) + 1
    if not -depth <= layer < depth:
        raise ValueError(f"layer {layer} outside the encoder's range [-{depth}, {depth})")
    return layer % depth


def compute_token_vectors(
    tokenizer, model, sentences: list[list[str]], layer: int = -1, batch_size: int = 8
) -> list[np.ndarray]:
    """One (word_count, hidden_size) float32 matrix per sentence, in order."""
    layer = resolve_layer(model, layer)
    out: list[np.ndarray] = []
    with torch.no_grad():
        for start in range(0, len(sentences), batch_size):
            batch = sentences[start : start + batch_size]
            enc = tokenizer(
                batch, is_split_into_words=True, padding=True, return_tensors="pt"
            )
            hidden = model(**enc, output_hidden_states=True).hidden_states[layer]
            for i, words in enumerate(batch):
                word_ids = enc.word_ids(i)
                positions: list[list[int]] = [[] for _ in words]
                for pos, wid in enumerate(word_ids):
                    if wid is not None:
                        positions[wid].append(pos)
                rows = []
                for w, pos_list in enumerate(positions):
                    if not pos_list:
                        raise TokenizationMismatch(
                            f"sentence {start + i}: word {words[w]!r} yields no subwords"
                        )
                    rows.append(hidden[i, pos_list].mean(dim=0))
                out.append(torch.stack(rows).to(torch.float32).numpy())
    return out


def export_token_vectors(cfg: ExportConfig) -> int:
    """Run the export; returns the number of sentences written."""
    sentences = read_corpus_words(cfg.corpus)
    tokenizer, model = load_encoder(cfg.model)
    vectors = compute_token_vectors(
        tokenizer, model, sentences, layer=cfg.layer, batch_size=cfg.batch_size
    )
    write_rppv(cfg.output, vectors, dim=int(model.config.hidden_size))
    return len(vectors)
