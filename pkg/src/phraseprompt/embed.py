"""Contextual token vectors: deterministic built-in embedder, external
vectors files, and span pooling.

Vectors are float32 everywhere. The RPPV1 vectors file is binary
little-endian: magic ``RPPV1\\0`` (6 bytes), u32 dim, u32 sentence count,
then per sentence a u32 token count followed by token_count x dim float32
values in row-major order.
"""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol, Sequence, runtime_checkable

import numpy as np

from .corpus import ParallelCorpus
from .errors import (
    BadMagic,
    DimMismatch,
    EmptySpan,
    LineCountMismatch,
    SpanOutOfRange,
    TokenCountMismatch,
    TruncatedFile,
)

VECTORS_MAGIC = b"RPPV1\x00"

DEFAULT_DIM = 64
DEFAULT_WINDOW = 2
DEFAULT_SEED = 42


@dataclass
class TokenVectors:
    """Per-token vectors of one sentence; shape (token_count, dim), float32."""

    sentence_id: int
    vectors: np.ndarray

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    def __len__(self) -> int:
        return int(self.vectors.shape[0])


@runtime_checkable
class EmbeddingProvider(Protocol):
    """Deterministic mapping from a token sequence to TokenVectors."""

    dim: int

    def embed(self, tokens: Sequence[str], sentence_id: int = -1) -> TokenVectors:
        ...


class HashedContextEmbedder:
    """Deterministic context-sensitive embedder for desk-scale work.

    Every token string gets a fixed unit base vector drawn from a PRNG
    seeded by a keyed hash of the string. A token at position p is embedded
    as the L2-normalized sum of its own base vector plus the base vectors of
    neighbors within ``window``, weighted 1/(2|delta|); out-of-range
    neighbors are skipped. Identical calls produce bitwise-identical output.
    """

    def __init__(
        self,
        dim: int = DEFAULT_DIM,
        window: int = DEFAULT_WINDOW,
        seed: int = DEFAULT_SEED,
    ):
        if dim < 1:
            raise ValueError("dim must be >= 1")
        if window < 0:
            raise ValueError("window must be >= 0")
        self.dim = dim
        self.window = window
        self.seed = seed
        self._key = (seed & 0xFFFFFFFFFFFFFFFF).to_bytes(8, "little")
        self._base_cache: dict[str, np.ndarray] = {}

    def _base(self, token: str) -> np.ndarray:
        vec = self._base_cache.get(token)
        if vec is None:
            digest = hashlib.blake2b(
                token.encode("utf-8"), key=self._key, digest_size=8
            ).digest()
            rng = np.random.default_rng(int.from_bytes(digest, "little"))
            raw = rng.standard_normal(self.dim)
            norm = float(np.linalg.norm(raw))
            vec = raw / norm if norm > 0.0 else raw
            self._base_cache[token] = vec
        return vec

    def embed(self, tokens: Sequence[str], sentence_id: int = -1) -> TokenVectors:
        n = len(tokens)
        out = np.empty((n, self.dim), dtype=np.float64)
        for p in range(n):
            acc = self._base(tokens[p]).copy()
            for delta in range(1, self.window + 1):
                for q in (p - delta, p + delta):
                    if 0 <= q < n:
                        acc += self._base(tokens[q]) / (2.0 * delta)
            norm = float(np.linalg.norm(acc))
            if norm > 0.0:
                acc = acc / norm
            out[p] = acc
        return TokenVectors(sentence_id, out.astype(np.float32))


def hashed_context_embed(
    tokens: Sequence[str],
    dim: int = DEFAULT_DIM,
    window: int = DEFAULT_WINDOW,
    seed: int = DEFAULT_SEED,
) -> TokenVectors:
    """One-shot form of HashedContextEmbedder.embed."""
    return HashedContextEmbedder(dim, window, seed).embed(tokens)


class FileVectorsProvider:
    """Serves pre-computed vectors loaded from an RPPV1 file.

    Lookup is by sentence id; the token count of each request is validated
    against the stored record.
    """

    def __init__(self, sentences: Sequence[TokenVectors]):
        if not sentences:
            raise TokenCountMismatch("vectors file holds no sentences")
        self.dim = sentences[0].dim
        for tv in sentences:
            if tv.dim != self.dim:
                raise DimMismatch(f"mixed dims {self.dim} and {tv.dim}")
        self._by_id = {tv.sentence_id: tv for tv in sentences}

    def embed(self, tokens: Sequence[str], sentence_id: int = -1) -> TokenVectors:
        tv = self._by_id.get(sentence_id)
        if tv is None:
            raise TokenCountMismatch(f"no stored vectors for sentence id {sentence_id}")
        if len(tv) != len(tokens):
            raise TokenCountMismatch(
                f"sentence {sentence_id}: {len(tokens)} tokens vs {len(tv)} stored vectors"
            )
        return tv


def pool_phrase(tv: TokenVectors, span: tuple[int, int]) -> np.ndarray:
    """Component-wise mean of the token vectors in a half-open span."""
    begin, end = span
    if end <= begin:
        raise EmptySpan(f"span [{begin}, {end}) is empty")
    if begin < 0 or end > len(tv):
        raise SpanOutOfRange(f"span [{begin}, {end}) outside 0..{len(tv)}")
    return tv.vectors[begin:end].mean(axis=0)


def write_vectors_file(
    path: str | Path, sentences: Sequence[TokenVectors], dim: int | None = None
) -> None:
    """Write TokenVectors records as an RPPV1 file."""
    if dim is None:
        if not sentences:
            raise DimMismatch("dim is required when writing zero sentences")
        dim = sentences[0].dim
    with open(path, "wb") as f:
        f.write(VECTORS_MAGIC)
        f.write(struct.pack("<II", dim, len(sentences)))
        for tv in sentences:
            if tv.dim != dim:
                raise DimMismatch(f"sentence {tv.sentence_id}: dim {tv.dim} != {dim}")
            f.write(struct.pack("<I", len(tv)))
            f.write(np.ascontiguousarray(tv.vectors, dtype="<f4").tobytes())


def load_vectors_file(
    path: str | Path,
    expected_dim: int | None = None,
    corpus: ParallelCorpus | None = None,
) -> list[TokenVectors]:
    """Read an RPPV1 file back into TokenVectors, sentence ids 0..count-1.

    With ``corpus`` given, sentence and token counts are validated against
    it. Raises BadMagic, TruncatedFile, DimMismatch, LineCountMismatch, or
    TokenCountMismatch.
    """
    data = Path(path).read_bytes()
    if len(data) < len(VECTORS_MAGIC) or data[: len(VECTORS_MAGIC)] != VECTORS_MAGIC:
        raise BadMagic(f"{path}: not an RPPV1 vectors file")
    off = len(VECTORS_MAGIC)
    if len(data) < off + 8:
        raise TruncatedFile(f"{path}: header cut short")
    dim, count = struct.unpack_from("<II", data, off)
    off += 8
    if dim < 1:
        raise DimMismatch(f"{path}: header dim {dim} is invalid")
    if expected_dim is not None and dim != expected_dim:
        raise DimMismatch(f"{path}: dim {dim}, expected {expected_dim}")
    out: list[TokenVectors] = []
    for sid in range(count):
        if len(data) < off + 4:
            raise TruncatedFile(f"{path}: sentence {sid} header cut short")
        (token_count,) = struct.unpack_from("<I", data, off)
        off += 4
        nbytes = token_count * dim * 4
        if len(data) < off + nbytes:
            raise TruncatedFile(f"{path}: sentence {sid} payload cut short")
        vecs = (
            np.frombuffer(data, dtype="<f4", count=token_count * dim, offset=off)
            .reshape(token_count, dim)
            .copy()
        )
        off += nbytes
        out.append(TokenVectors(sid, vecs))
    if corpus is not None:
        if len(out) != len(corpus.pairs):
            raise LineCountMismatch(
                f"{path}: {len(out)} sentences vs corpus of {len(corpus.pairs)}"
            )
        for tv, pair in zip(out, corpus.pairs):
            if len(tv) != len(pair.src_tokens):
                raise TokenCountMismatch(
                    f"sentence {pair.id}: {len(pair.src_tokens)} tokens "
                    f"vs {len(tv)} stored vectors"
                )
    return out
