"""Standalone RPPV1 writer.

The format is the wire contract with the retrieval toolkit (binary,
little-endian): magic ``RPPV1\\0`` (6 bytes), u32 dim, u32 sentence count,
then per sentence a u32 token count followed by token_count x dim float32
values in row-major order.
"""

from __future__ import annotations

import struct
from pathlib import Path
from typing import Sequence

import numpy as np

MAGIC = b"RPPV1\x00"


def write_rppv(path: str | Path, sentences: Sequence[np.ndarray], dim: int) -> None:
    """Write one (token_count, dim) float32 array per sentence."""
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<II", dim, len(sentences)))
        for i, mat in enumerate(sentences):
            if mat.ndim != 2 or mat.shape[1] != dim:
                raise ValueError(f"sentence {i}: expected (*, {dim}), got {mat.shape}")
            f.write(struct.pack("<I", mat.shape[0]))
            f.write(np.ascontiguousarray(mat, dtype="<f4").tobytes())
