"""Exact and IVF-PQ approximate nearest-neighbor search under squared L2.

Distances returned by every search are squared L2 (monotone with L2,
cheaper to compute). Hits are sorted by ascending distance with ties broken
by ascending id; ids are unique within a result.

The IVF-PQ index follows the standard recipe: a coarse k-means quantizer
partitions vectors into ``nlist`` inverted lists; the residual of each
vector to its coarse centroid is split into ``m`` sub-vectors, each encoded
against a 2**nbits-entry sub-codebook. Queries scan the ``nprobe`` nearest
cells using a per-cell asymmetric distance table of shape (m, 2**nbits) and
may re-rank the best candidates on retained original vectors.

Persistence (binary, little-endian):
  flat   magic ``RPPF1\\0``, u32 dim, u64 count, count x (u64 id, dim float32)
  ivfpq  magic ``RPPI1\\0``, u32 dim, u32 nlist, u32 m, u32 nbits,
         flags u8 (bit 0: originals present), coarse centroids, sub-codebooks,
         per list: u64 length then (u64 id, m code bytes) records,
         originals block when flagged: u64 count, count x (u64 id, dim float32).
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Iterable, Sequence

import numpy as np

from .errors import BadMagic, BadShape, DimMismatch, EmptyInput, NoOriginals, TruncatedFile

FLAT_MAGIC = b"RPPF1\x00"
IVFPQ_MAGIC = b"RPPI1\x00"

DEFAULT_M = 8
DEFAULT_NBITS = 8
DEFAULT_RERANK_DEPTH = 100
DEFAULT_KMEANS_ITERS = 25


def default_nlist(n: int) -> int:
    """ceil(sqrt(n)) capped at 4096."""
    return min(4096, max(1, math.ceil(math.sqrt(n))))


def default_nprobe(nlist: int) -> int:
    return max(1, nlist // 8)


def default_train_sample(n: int, nlist: int) -> int:
    return min(n, 100 * nlist)


@dataclass
class SearchResult:
    """Hits as (id, squared L2 distance), sorted by (distance, id)."""

    hits: list[tuple[int, float]]

    @property
    def ids(self) -> list[int]:
        return [h[0] for h in self.hits]

    @property
    def distances(self) -> list[float]:
        return [h[1] for h in self.hits]

    def __len__(self) -> int:
        return len(self.hits)


@dataclass
class FlatIndex:
    """Exact index: ids alongside raw float32 vectors."""

    ids: np.ndarray  # (n,) int64, unique
    vectors: np.ndarray  # (n, dim) float32

    @property
    def dim(self) -> int:
        return int(self.vectors.shape[1])

    @property
    def size(self) -> int:
        return int(self.vectors.shape[0])

    @classmethod
    def from_entries(cls, entries: Iterable[tuple[int, Sequence[float]]]) -> "FlatIndex":
        pairs = list(entries)
        if not pairs:
            raise EmptyInput("flat index needs at least one entry")
        ids = np.asarray([p[0] for p in pairs], dtype=np.int64)
        vectors = np.asarray([p[1] for p in pairs], dtype=np.float32)
        return cls(ids, vectors)


@dataclass
class IvfPqIndex:
    """IVF-PQ index with residual encoding and optional stored originals."""

    dim: int
    nlist: int
    m: int
    nbits: int
    coarse_centroids: np.ndarray  # (nlist, dim) float32
    codebooks: np.ndarray  # (m, 2**nbits, dim // m) float32
    list_ids: list[np.ndarray]  # per cell: (len_i,) int64
    list_codes: list[np.ndarray]  # per cell: (len_i, m) uint8
    orig_ids: np.ndarray | None = None  # (n,) int64, sorted ascending
    orig_vectors: np.ndarray | None = None  # rows aligned with orig_ids
    counts_: list[int] = field(init=False, repr=False, default_factory=list)

    def __post_init__(self):
        self.counts_ = [len(ids) for ids in self.list_ids]

    @property
    def ksub(self) -> int:
        return 1 << self.nbits

    @property
    def dsub(self) -> int:
        return self.dim // self.m

    @property
    def size(self) -> int:
        return sum(self.counts_)

    @property
    def has_originals(self) -> bool:
        return self.orig_ids is not None


def _pairwise_sq_dists(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    """(n, k) squared distances via the expanded form; float64 in, float64 out."""
    p2 = np.einsum("ij,ij->i", points, points)[:, None]
    c2 = np.einsum("ij,ij->i", centroids, centroids)[None, :]
    d = p2 + c2 - 2.0 * (points @ centroids.T)
    np.maximum(d, 0.0, out=d)
    return d


def kmeans(
    points: np.ndarray, k: int, iters: int = DEFAULT_KMEANS_ITERS, seed: int = 0
) -> np.ndarray:
    """Lloyd's algorithm with seeded random-point initialization.

    Initial centroids are k distinct sampled points when n >= k, else the
    points cycled to length k. Runs exactly ``iters`` assignment/update
    rounds; an empty cluster is repaired by seizing the point farthest from
    its assigned centroid. Deterministic for a fixed seed; returns float32
    centroids of shape (k, dim).
    """
    pts = np.asarray(points, dtype=np.float64)
    if pts.ndim != 2:
        raise BadShape(f"points must be 2-d, got shape {pts.shape}")
    n, d = pts.shape
    if n < 1 or k < 1:
        raise EmptyInput("kmeans needs at least one point and k >= 1")
    rng = np.random.default_rng(seed)
    if n >= k:
        init = rng.choice(n, size=k, replace=False)
    else:
        init = np.arange(k) % n
    centroids = pts[init].copy()

    for _ in range(iters):
        dmat = _pairwise_sq_dists(pts, centroids)
        assign = np.argmin(dmat, axis=1)
        dists = dmat[np.arange(n), assign]
        counts = np.bincount(assign, minlength=k)
        for c in np.flatnonzero(counts == 0):
            far = int(np.argmax(dists))
            counts[assign[far]] -= 1
            assign[far] = c
            counts[c] = 1
            centroids[c] = pts[far]
            dists[far] = 0.0
        sums = np.empty((k, d), dtype=np.float64)
        for j in range(d):
            sums[:, j] = np.bincount(assign, weights=pts[:, j], minlength=k)
        nonzero = counts > 0
        centroids[nonzero] = sums[nonzero] / counts[nonzero, None]
    return centroids.astype(np.float32)


def _as_query(query: Sequence[float], dim: int) -> np.ndarray:
    q = np.asarray(query, dtype=np.float64).ravel()
    if q.shape[0] != dim:
        raise DimMismatch(f"query has dim {q.shape[0]}, index has dim {dim}")
    return q


def _exact_sq_dists(vectors: np.ndarray, q: np.ndarray) -> np.ndarray:
    diff = vectors.astype(np.float64) - q
    return np.einsum("ij,ij->i", diff, diff)


def flat_search(index: FlatIndex, query: Sequence[float], k: int) -> SearchResult:
    """Exact k smallest squared-L2 entries (all entries when fewer than k)."""
    q = _as_query(query, index.dim)
    if index.size == 0:
        return SearchResult([])
    d = _exact_sq_dists(index.vectors, q)
    order = np.lexsort((index.ids, d))[: max(k, 0)]
    return SearchResult([(int(index.ids[i]), float(d[i])) for i in order])


def build_ivfpq(
    vectors: Iterable[tuple[int, Sequence[float]]],
    nlist: int | None = None,
    m: int = DEFAULT_M,
    nbits: int = DEFAULT_NBITS,
    train_sample: int | None = None,
    seed: int = 0,
    keep_originals: bool = True,
    kmeans_iters: int = DEFAULT_KMEANS_ITERS,
) -> IvfPqIndex:
    """Train and populate an IVF-PQ index over (id, vector) pairs.

    Coarse centroids come from k-means over up to ``train_sample`` sampled
    vectors; sub-codebooks from per-sub-space k-means over the residuals of
    the same sample. Every vector is assigned to its nearest coarse cell
    (ties to the lowest index) and encoded as m nearest-sub-centroid
    indices. Deterministic for fixed inputs and seed.
    """
    pairs = list(vectors)
    if not pairs:
        raise EmptyInput("build_ivfpq needs at least one vector")
    ids = np.asarray([p[0] for p in pairs], dtype=np.int64)
    data = np.asarray([p[1] for p in pairs], dtype=np.float32)
    if data.ndim != 2:
        raise BadShape(f"vectors must share one dim, got shape {data.shape}")
    n, dim = data.shape
    if len(np.unique(ids)) != n:
        raise BadShape("ids must be unique")
    if dim % m != 0:
        raise BadShape(f"dim {dim} not divisible by m {m}")
    if not 1 <= nbits <= 8:
        raise BadShape(f"nbits must be in 1..8, got {nbits}")
    if nlist is None:
        nlist = default_nlist(n)
    if nlist < 1:
        raise BadShape(f"nlist must be >= 1, got {nlist}")
    if train_sample is None:
        train_sample = default_train_sample(n, nlist)
    if train_sample < 1:
        raise BadShape(f"train_sample must be >= 1, got {train_sample}")

    rng = np.random.default_rng(seed)
    t = min(train_sample, n)
    train_idx = rng.choice(n, size=t, replace=False) if t < n else np.arange(n)
    train = data[train_idx]

    coarse = kmeans(train, nlist, iters=kmeans_iters, seed=seed + 1)

    assign = np.argmin(
        _pairwise_sq_dists(data.astype(np.float64), coarse.astype(np.float64)), axis=1
    )
    residuals = data - coarse[assign]  # float32

    ksub = 1 << nbits
    dsub = dim // m
    train_residuals = residuals[train_idx]
    codebooks = np.empty((m, ksub, dsub), dtype=np.float32)
    for mi in range(m):
        sub = train_residuals[:, mi * dsub : (mi + 1) * dsub]
        codebooks[mi] = kmeans(sub, ksub, iters=kmeans_iters, seed=seed + 2 + mi)

    codes = np.empty((n, m), dtype=np.uint8)
    for mi in range(m):
        sub = residuals[:, mi * dsub : (mi + 1) * dsub].astype(np.float64)
        d = _pairwise_sq_dists(sub, codebooks[mi].astype(np.float64))
        codes[:, mi] = np.argmin(d, axis=1).astype(np.uint8)

    list_ids: list[np.ndarray] = []
    list_codes: list[np.ndarray] = []
    for c in range(nlist):
        mask = assign == c
        list_ids.append(ids[mask].copy())
        list_codes.append(codes[mask].copy())

    orig_ids = orig_vectors = None
    if keep_originals:
        order = np.argsort(ids, kind="stable")
        orig_ids = ids[order].copy()
        orig_vectors = data[order].copy()

    return IvfPqIndex(
        dim=dim,
        nlist=nlist,
        m=m,
        nbits=nbits,
        coarse_centroids=coarse,
        codebooks=codebooks,
        list_ids=list_ids,
        list_codes=list_codes,
        orig_ids=orig_ids,
        orig_vectors=orig_vectors,
    )


def ivfpq_search(
    index: IvfPqIndex,
    query: Sequence[float],
    k: int,
    nprobe: int | None = None,
    rerank_depth: int = DEFAULT_RERANK_DEPTH,
) -> SearchResult:
    """Scan the nprobe nearest cells by ADC; optionally re-rank exactly.

    With rerank_depth > 0 the rerank_depth best ADC candidates are re-scored
    with exact squared L2 on stored originals and the top k by exact
    distance are returned; with rerank_depth == 0 the ADC ranking itself is
    returned. Raises NoOriginals when re-ranking is requested on an index
    built with keep_originals=False.
    """
    q = _as_query(query, index.dim)
    if nprobe is None:
        nprobe = default_nprobe(index.nlist)
    nprobe = max(1, min(nprobe, index.nlist))
    if rerank_depth > 0 and not index.has_originals:
        raise NoOriginals("re-ranking requested but originals were not retained")

    centroids = index.coarse_centroids.astype(np.float64)
    coarse_d = np.einsum("ij,ij->i", centroids - q, centroids - q)
    probe_order = np.argsort(coarse_d, kind="stable")[:nprobe]

    m, dsub, ksub = index.m, index.dsub, index.ksub
    books = index.codebooks.astype(np.float64).reshape(m, ksub, dsub)

    cand_ids: list[np.ndarray] = []
    cand_adc: list[np.ndarray] = []
    for c in probe_order:
        ids_c = index.list_ids[c]
        if len(ids_c) == 0:
            continue
        rq = (q - centroids[c]).reshape(m, 1, dsub)
        table = np.einsum("mkd,mkd->mk", books - rq, books - rq)  # (m, ksub)
        codes_c = index.list_codes[c]
        adc = table[np.arange(m), codes_c].sum(axis=1)
        cand_ids.append(ids_c)
        cand_adc.append(adc)

    if not cand_ids:
        return SearchResult([])
    all_ids = np.concatenate(cand_ids)
    all_adc = np.concatenate(cand_adc)

    if rerank_depth > 0:
        depth = min(rerank_depth, len(all_ids))
        best = np.lexsort((all_ids, all_adc))[:depth]
        chosen_ids = all_ids[best]
        rows = np.searchsorted(index.orig_ids, chosen_ids)
        exact = _exact_sq_dists(index.orig_vectors[rows], q)
        order = np.lexsort((chosen_ids, exact))[: max(k, 0)]
        return SearchResult(
            [(int(chosen_ids[i]), float(exact[i])) for i in order]
        )
    order = np.lexsort((all_ids, all_adc))[: max(k, 0)]
    return SearchResult([(int(all_ids[i]), float(all_adc[i])) for i in order])


def reconstruct(index: IvfPqIndex, cell: int, position: int) -> np.ndarray:
    """Decode one stored code back to an approximate vector (float32)."""
    code = index.list_codes[cell][position]
    parts = [index.codebooks[mi, code[mi]] for mi in range(index.m)]
    return index.coarse_centroids[cell] + np.concatenate(parts)


# --- persistence ---------------------------------------------------------


def _read_exact(f: BinaryIO, n: int, what: str) -> bytes:
    data = f.read(n)
    if len(data) != n:
        raise TruncatedFile(f"unexpected end of file while reading {what}")
    return data


def _write_id_vector_block(f: BinaryIO, ids: np.ndarray, vectors: np.ndarray) -> None:
    f.write(struct.pack("<Q", len(ids)))
    for i in range(len(ids)):
        f.write(struct.pack("<q", int(ids[i])))
        f.write(np.ascontiguousarray(vectors[i], dtype="<f4").tobytes())


def _read_id_vector_block(f: BinaryIO, dim: int, what: str) -> tuple[np.ndarray, np.ndarray]:
    (count,) = struct.unpack("<Q", _read_exact(f, 8, f"{what} count"))
    ids = np.empty(count, dtype=np.int64)
    vectors = np.empty((count, dim), dtype=np.float32)
    row = 8 + dim * 4
    for i in range(count):
        rec = _read_exact(f, row, f"{what} record {i}")
        (ids[i],) = struct.unpack_from("<q", rec, 0)
        vectors[i] = np.frombuffer(rec, dtype="<f4", count=dim, offset=8)
    return ids, vectors


def write_index(f: BinaryIO, index: FlatIndex | IvfPqIndex) -> None:
    """Write either index kind to a binary stream (magic decides the kind)."""
    if isinstance(index, FlatIndex):
        f.write(FLAT_MAGIC)
        f.write(struct.pack("<I", index.dim))
        _write_id_vector_block(f, index.ids, index.vectors)
        return
    f.write(IVFPQ_MAGIC)
    f.write(struct.pack("<IIII", index.dim, index.nlist, index.m, index.nbits))
    f.write(struct.pack("<B", 1 if index.has_originals else 0))
    f.write(np.ascontiguousarray(index.coarse_centroids, dtype="<f4").tobytes())
    f.write(np.ascontiguousarray(index.codebooks, dtype="<f4").tobytes())
    for c in range(index.nlist):
        ids_c, codes_c = index.list_ids[c], index.list_codes[c]
        f.write(struct.pack("<Q", len(ids_c)))
        for i in range(len(ids_c)):
            f.write(struct.pack("<q", int(ids_c[i])))
            f.write(codes_c[i].tobytes())
    if index.has_originals:
        _write_id_vector_block(f, index.orig_ids, index.orig_vectors)


def read_index(f: BinaryIO) -> FlatIndex | IvfPqIndex:
    """Read an index written by write_index; dispatches on the magic bytes."""
    magic = _read_exact(f, len(FLAT_MAGIC), "index magic")
    if magic == FLAT_MAGIC:
        (dim,) = struct.unpack("<I", _read_exact(f, 4, "flat header"))
        ids, vectors = _read_id_vector_block(f, dim, "flat entries")
        return FlatIndex(ids, vectors)
    if magic != IVFPQ_MAGIC:
        raise BadMagic(f"unknown index magic {magic!r}")
    dim, nlist, m, nbits = struct.unpack("<IIII", _read_exact(f, 16, "ivfpq header"))
    (flags,) = struct.unpack("<B", _read_exact(f, 1, "ivfpq flags"))
    if m == 0 or dim % m != 0 or not 1 <= nbits <= 8:
        raise BadShape(f"bad ivfpq header: dim={dim} m={m} nbits={nbits}")
    ksub = 1 << nbits
    dsub = dim // m
    coarse = np.frombuffer(
        _read_exact(f, nlist * dim * 4, "coarse centroids"), dtype="<f4"
    ).reshape(nlist, dim).copy()
    books = np.frombuffer(
        _read_exact(f, m * ksub * dsub * 4, "sub-codebooks"), dtype="<f4"
    ).reshape(m, ksub, dsub).copy()
    list_ids: list[np.ndarray] = []
    list_codes: list[np.ndarray] = []
    for c in range(nlist):
        (count,) = struct.unpack("<Q", _read_exact(f, 8, f"list {c} length"))
        ids_c = np.empty(count, dtype=np.int64)
        codes_c = np.empty((count, m), dtype=np.uint8)
        row = 8 + m
        for i in range(count):
            rec = _read_exact(f, row, f"list {c} record {i}")
            (ids_c[i],) = struct.unpack_from("<q", rec, 0)
            codes_c[i] = np.frombuffer(rec, dtype=np.uint8, count=m, offset=8)
        if count and codes_c.max() >= ksub:
            raise BadShape(f"list {c}: code byte {int(codes_c.max())} >= 2^nbits")
        list_ids.append(ids_c)
        list_codes.append(codes_c)
    orig_ids = orig_vectors = None
    if flags & 1:
        orig_ids, orig_vectors = _read_id_vector_block(f, dim, "originals")
    return IvfPqIndex(
        dim=dim,
        nlist=nlist,
        m=m,
        nbits=nbits,
        coarse_centroids=coarse,
        codebooks=books,
        list_ids=list_ids,
        list_codes=list_codes,
        orig_ids=orig_ids,
        orig_vectors=orig_vectors,
    )


def save_index(index: FlatIndex | IvfPqIndex, path: str | Path) -> None:
    with open(path, "wb") as f:
        write_index(f, index)


def load_index(path: str | Path) -> FlatIndex | IvfPqIndex:
    with open(path, "rb") as f:
        return read_index(f)
