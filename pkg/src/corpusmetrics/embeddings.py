"""Per-paper embedding vectors: storage, vector math, synthetic test embedder.

Binary embedding file layout (little-endian):

* header: magic bytes ``EMB1``, then the dimension as uint32;
* records: id length as uint16, the id in UTF-8, then ``dim`` float32 values.

Vectors are stored as float32; all similarity arithmetic accumulates in
float64.
"""

from __future__ import annotations

import hashlib
import struct
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import Corpus
from .errors import EmbeddingFormatError

MAGIC = b"EMB1"


class EmbeddingWarning(UserWarning):
    pass


@dataclass
class EmbeddingMatrix:
    """Immutable id -> vector map with a fixed dimension."""

    dim: int
    vectors: dict[str, np.ndarray] = field(default_factory=dict)

    def add(self, paper_id: str, vector: np.ndarray) -> None:
        v = np.asarray(vector, dtype=np.float32)
        if v.shape != (self.dim,):
            raise ValueError(f"{paper_id}: expected dim {self.dim}, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError(f"{paper_id}: non-finite components")
        if not np.any(v):
            raise ValueError(f"{paper_id}: zero vector")
        self.vectors[paper_id] = v

    def __contains__(self, paper_id: str) -> bool:
        return paper_id in self.vectors

    def __len__(self) -> int:
        return len(self.vectors)

    def get(self, paper_id: str) -> np.ndarray:
        return self.vectors[paper_id]

    def ids(self) -> list[str]:
        return list(self.vectors)

    def matrix(self, ids: list[str]) -> np.ndarray:
        """Stack the given ids into an (n, dim) float64 array."""
        return np.stack([self.vectors[i] for i in ids]).astype(np.float64)


def cosine_similarity(v: np.ndarray, w: np.ndarray) -> float:
    v = np.asarray(v, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if v.shape != w.shape:
        raise ValueError(f"dimension mismatch: {v.shape} vs {w.shape}")
    nv = float(np.linalg.norm(v))
    nw = float(np.linalg.norm(w))
    if nv == 0.0 or nw == 0.0:
        raise ValueError("zero-norm input")
    return float(np.dot(v, w) / (nv * nw))


def window_mean(
    corpus: Corpus,
    emb: EmbeddingMatrix,
    paper_id: str,
    a: int,
    b: int,
) -> np.ndarray | None:
    """Mean embedding of papers published ``a`` to ``b`` years after the paper.

    The paper itself is never part of its own window. Papers without an
    embedding are skipped. Returns None when the window holds no papers.
    """
    if a > b:
        raise ValueError(f"invalid window ({a}, {b})")
    if paper_id not in corpus.papers:
        raise KeyError(f"unknown paper {paper_id!r}")
    year = corpus.papers[paper_id].year
    total = np.zeros(emb.dim, dtype=np.float64)
    count = 0
    for offset_year in range(year + a, year + b + 1):
        for other in corpus.by_year.get(offset_year, ()):
            if other == paper_id or other not in emb:
                continue
            total += emb.vectors[other]
            count += 1
    if count == 0:
        return None
    return total / count


_token_cache: dict[tuple[int, int], dict[str, np.ndarray]] = {}


def _token_direction(token: str, dim: int, seed: int) -> np.ndarray:
    cache = _token_cache.setdefault((dim, seed), {})
    vec = cache.get(token)
    if vec is None:
        digest = hashlib.sha256(f"{seed}\x1f{token}".encode()).digest()
        rng = np.random.default_rng(int.from_bytes(digest[:16], "little"))
        vec = rng.standard_normal(dim)
        cache[token] = vec
    return vec


def synthetic_embed(text: str, dim: int, seed: int = 0) -> np.ndarray:
    """Deterministic bag-of-tokens embedding for tests and dry runs.

    Each whitespace token is hashed to a fixed random direction; directions
    are summed with multiplicity and the result normalized to unit length,
    so texts sharing more tokens land closer in cosine similarity.
    """
    if dim < 2:
        raise ValueError("dim must be at least 2")
    tokens = text.lower().split()
    if not tokens:
        raise ValueError("empty text")
    total = np.zeros(dim, dtype=np.float64)
    for tok in tokens:
        total += _token_direction(tok, dim, seed)
    norm = np.linalg.norm(total)
    if norm == 0.0:
        raise ValueError("tokens cancelled to a zero vector")
    return (total / norm).astype(np.float32)


def embed_corpus_synthetic(corpus: Corpus, dim: int, seed: int = 0) -> EmbeddingMatrix:
    emb = EmbeddingMatrix(dim=dim)
    for pid, paper in corpus.papers.items():
        emb.add(pid, synthetic_embed(f"{paper.title} {paper.abstract}", dim, seed))
    return emb


def save_embeddings(emb: EmbeddingMatrix, path: str | Path) -> None:
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", emb.dim))
        for pid, vec in emb.vectors.items():
            encoded = pid.encode("utf-8")
            fh.write(struct.pack("<H", len(encoded)))
            fh.write(encoded)
            fh.write(vec.astype("<f4").tobytes())


def load_embeddings(path: str | Path, corpus: Corpus | None = None) -> EmbeddingMatrix:
    """Read an embedding file; ids absent from ``corpus`` are skipped with a warning."""
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) < 8 or data[:4] != MAGIC:
        raise EmbeddingFormatError(f"{path}: missing {MAGIC!r} header")
    dim = struct.unpack_from("<I", data, 4)[0]
    emb = EmbeddingMatrix(dim=dim)
    offset = 8
    record = 0
    vec_bytes = 4 * dim
    while offset < len(data):
        if offset + 2 > len(data):
            raise EmbeddingFormatError(f"record {record}: truncated id length")
        (id_len,) = struct.unpack_from("<H", data, offset)
        offset += 2
        if offset + id_len > len(data):
            raise EmbeddingFormatError(f"record {record}: truncated id")
        pid = data[offset : offset + id_len].decode("utf-8")
        offset += id_len
        if offset + vec_bytes > len(data):
            raise EmbeddingFormatError(
                f"record {record}: truncated vector (expected {dim} floats)"
            )
        vec = np.frombuffer(data, dtype="<f4", count=dim, offset=offset).copy()
        offset += vec_bytes
        if corpus is not None and pid not in corpus.papers:
            warnings.warn(f"skipping embedding for unknown paper {pid!r}", EmbeddingWarning)
        else:
            emb.add(pid, vec)
        record += 1
    return emb
