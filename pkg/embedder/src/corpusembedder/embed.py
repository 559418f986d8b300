"""Batch sentence embedding of a corpus into the binary interchange format."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .emb_format import read_corpus_texts, write_embeddings

DEFAULT_MODEL = "sentence-transformers/sentence-t5-xl"


@dataclass
class EmbedJob:
    corpus_path: str
    out_path: str
    model: str = DEFAULT_MODEL
    batch_size: int = 32


def load_sentence_model(name_or_path: str):
    from sentence_transformers import SentenceTransformer

    try:
        return SentenceTransformer(name_or_path)
    except Exception as exc:
        raise RuntimeError(f"cannot load sentence model {name_or_path!r}: {exc}") from exc


def embed_corpus(job: EmbedJob) -> int:
    """Embed title + abstract of every paper; returns the record count.

    Papers with empty text, or whose tokens the model cannot represent
    (zero vector), are skipped with a warning: the interchange format
    requires finite nonzero vectors.
    """
    model = load_sentence_model(job.model)
    # renamed upstream; support both sentence-transformers generations
    dim_getter = getattr(model, "get_embedding_dimension", None)
    if dim_getter is None:
        dim_getter = model.get_sentence_embedding_dimension
    dim = dim_getter()
    pairs = read_corpus_texts(job.corpus_path)

    kept_ids: list[str] = []
    texts: list[str] = []
    for paper_id, text in pairs:
        if not text:
            warnings.warn(f"skipping {paper_id}: empty text")
            continue
        kept_ids.append(paper_id)
        texts.append(text)

    vectors = model.encode(
        texts,
        batch_size=job.batch_size,
        convert_to_numpy=True,
        show_progress_bar=False,
    ).astype(np.float32)

    def records():
        for paper_id, vec in zip(kept_ids, vectors):
            if not np.all(np.isfinite(vec)) or not np.any(vec):
                warnings.warn(f"skipping {paper_id}: model produced an unusable vector")
                continue
            yield paper_id, vec

    return write_embeddings(job.out_path, dim, records())
