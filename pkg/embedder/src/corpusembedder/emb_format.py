"""Writers and readers for the pipeline's interchange files.

These implement the documented external formats directly so the sidecar has
no import dependency on the main package:

* embedding file: magic ``EMB1``, little-endian uint32 dimension, then
  records of uint16 id length, UTF-8 id, and ``dim`` float32 values;
* corpus file: one JSON object per line with id/title/abstract/journal/
  authors/year/citations;
* labeled sets: ``paper_id<TAB>label<TAB>source`` lines;
* probability files: ``paper_id<TAB>probability`` lines.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

MAGIC = b"EMB1"


def write_embeddings(path: str | Path, dim: int, records) -> int:
    """Stream (paper_id, vector) pairs into an embedding file; returns count."""
    count = 0
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", dim))
        for paper_id, vector in records:
            vec = np.asarray(vector, dtype="<f4")
            if vec.shape != (dim,):
                raise ValueError(f"{paper_id}: expected {dim} values, got {vec.shape}")
            encoded = paper_id.encode("utf-8")
            fh.write(struct.pack("<H", len(encoded)))
            fh.write(encoded)
            fh.write(vec.tobytes())
            count += 1
    return count


def read_corpus_texts(path: str | Path) -> list[tuple[str, str]]:
    """(paper_id, title + ' ' + abstract) for every record in a corpus file."""
    out = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            try:
                rec = json.loads(raw)
                text = f"{rec['title']} {rec.get('abstract', '')}".strip()
                out.append((str(rec["id"]), text))
            except (json.JSONDecodeError, KeyError) as exc:
                raise ValueError(f"{path}:{line_no}: bad corpus record ({exc})") from exc
    return out


def read_labeled_set(path: str | Path) -> dict[str, int]:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"missing labeled-set file {path}")
    labels = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            if not raw.strip():
                continue
            paper_id, label, _source = raw.rstrip("\n").split("\t")
            labels[paper_id] = int(label)
    if not labels:
        raise ValueError(f"{path}: no labeled entries")
    return labels


def write_probabilities(path: str | Path, probs: dict[str, float]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for paper_id, p in probs.items():
            fh.write(f"{paper_id}\t{p!r}\n")
