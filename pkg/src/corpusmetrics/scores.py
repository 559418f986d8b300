"""Temporal similarity scores: backward/forward/contemporaneous, then
quality, novelty, and impact.

For each paper the embedding is compared (cosine) against the mean
embedding of papers published in a relative year window: backward
(-5..-1), forward (+1..+5), contemporaneous (same year, self excluded).
Quality is forward minus backward similarity, novelty contemporaneous
minus backward, impact forward minus contemporaneous, so quality always
decomposes exactly into novelty plus impact.

Edge policy: under ``drop`` (default) a paper whose backward or forward
window sticks out of the corpus year span gets a missing value rather
than a shortened window; under ``shorten`` any non-empty window counts.
Missing values propagate into the derived scores and are exported as
empty fields.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .corpus import Corpus
from .embeddings import EmbeddingMatrix, cosine_similarity, window_mean

BACKWARD_WINDOW = (-5, -1)
FORWARD_WINDOW = (1, 5)
SAME_YEAR_WINDOW = (0, 0)

EDGE_POLICIES = ("drop", "shorten")


@dataclass
class ScoreRecord:
    year: int
    backward: float | None = None
    forward: float | None = None
    contemporaneous: float | None = None
    quality: float | None = None
    novelty: float | None = None
    impact: float | None = None


@dataclass
class PaperScores:
    records: dict[str, ScoreRecord] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.records)

    def column(self, name: str) -> dict[str, float | None]:
        return {pid: getattr(rec, name) for pid, rec in self.records.items()}

    def complete_ids(self) -> list[str]:
        return [
            pid
            for pid, r in self.records.items()
            if r.quality is not None and r.novelty is not None and r.impact is not None
        ]

    def save(self, path: str | Path) -> None:
        cols = ("backward", "forward", "contemporaneous", "quality", "novelty", "impact")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("paper_id\tyear\t" + "\t".join(cols) + "\n")
            for pid, rec in self.records.items():
                cells = [pid, str(rec.year)]
                cells += ["" if getattr(rec, c) is None else repr(getattr(rec, c)) for c in cols]
                fh.write("\t".join(cells) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "PaperScores":
        records = {}
        with open(path, encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n").split("\t")
            cols = header[2:]
            for raw in fh:
                cells = raw.rstrip("\n").split("\t")
                rec = ScoreRecord(year=int(cells[1]))
                for name, cell in zip(cols, cells[2:]):
                    setattr(rec, name, float(cell) if cell else None)
                records[cells[0]] = rec
        return cls(records=records)


class _YearSums:
    """Per-year embedding sums, shared across all window queries."""

    def __init__(self, corpus: Corpus, emb: EmbeddingMatrix):
        self.sums: dict[int, np.ndarray] = {}
        self.counts: dict[int, int] = {}
        for year, ids in corpus.by_year.items():
            total = np.zeros(emb.dim, dtype=np.float64)
            count = 0
            for pid in ids:
                if pid in emb:
                    total += emb.vectors[pid]
                    count += 1
            self.sums[year] = total
            self.counts[year] = count

    def window(self, center_year: int, a: int, b: int, exclude: np.ndarray | None):
        total = np.zeros(len(next(iter(self.sums.values()))), dtype=np.float64)
        count = 0
        for year in range(center_year + a, center_year + b + 1):
            if year in self.sums:
                total += self.sums[year]
                count += self.counts[year]
        if exclude is not None:
            total = total - exclude
            count -= 1
        if count <= 0:
            return None
        return total / count


def _window_similarity(vec, sums, year, window, span, policy):
    a, b = window
    if policy == "drop" and (year + a < span[0] or year + b > span[1]):
        return None
    include_self = a <= 0 <= b
    mean = sums.window(year, a, b, exclude=vec if include_self else None)
    if mean is None:
        return None
    norm_v = math.sqrt(float(vec @ vec))
    norm_m = math.sqrt(float(mean @ mean))
    if norm_v == 0.0 or norm_m == 0.0:
        return None
    return float(vec @ mean) / (norm_v * norm_m)


def compute_scores(
    corpus: Corpus,
    emb: EmbeddingMatrix,
    backward_window: tuple[int, int] = BACKWARD_WINDOW,
    forward_window: tuple[int, int] = FORWARD_WINDOW,
    edge_policy: str = "drop",
    threads: int = 1,
) -> PaperScores:
    """Score every embedded paper against its temporal neighbourhoods."""
    if edge_policy not in EDGE_POLICIES:
        raise ValueError(f"edge policy must be one of {EDGE_POLICIES}")
    for window in (backward_window, forward_window):
        if window[0] > window[1]:
            raise ValueError(f"invalid window {window}")
    sums = _YearSums(corpus, emb)
    span = corpus.year_span()

    def score_one(pid: str) -> tuple[str, ScoreRecord]:
        paper = corpus.papers[pid]
        vec = emb.vectors[pid].astype(np.float64)
        rec = ScoreRecord(year=paper.year)
        rec.backward = _window_similarity(
            vec, sums, paper.year, backward_window, span, edge_policy
        )
        rec.forward = _window_similarity(
            vec, sums, paper.year, forward_window, span, edge_policy
        )
        rec.contemporaneous = _window_similarity(
            vec, sums, paper.year, SAME_YEAR_WINDOW, span, edge_policy
        )
        if rec.backward is not None and rec.forward is not None:
            rec.quality = rec.forward - rec.backward
        if rec.backward is not None and rec.contemporaneous is not None:
            rec.novelty = rec.contemporaneous - rec.backward
        if rec.forward is not None and rec.contemporaneous is not None:
            rec.impact = rec.forward - rec.contemporaneous
        return pid, rec

    ids = [pid for pid in corpus.papers if pid in emb]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(score_one, ids))
    else:
        results = [score_one(pid) for pid in ids]
    return PaperScores(records=dict(results))


def _window_inside_span(corpus: Corpus, year: int, window: tuple[int, int]) -> bool:
    lo, hi = corpus.year_span()
    return year + window[0] >= lo and year + window[1] <= hi


def _similarity_to_window(
    corpus: Corpus,
    emb: EmbeddingMatrix,
    paper_id: str,
    window: tuple[int, int],
    edge_policy: str,
) -> float | None:
    if edge_policy not in EDGE_POLICIES:
        raise ValueError(f"edge policy must be one of {EDGE_POLICIES}")
    year = corpus.papers[paper_id].year
    if edge_policy == "drop" and not _window_inside_span(corpus, year, window):
        return None
    mean = window_mean(corpus, emb, paper_id, *window)
    if mean is None:
        return None
    return cosine_similarity(emb.get(paper_id), mean)


def backward_similarity(
    corpus: Corpus,
    emb: EmbeddingMatrix,
    paper_id: str,
    window: tuple[int, int] = BACKWARD_WINDOW,
    edge_policy: str = "drop",
) -> float | None:
    """Similarity to the mean embedding of the preceding-years window."""
    return _similarity_to_window(corpus, emb, paper_id, window, edge_policy)


def forward_similarity(
    corpus: Corpus,
    emb: EmbeddingMatrix,
    paper_id: str,
    window: tuple[int, int] = FORWARD_WINDOW,
    edge_policy: str = "drop",
) -> float | None:
    """Similarity to the mean embedding of the following-years window."""
    return _similarity_to_window(corpus, emb, paper_id, window, edge_policy)


def contemporaneous_similarity(
    corpus: Corpus,
    emb: EmbeddingMatrix,
    paper_id: str,
    edge_policy: str = "drop",
) -> float | None:
    """Similarity to the mean embedding of same-year papers (self excluded)."""
    return _similarity_to_window(corpus, emb, paper_id, SAME_YEAR_WINDOW, edge_policy)


def quality(scores: PaperScores, paper_id: str) -> float | None:
    return scores.records[paper_id].quality


def novelty(scores: PaperScores, paper_id: str) -> float | None:
    return scores.records[paper_id].novelty


def impact(scores: PaperScores, paper_id: str) -> float | None:
    return scores.records[paper_id].impact


def standardize(values: list[float | None]) -> list[float | None]:
    """Center to mean 0 and scale to sample standard deviation 1.

    Missing entries are excluded from the moments and stay missing.
    """
    present = np.array([v for v in values if v is not None], dtype=np.float64)
    if len(present) < 2:
        raise ValueError("need at least 2 non-missing values")
    mean = present.mean()
    sd = present.std(ddof=1)
    if sd == 0.0:
        raise ValueError("zero variance")
    return [None if v is None else (v - mean) / sd for v in values]


def quality_sd(scores: PaperScores) -> float:
    q = np.array([v for v in scores.column("quality").values() if v is not None])
    if len(q) < 2:
        raise ValueError("need at least 2 quality values")
    sd = q.std(ddof=1)
    if sd == 0.0:
        raise ValueError("zero variance of quality")
    return float(sd)


def decompose_in_quality_sd(scores: PaperScores) -> dict[str, tuple[float, float]]:
    """Novelty and impact rescaled by the quality standard deviation.

    With this scaling, averaging the two components over any subset of
    papers reproduces that subset's average quality in quality-SD units,
    so annual decompositions add up.
    """
    sd = quality_sd(scores)
    out = {}
    for pid in scores.complete_ids():
        rec = scores.records[pid]
        out[pid] = (rec.novelty / sd, rec.impact / sd)
    return out
