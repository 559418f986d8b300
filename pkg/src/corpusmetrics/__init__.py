"""Corpus scientometrics toolkit.

Classifies publications into a target field with fused embedding probes and
scores each paper's novelty, impact, and quality from temporal embedding
similarity, then runs the downstream citation regressions, annual series,
and 2-D corpus maps.
"""

from .corpus import (
    Corpus,
    CorpusStats,
    Journal,
    JournalCategory,
    Paper,
    corpus_stats,
    default_registry,
    load_corpus,
    save_corpus,
)
from .embeddings import (
    EmbeddingMatrix,
    cosine_similarity,
    embed_corpus_synthetic,
    load_embeddings,
    save_embeddings,
    synthetic_embed,
    window_mean,
)
from .labeling import (
    AuthorLabel,
    AuthorLabelMap,
    LabeledSet,
    LabelSource,
    classify_authors,
    label_author_based,
    label_journal_based,
    split_dataset,
)
from .probe import (
    ConfusionCounts,
    FusedPrediction,
    ProbeHyper,
    ProbeModel,
    confusion,
    fuse,
    fusion_report,
    metrics,
    predict_proba,
    roc_curve,
    threshold_search,
    train_probe,
)
from .scores import (
    PaperScores,
    backward_similarity,
    compute_scores,
    contemporaneous_similarity,
    decompose_in_quality_sd,
    forward_similarity,
    standardize,
)

__version__ = "0.1.0"

__all__ = [
    "Corpus",
    "CorpusStats",
    "Journal",
    "JournalCategory",
    "Paper",
    "corpus_stats",
    "default_registry",
    "load_corpus",
    "save_corpus",
    "EmbeddingMatrix",
    "cosine_similarity",
    "embed_corpus_synthetic",
    "load_embeddings",
    "save_embeddings",
    "synthetic_embed",
    "window_mean",
    "AuthorLabel",
    "AuthorLabelMap",
    "LabeledSet",
    "LabelSource",
    "classify_authors",
    "label_author_based",
    "label_journal_based",
    "split_dataset",
    "ConfusionCounts",
    "FusedPrediction",
    "ProbeHyper",
    "ProbeModel",
    "confusion",
    "fuse",
    "fusion_report",
    "metrics",
    "predict_proba",
    "roc_curve",
    "threshold_search",
    "train_probe",
    "PaperScores",
    "backward_similarity",
    "compute_scores",
    "contemporaneous_similarity",
    "decompose_in_quality_sd",
    "forward_similarity",
    "standardize",
]
