"""Embedding sidecar for the corpus metrics pipeline.

Produces real sentence embeddings (and optional fine-tuned classifier
probabilities) in the pipeline's interchange formats; all communication
with the main package happens through those files.
"""

from .embed import EmbedJob, embed_corpus
from .emb_format import read_corpus_texts, read_labeled_set, write_embeddings, write_probabilities
from .finetune import FinetuneJob, finetune_classifier

__version__ = "0.1.0"

__all__ = [
    "EmbedJob",
    "embed_corpus",
    "FinetuneJob",
    "finetune_classifier",
    "read_corpus_texts",
    "read_labeled_set",
    "write_embeddings",
    "write_probabilities",
]
