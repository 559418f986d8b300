from __future__ import annotations

import numpy as np
import pytest

from corpusmetrics.corpus import save_corpus
from corpusmetrics.synthdata import (
    COMMON_VOCAB,
    ECON_VOCAB,
    ERA_VOCAB,
    HEALTH_VOCAB,
    make_synthetic_corpus,
)

FULL_VOCAB = sorted(
    set(HEALTH_VOCAB) | set(ECON_VOCAB) | set(COMMON_VOCAB)
    | {tok for toks in ERA_VOCAB.values() for tok in toks}
)


@pytest.fixture(scope="session")
def corpus_files(tmp_path_factory):
    root = tmp_path_factory.mktemp("corpus")
    corpus = make_synthetic_corpus(60, seed=5)
    save_corpus(corpus, root / "corpus.jsonl", root / "registry.jsonl")
    return {"corpus": root / "corpus.jsonl", "registry": root / "registry.jsonl",
            "object": corpus}


@pytest.fixture(scope="session")
def sentence_model_dir(tmp_path_factory):
    """A tiny word-embedding SentenceTransformer saved to disk (no downloads)."""
    from sentence_transformers import SentenceTransformer, models
    from sentence_transformers.models.tokenizer import WhitespaceTokenizer

    rng = np.random.default_rng(99)
    weights = rng.normal(size=(len(FULL_VOCAB), 16)).astype(np.float32)
    tokenizer = WhitespaceTokenizer(vocab=FULL_VOCAB, stop_words=[], do_lower_case=True)
    word = models.WordEmbeddings(
        tokenizer=tokenizer, embedding_weights=weights, update_embeddings=False
    )
    pooling = models.Pooling(16, pooling_mode_mean_tokens=True)
    model = SentenceTransformer(modules=[word, pooling])
    path = tmp_path_factory.mktemp("models") / "tiny-sentence"
    model.save(str(path))
    return path


@pytest.fixture(scope="session")
def classifier_model_dir(tmp_path_factory):
    """A tiny randomly initialized BERT classifier saved to disk."""
    import torch
    from transformers import BertConfig, BertForSequenceClassification, BertTokenizer

    path = tmp_path_factory.mktemp("models") / "tiny-classifier"
    path.mkdir(parents=True)
    vocab = ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"] + FULL_VOCAB
    vocab_file = path / "vocab.txt"
    vocab_file.write_text("\n".join(vocab) + "\n")
    torch.manual_seed(1)
    config = BertConfig(
        vocab_size=len(vocab), hidden_size=32, num_hidden_layers=2,
        num_attention_heads=2, intermediate_size=64,
        max_position_embeddings=128, num_labels=2,
    )
    BertForSequenceClassification(config).save_pretrained(path)
    BertTokenizer(vocab=str(vocab_file), do_lower_case=True).save_pretrained(path)
    return path
