"""Optional transformer fine-tuning on the pipeline's labeled sets.

Trains a two-class sequence classifier on the exported train split,
monitors loss on the validation split, and writes class-1 probabilities
for every paper in the corpus. No metrics are computed here: evaluation
is the main package's job, keeping one source of truth for scores.
"""

from __future__ import annotations

from dataclasses import dataclass

from .emb_format import read_corpus_texts, read_labeled_set, write_probabilities

DEFAULT_MODEL = "roberta-large"


@dataclass
class FinetuneJob:
    train_path: str
    val_path: str
    corpus_path: str
    out_path: str
    model: str = DEFAULT_MODEL
    epochs: int = 1
    batch_size: int = 8
    learning_rate: float = 2e-5
    max_length: int = 128
    seed: int = 0


def finetune_classifier(job: FinetuneJob) -> dict[str, float]:
    """Fine-tune, then write per-paper probabilities; returns the dict too."""
    import torch
    from transformers import AutoModelForSequenceClassification, AutoTokenizer

    train_labels = read_labeled_set(job.train_path)
    val_labels = read_labeled_set(job.val_path)
    texts = dict(read_corpus_texts(job.corpus_path))
    for paper_id in list(train_labels) + list(val_labels):
        if paper_id not in texts:
            raise ValueError(f"labeled paper {paper_id} not in corpus")

    torch.manual_seed(job.seed)
    try:
        tokenizer = AutoTokenizer.from_pretrained(job.model)
        model = AutoModelForSequenceClassification.from_pretrained(job.model, num_labels=2)
    except Exception as exc:
        raise RuntimeError(f"cannot load classifier model {job.model!r}: {exc}") from exc
    device = "cuda" if torch.cuda.is_available() else "cpu"
    try:
        model.to(device)
    except RuntimeError as exc:
        raise RuntimeError(f"insufficient hardware for {job.model!r}: {exc}") from exc

    def batches(ids, labels=None, shuffle_generator=None):
        order = list(range(len(ids)))
        if shuffle_generator is not None:
            order = torch.randperm(len(ids), generator=shuffle_generator).tolist()
        for start in range(0, len(order), job.batch_size):
            chunk = [ids[i] for i in order[start : start + job.batch_size]]
            encoded = tokenizer(
                [texts[pid] for pid in chunk],
                return_tensors="pt",
                padding=True,
                truncation=True,
                max_length=job.max_length,
            ).to(device)
            if labels is None:
                yield chunk, encoded, None
            else:
                target = torch.tensor([labels[pid] for pid in chunk], device=device)
                yield chunk, encoded, target

    optimizer = torch.optim.AdamW(model.parameters(), lr=job.learning_rate)
    loss_fn = torch.nn.CrossEntropyLoss()
    generator = torch.Generator().manual_seed(job.seed)
    train_ids = sorted(train_labels)
    val_ids = sorted(val_labels)

    for epoch in range(job.epochs):
        model.train()
        total = 0.0
        for _, encoded, target in batches(train_ids, train_labels, generator):
            optimizer.zero_grad()
            out = model(**encoded)
            loss = loss_fn(out.logits, target)
            loss.backward()
            optimizer.step()
            total += loss.item() * len(target)
        model.eval()
        with torch.no_grad():
            val_loss = sum(
                loss_fn(model(**encoded).logits, target).item() * len(target)
                for _, encoded, target in batches(val_ids, val_labels)
            )
        print(
            f"epoch {epoch + 1}/{job.epochs}: "
            f"train loss {total / len(train_ids):.4f}, "
            f"val loss {val_loss / len(val_ids):.4f}"
        )

    model.eval()
    probs: dict[str, float] = {}
    all_ids = sorted(texts)
    with torch.no_grad():
        for chunk, encoded, _ in batches(all_ids):
            p = torch.softmax(model(**encoded).logits, dim=-1)[:, 1]
            for paper_id, value in zip(chunk, p):
                probs[paper_id] = float(value)
    write_probabilities(job.out_path, probs)
    return probs
