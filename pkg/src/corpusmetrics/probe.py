"""Binary classifier probes on embeddings, evaluation metrics, and fusion.

The probe is a single-logit logistic head trained by full-batch gradient
descent on frozen embedding vectors. Two probability streams (journal-based
and author-based training data) are fused by averaging; cutoffs are picked
by exhaustive F1 search.

Classification rule everywhere: positive iff probability strictly exceeds
the cutoff.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .embeddings import EmbeddingMatrix
from .labeling import LabeledSet


@dataclass
class ProbeHyper:
    learning_rate: float = 2.0
    epochs: int = 500
    l2: float = 1e-4
    seed: int = 0


@dataclass
class ProbeModel:
    weights: np.ndarray
    bias: float
    hyper: ProbeHyper
    final_loss: float
    validation_accuracy: float | None = None
    loss_trace: list[float] = field(default_factory=list, repr=False)

    def __post_init__(self):
        if not np.all(np.isfinite(self.weights)) or not np.isfinite(self.bias):
            raise ValueError("non-finite parameters")

    @property
    def dim(self) -> int:
        return self.weights.shape[0]

    def save(self, path: str | Path) -> None:
        h = self.hyper
        lines = [
            f"dim {self.dim}",
            f"learning_rate {h.learning_rate!r}",
            f"epochs {h.epochs}",
            f"l2 {h.l2!r}",
            f"seed {h.seed}",
            f"final_loss {self.final_loss!r}",
            f"bias {self.bias!r}",
            "weights",
        ]
        lines += [repr(float(w)) for w in self.weights]
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path: str | Path) -> "ProbeModel":
        lines = Path(path).read_text(encoding="utf-8").splitlines()
        header = {}
        for i, line in enumerate(lines):
            if line == "weights":
                weights = np.array([float(v) for v in lines[i + 1 :]])
                break
            key, value = line.split(" ", 1)
            header[key] = value
        else:
            raise ValueError(f"{path}: missing weights section")
        hyper = ProbeHyper(
            learning_rate=float(header["learning_rate"]),
            epochs=int(header["epochs"]),
            l2=float(header["l2"]),
            seed=int(header["seed"]),
        )
        if len(weights) != int(header["dim"]):
            raise ValueError(f"{path}: weight count does not match dim header")
        return cls(
            weights=weights,
            bias=float(header["bias"]),
            hyper=hyper,
            final_loss=float(header["final_loss"]),
        )


@dataclass
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


@dataclass
class FusedPrediction:
    """Per-paper probabilities of the two streams and their average."""

    journal_prob: dict[str, float]
    author_prob: dict[str, float]
    fused_prob: dict[str, float] = field(default_factory=dict)
    cutoff: float = 0.5

    def __post_init__(self):
        if not self.fused_prob:
            self.fused_prob = {
                pid: fuse(self.journal_prob[pid], self.author_prob[pid])
                for pid in self.journal_prob
            }


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _mean_ce_loss(x, y, w, b, l2):
    p = np.clip(_sigmoid(x @ w + b), 1e-12, 1.0 - 1e-12)
    ce = -np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))
    return float(ce + 0.5 * l2 * np.dot(w, w))


def train_probe(
    train: LabeledSet,
    validation: LabeledSet,
    emb: EmbeddingMatrix,
    hyper: ProbeHyper | None = None,
) -> ProbeModel:
    """Fit the logistic probe by full-batch gradient descent.

    Parameters start at zero; a step that would increase the penalized loss
    is retried at half the learning rate, so the recorded loss sequence is
    non-increasing and the whole procedure is deterministic.
    """
    hyper = hyper or ProbeHyper()
    if len({lab for _, lab in train.entries}) < 2:
        raise ValueError("single-class training set")
    missing = [pid for pid, _ in train.entries + validation.entries if pid not in emb]
    if missing:
        raise ValueError(f"missing embeddings for {missing[:5]}")

    ids = [pid for pid, _ in train.entries]
    x = emb.matrix(ids)
    y = np.array([lab for _, lab in train.entries], dtype=np.float64)
    n, dim = x.shape

    w = np.zeros(dim)
    b = 0.0
    lr = hyper.learning_rate
    loss = _mean_ce_loss(x, y, w, b, hyper.l2)
    trace = [loss]
    for _ in range(hyper.epochs):
        p = _sigmoid(x @ w + b)
        err = p - y
        grad_w = x.T @ err / n + hyper.l2 * w
        grad_b = float(err.mean())
        while True:
            w_new = w - lr * grad_w
            b_new = b - lr * grad_b
            loss_new = _mean_ce_loss(x, y, w_new, b_new, hyper.l2)
            if loss_new <= loss or lr < 1e-12:
                break
            lr *= 0.5
        w, b, loss = w_new, b_new, loss_new
        trace.append(loss)

    model = ProbeModel(weights=w, bias=b, hyper=hyper, final_loss=loss, loss_trace=trace)
    if validation.entries:
        val_probs = [predict_proba(model, emb.get(pid)) for pid, _ in validation.entries]
        val_y = [lab for _, lab in validation.entries]
        correct = sum((p > 0.5) == bool(lab) for p, lab in zip(val_probs, val_y))
        model.validation_accuracy = correct / len(val_y)
    return model


def predict_proba(model: ProbeModel, v: np.ndarray) -> float:
    v = np.asarray(v, dtype=np.float64)
    if v.shape != (model.dim,):
        raise ValueError(f"dimension mismatch: expected {model.dim}, got {v.shape}")
    return float(_sigmoid(np.atleast_1d(v @ model.weights + model.bias))[0])


def predict_corpus(model: ProbeModel, emb: EmbeddingMatrix, ids: Sequence[str]) -> dict[str, float]:
    x = emb.matrix(list(ids))
    probs = _sigmoid(x @ model.weights + model.bias)
    return {pid: float(p) for pid, p in zip(ids, probs)}


def fuse(p_journal: float, p_author: float) -> float:
    """Average the two probability streams."""
    for p in (p_journal, p_author):
        if not 0.0 <= p <= 1.0:
            raise ValueError(f"probability out of range: {p}")
    return (p_journal + p_author) / 2.0


def confusion(labels: Sequence[int], probs: Sequence[float], cutoff: float) -> ConfusionCounts:
    if len(labels) != len(probs):
        raise ValueError("labels and probabilities not aligned")
    if len(labels) == 0:
        raise ValueError("empty evaluation set")
    if not 0.0 <= cutoff <= 1.0:
        raise ValueError(f"cutoff out of range: {cutoff}")
    tp = fp = tn = fn = 0
    for lab, p in zip(labels, probs):
        predicted = p > cutoff
        if predicted and lab == 1:
            tp += 1
        elif predicted:
            fp += 1
        elif lab == 1:
            fn += 1
        else:
            tn += 1
    return ConfusionCounts(tp=tp, fp=fp, tn=tn, fn=fn)


def metrics(c: ConfusionCounts) -> dict[str, float | None]:
    """Sensitivity, specificity and F1; undefined ratios come back as None."""
    sens = c.tp / (c.tp + c.fn) if c.tp + c.fn > 0 else None
    spec = c.tn / (c.tn + c.fp) if c.tn + c.fp > 0 else None
    denom = 2 * c.tp + c.fp + c.fn
    f1 = 2 * c.tp / denom if denom > 0 else None
    return {"sensitivity": sens, "specificity": spec, "f1": f1}


def _cutoff_sweep(labels, probs, grid_step):
    """Candidate cutoffs with TP/FP counts under the strict ``p > c`` rule.

    Candidates are the grid points augmented with the observed probabilities;
    classification only changes at observed values, so sweeping this set is
    an exact search.
    """
    if not 0.0 < grid_step <= 0.5:
        raise ValueError(f"grid step out of range: {grid_step}")
    if len(set(labels)) < 2:
        raise ValueError("degenerate label set")
    n_steps = int(round(1.0 / grid_step))
    grid = np.arange(n_steps + 1) * grid_step
    candidates = np.unique(np.concatenate([grid, np.asarray(probs, dtype=np.float64)]))
    order = np.argsort(probs, kind="stable")
    sorted_probs = np.asarray(probs, dtype=np.float64)[order]
    sorted_labels = np.asarray(labels)[order]
    pos_cum = np.concatenate([[0], np.cumsum(sorted_labels == 1)])
    n = len(sorted_probs)
    n_pos = int(pos_cum[-1])
    below = np.searchsorted(sorted_probs, candidates, side="right")
    tp = n_pos - pos_cum[below]
    predicted_pos = n - below
    fp = predicted_pos - tp
    return candidates, tp, fp, n_pos, n - n_pos


def threshold_search(
    labels: Sequence[int], probs: Sequence[float], grid_step: float = 0.001
) -> tuple[float, float]:
    """Cutoff maximizing F1; ties resolve to the smallest cutoff."""
    candidates, tp, fp, n_pos, _ = _cutoff_sweep(labels, probs, grid_step)
    fn = n_pos - tp
    denom = 2 * tp + fp + fn
    f1 = np.where(denom > 0, 2 * tp / np.maximum(denom, 1), -1.0)
    best = int(np.argmax(f1))  # first max = smallest cutoff
    return float(candidates[best]), float(f1[best])


def threshold_search_youden(
    labels: Sequence[int], probs: Sequence[float], grid_step: float = 0.001
) -> tuple[float, float]:
    """Alternative cutoff search maximizing Youden's J (sens + spec - 1)."""
    candidates, tp, fp, n_pos, n_neg = _cutoff_sweep(labels, probs, grid_step)
    j = tp / n_pos - fp / n_neg
    best = int(np.argmax(j))
    return float(candidates[best]), float(j[best])


def roc_curve(
    labels: Sequence[int], probs: Sequence[float]
) -> list[tuple[float, float, float]]:
    """(false positive rate, true positive rate, cutoff) sweep.

    Each point reports the rates of the rule "positive iff prob > cutoff";
    the curve starts at (0, 0) and ends at (1, 1).
    """
    n_pos = sum(1 for lab in labels if lab == 1)
    n_neg = len(labels) - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("degenerate label set")
    order = sorted(range(len(labels)), key=lambda i: -probs[i])
    points = [(0.0, 0.0, float(max(probs)))]
    tp = fp = 0
    idx = 0
    while idx < len(order):
        # consume all ties at this probability before emitting a point
        p_here = probs[order[idx]]
        while idx < len(order) and probs[order[idx]] == p_here:
            if labels[order[idx]] == 1:
                tp += 1
            else:
                fp += 1
            idx += 1
        cutoff = probs[order[idx]] if idx < len(order) else -np.inf
        points.append((fp / n_neg, tp / n_pos, float(cutoff)))
    return points


def auc(points: list[tuple[float, float, float]]) -> float:
    """Trapezoidal area under a ROC point list."""
    area = 0.0
    for (f0, t0, _), (f1, t1, _) in zip(points, points[1:]):
        area += (f1 - f0) * (t0 + t1) / 2.0
    return area


# ---------------------------------------------------------------------------
# Fusion report (three evaluation samples x three criteria streams)
# ---------------------------------------------------------------------------


@dataclass
class FusionReport:
    """Aligned-text performance table for the two streams and their average.

    Rows are classification criteria (p_J = journal-stream probability,
    p_A = author-stream probability, p_C = their average, each compared
    against a cutoff); columns are sensitivity/specificity/F1 on the
    journal-based, author-based, and combined samples.
    """

    rows: list[tuple[str, list[dict[str, float | None]]]]
    sample_sizes: tuple[int, int, int]

    def to_text(self) -> str:
        names = ("journal sample", "author sample", "combined")
        widths = 13
        out = ["classifier fusion performance", ""]
        out.append("legend: p_J journal stream, p_A author stream, p_C average of the two")
        out.append("")
        header1 = f"{'':<14}"
        for name, n in zip(names, self.sample_sizes):
            header1 += f"{name + f' (n={n})':^{3 * widths}}"
        out.append(header1.rstrip())
        header2 = f"{'criterion':<14}"
        for _ in names:
            for col in ("sensitivity", "specificity", "F1"):
                header2 += f"{col:>{widths}}"
        out.append(header2)
        out.append("-" * len(header2))
        for label, blocks in self.rows:
            line = f"{label:<14}"
            for block in blocks:
                for key in ("sensitivity", "specificity", "f1"):
                    value = block[key]
                    cell = "--" if value is None else f"{value:.3f}"
                    line += f"{cell:>{widths}}"
            out.append(line)
        return "\n".join(out) + "\n"


def fusion_report(
    journal_set: LabeledSet,
    author_set: LabeledSet,
    predictions: FusedPrediction,
    grid_step: float = 0.001,
) -> FusionReport:
    """Evaluate plain and optimized cutoffs for both streams and the average.

    Optimized cutoffs maximize F1 on the combined sample (the union of both
    labeled sets), the criterion used to pick the deployed classifier.
    """
    samples = {
        "journal": journal_set.labels(),
        "author": author_set.labels(),
    }
    samples["combined"] = {**samples["journal"], **samples["author"]}
    streams = {
        "p_J": predictions.journal_prob,
        "p_A": predictions.author_prob,
        "p_C": predictions.fused_prob,
    }

    combined = samples["combined"]
    combined_ids = sorted(combined)
    rows = []
    for stream_name, probs in streams.items():
        labels_vec = [combined[pid] for pid in combined_ids]
        probs_vec = [probs[pid] for pid in combined_ids]
        best_cutoff, _ = threshold_search(labels_vec, probs_vec, grid_step)
        cutoffs = [0.5, best_cutoff] if stream_name != "p_C" else [best_cutoff]
        for cutoff in cutoffs:
            blocks = []
            for sample_name in ("journal", "author", "combined"):
                sample = samples[sample_name]
                ids = sorted(sample)
                c = confusion([sample[i] for i in ids], [probs[i] for i in ids], cutoff)
                blocks.append(metrics(c))
            rows.append((f"{stream_name}>{cutoff:.3f}", blocks))
    return FusionReport(
        rows=rows,
        sample_sizes=(len(samples["journal"]), len(samples["author"]), len(samples["combined"])),
    )
