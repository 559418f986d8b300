"""Two-dimensional corpus map: PCA, exact t-SNE, Ward clustering, and the
modal-journal cluster merge.

The heavy inner loops (pairwise affinities with per-point perplexity
bisection, per-iteration gradient) live in :mod:`corpusmetrics.kernels`,
which picks the compiled extension when available.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from scipy.cluster.hierarchy import fcluster, linkage

from . import kernels, svg
from .corpus import Corpus
from .embeddings import EmbeddingMatrix

PERPLEXITY_TOL = 1e-4
EARLY_EXAGGERATION = 12.0
EXAGGERATION_ITERS = 250
INITIAL_MOMENTUM = 0.5
FINAL_MOMENTUM = 0.8
MIN_GAIN = 0.01


@dataclass
class Projection:
    """Dimensionality-reduction output, filled in stages.

    ``pca`` populates scores/components/explained variance; running the
    planar reduction adds 2-D coordinates, the KL trace, and the perplexity
    calibration residuals.
    """

    ids: list[str]
    scores: np.ndarray
    components: np.ndarray
    explained_variance_ratio: np.ndarray
    coords: np.ndarray | None = None
    kl_trace: list[float] = field(default_factory=list)
    perplexity_residuals: np.ndarray | None = None
    tsne_perplexity: float | None = None
    tsne_iterations: int | None = None
    tsne_seed: int | None = None

    @property
    def final_kl(self) -> float | None:
        return self.kl_trace[-1] if self.kl_trace else None


def pca(emb: EmbeddingMatrix | np.ndarray, k: int, ids: list[str] | None = None) -> Projection:
    """Project onto the top-k eigenvectors of the covariance matrix."""
    if isinstance(emb, EmbeddingMatrix):
        ids = ids or emb.ids()
        data = emb.matrix(ids)
    else:
        data = np.asarray(emb, dtype=np.float64)
        ids = ids or [str(i) for i in range(data.shape[0])]
    n, d = data.shape
    if n < 2:
        raise ValueError("need at least 2 points")
    if k > min(n - 1, d):
        raise ValueError(f"k={k} exceeds min(n-1, d)={min(n - 1, d)}")
    centered = data - data.mean(axis=0)
    if not np.any(centered):
        raise ValueError("degenerate data: all points identical")
    cov = centered.T @ centered / (n - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    eigvals = np.maximum(eigvals[order], 0.0)
    components = eigvecs[:, order[:k]].T
    # sign convention: largest-magnitude entry of each component positive
    for row in components:
        pivot = np.argmax(np.abs(row))
        if row[pivot] < 0:
            row *= -1.0
    total = eigvals.sum()
    return Projection(
        ids=list(ids),
        scores=centered @ components.T,
        components=components,
        explained_variance_ratio=eigvals[:k] / total,
    )


def tsne(
    points: np.ndarray,
    perplexity: float = 30.0,
    iterations: int = 1000,
    seed: int = 0,
    learning_rate: float | None = None,
) -> tuple[np.ndarray, list[float], np.ndarray]:
    """Exact t-SNE to 2 dimensions.

    Per-point Gaussian bandwidths are bisected until the effective number of
    neighbours matches ``perplexity`` within 1e-4. Gradient descent uses
    early exaggeration for the first iterations, momentum, and per-dimension
    gain adaptation; everything is deterministic in ``seed``.

    Returns (coordinates, KL trace including the initial layout, per-point
    perplexity residuals).
    """
    x = np.asarray(points, dtype=np.float64)
    n = x.shape[0]
    if n < 10:
        raise ValueError("need at least 10 points")
    if not perplexity < (n - 1) / 3:
        raise ValueError(f"perplexity {perplexity} infeasible for n={n}")
    if learning_rate is None:
        learning_rate = n / EARLY_EXAGGERATION

    d2 = kernels.pairwise_sq_dists(x)
    cond, residuals = kernels.gaussian_affinities(d2, perplexity, PERPLEXITY_TOL, 500)
    p = (cond + cond.T) / (2.0 * n)
    p = np.maximum(p, 1e-300)
    np.fill_diagonal(p, 0.0)

    rng = np.random.default_rng(seed)
    y = rng.normal(scale=1e-4, size=(n, 2))
    velocity = np.zeros_like(y)
    gains = np.ones_like(y)

    kl0, _ = kernels.tsne_kl_grad(p, y)
    trace = [float(kl0)]
    # a quarter of the run, capped at the standard 250 of a 1000-iteration run
    exaggeration_iters = min(EXAGGERATION_ITERS, iterations // 4)
    for it in range(iterations):
        exaggerate = it < exaggeration_iters
        p_eff = p * EARLY_EXAGGERATION if exaggerate else p
        _, grad = kernels.tsne_kl_grad(p_eff, y)
        flip = np.sign(grad) != np.sign(velocity)
        gains = np.where(flip, gains + 0.2, gains * 0.8)
        np.maximum(gains, MIN_GAIN, out=gains)
        momentum = INITIAL_MOMENTUM if exaggerate else FINAL_MOMENTUM
        velocity = momentum * velocity - learning_rate * gains * grad
        y = y + velocity
        y = y - y.mean(axis=0)
        # the trace tracks KL against the un-exaggerated affinities
        kl, _ = kernels.tsne_kl_grad(p, y)
        trace.append(float(kl))
    return y, trace, residuals


def reduce_to_plane(
    projection: Projection,
    perplexity: float = 30.0,
    iterations: int = 1000,
    seed: int = 0,
) -> Projection:
    coords, trace, residuals = tsne(projection.scores, perplexity, iterations, seed)
    projection.coords = coords
    projection.kl_trace = trace
    projection.perplexity_residuals = residuals
    projection.tsne_perplexity = perplexity
    projection.tsne_iterations = iterations
    projection.tsne_seed = seed
    return projection


def cluster(coords: np.ndarray, k: int) -> np.ndarray:
    """Ward-linkage agglomerative clustering into k groups (labels 0..k-1)."""
    coords = np.asarray(coords, dtype=np.float64)
    n = coords.shape[0]
    if n < k:
        raise ValueError(f"cannot form {k} clusters from {n} points")
    if k == n:
        return np.arange(n)
    tree = linkage(coords, method="ward")
    raw = fcluster(tree, t=k, criterion="maxclust")
    # relabel to 0..k-1 in order of first appearance for determinism
    mapping: dict[int, int] = {}
    labels = np.empty(n, dtype=int)
    for i, lab in enumerate(raw):
        labels[i] = mapping.setdefault(int(lab), len(mapping))
    return labels


@dataclass
class MergedClusters:
    labels: np.ndarray
    top_journals: dict[int, list[tuple[str, int]]]  # merged label -> top 5 journals
    modal_journal: dict[int, str]


def merge_by_top_journal(
    labels: np.ndarray, paper_ids: list[str], corpus: Corpus
) -> MergedClusters:
    """Union clusters that share a modal journal, to a fixed point.

    Reports each merged cluster's modal journal and its five most common
    journals. Ties on the modal journal break by count then journal id, so
    the merge is deterministic; iterating to a fixed point makes it
    idempotent by construction.
    """
    labels = np.asarray(labels).copy()
    while True:
        modal: dict[int, str] = {}
        for lab in np.unique(labels):
            counts: dict[str, int] = {}
            for pid, l in zip(paper_ids, labels):
                if l == lab:
                    j = corpus.papers[pid].journal_id
                    counts[j] = counts.get(j, 0) + 1
            modal[int(lab)] = min(counts, key=lambda j: (-counts[j], j))
        groups: dict[str, list[int]] = {}
        for lab, j in modal.items():
            groups.setdefault(j, []).append(lab)
        if all(len(labs) == 1 for labs in groups.values()):
            break
        remap = {}
        for labs in groups.values():
            target = min(labs)
            for lab in labs:
                remap[lab] = target
        labels = np.array([remap[int(l)] for l in labels])

    # compact to 0..m-1 in order of first appearance
    mapping: dict[int, int] = {}
    compact = np.empty(len(labels), dtype=int)
    for i, lab in enumerate(labels):
        compact[i] = mapping.setdefault(int(lab), len(mapping))

    top: dict[int, list[tuple[str, int]]] = {}
    modal_out: dict[int, str] = {}
    for lab in np.unique(compact):
        counts = {}
        for pid, l in zip(paper_ids, compact):
            if l == lab:
                j = corpus.papers[pid].journal_id
                counts[j] = counts.get(j, 0) + 1
        ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
        top[int(lab)] = ranked[:5]
        modal_out[int(lab)] = ranked[0][0]
    return MergedClusters(labels=compact, top_journals=top, modal_journal=modal_out)


def emit_scatter_svg(
    coords: np.ndarray,
    color_source: dict[str, float] | np.ndarray,
    path: str | Path,
    paper_ids: list[str] | None = None,
    title: str = "corpus map",
) -> None:
    """Write a scatter of the 2-D coordinates, colored by probability or label.

    A float-valued source is rendered on a continuous two-color ramp, an
    integer label array with a categorical palette. Identical inputs produce
    byte-identical files.
    """
    coords = np.asarray(coords, dtype=np.float64)
    if coords.size and not np.all(np.isfinite(coords)):
        raise ValueError("non-finite coordinates")
    points = [(float(x), float(y)) for x, y in coords]
    if isinstance(color_source, dict):
        if paper_ids is None:
            raise ValueError("paper_ids required with a probability map")
        values = [color_source[pid] for pid in paper_ids]
        colors = [svg.probability_color(v) for v in values]
        legend = [("prob 0.0", svg.probability_color(0.0)),
                  ("prob 0.5", svg.probability_color(0.5)),
                  ("prob 1.0", svg.probability_color(1.0))]
    else:
        arr = np.asarray(color_source)
        colors = [svg.category_color(int(v)) for v in arr]
        legend = [
            (f"cluster {int(lab)}", svg.category_color(int(lab)))
            for lab in np.unique(arr)[:12]
        ]
    svg.write_svg(svg.scatter_svg(points, colors, title, legend), path)


def save_coordinates(
    projection: Projection, labels: np.ndarray, path: str | Path
) -> None:
    coords = projection.coords
    if coords is None:
        raise ValueError("projection has no planar coordinates yet")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("paper_id\tx\ty\tcluster\n")
        for pid, (x, y), lab in zip(projection.ids, coords, labels):
            fh.write(f"{pid}\t{x!r}\t{y!r}\t{int(lab)}\n")
