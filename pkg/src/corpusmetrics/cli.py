"""Command-line pipeline driver.

Subcommands cover the pipeline end to end: ``ingest``, ``label``, ``train``,
``fuse``, ``score``, ``regress``, ``series``, ``map``, ``report`` (all of the
above in order), plus ``synth`` to generate a demo corpus. Every stage writes
its artifacts under the output directory and refreshes ``manifest.txt`` with
one ``sha256  relpath`` line per artifact.

Exit codes: 0 success, 2 configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import hashlib
import sys
from dataclasses import dataclass, fields
from pathlib import Path

import numpy as np

from . import econ, mapviz, svg
from .corpus import Corpus, corpus_stats, load_corpus, save_corpus
from .embeddings import EmbeddingMatrix, embed_corpus_synthetic, load_embeddings, save_embeddings
from .errors import ConfigError, DataError, MissingArtifactError
from .labeling import LabeledSet, classify_authors, label_author_based, label_journal_based, split_dataset
from .probe import (
    FusedPrediction,
    ProbeHyper,
    ProbeModel,
    fusion_report,
    predict_corpus,
    threshold_search,
    train_probe,
)
from .scores import EDGE_POLICIES, PaperScores, compute_scores, quality_sd, standardize
from .synthdata import make_synthetic_corpus

STAGES = ("ingest", "label", "train", "fuse", "score", "regress", "series", "map")


@dataclass
class RunConfig:
    corpus: str = ""
    registry: str = ""
    embeddings: str = ""
    out: str = "out"
    seed: int = 0
    threads: int = 1
    grid_step: float = 0.001
    edge_policy: str = "drop"
    backward_window: tuple[int, int] = (-5, -1)
    forward_window: tuple[int, int] = (1, 5)
    embed_dim: int = 64
    probe_lr: float = 2.0
    probe_epochs: int = 500
    probe_l2: float = 1e-4
    citation_norm: str = "mean"
    bins: int = 20
    pca_k: int = 50
    tsne_perplexity: float = 30.0
    tsne_iterations: int = 1000
    clusters: int = 24
    probs_journal: str = ""
    probs_author: str = ""

    def __post_init__(self):
        if self.edge_policy not in EDGE_POLICIES:
            raise ConfigError(f"edge_policy must be one of {EDGE_POLICIES}")
        if not 0.0 < self.grid_step <= 0.5:
            raise ConfigError(f"grid_step out of range: {self.grid_step}")
        for window in (self.backward_window, self.forward_window):
            if window[0] > window[1]:
                raise ConfigError(f"invalid window {window}")
        if self.threads < 1:
            raise ConfigError("threads must be >= 1")

    def out_dir(self) -> Path:
        return Path(self.out)

    def hyper(self) -> ProbeHyper:
        return ProbeHyper(
            learning_rate=self.probe_lr,
            epochs=self.probe_epochs,
            l2=self.probe_l2,
            seed=self.seed,
        )


def _parse_window(text: str) -> tuple[int, int]:
    try:
        a, b = text.split(":")
        return (int(a), int(b))
    except ValueError as exc:
        raise ConfigError(f"window must look like '-5:-1', got {text!r}") from exc


def load_config_file(path: str | Path) -> dict:
    """Flat ``key = value`` lines; '#' starts a comment."""
    values: dict = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    casts = {f.name: f.type for f in fields(RunConfig)}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{line_no}: expected key = value")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in casts:
            raise ConfigError(f"{path}:{line_no}: unknown key {key!r}")
        if key in ("backward_window", "forward_window"):
            values[key] = _parse_window(value)
        elif casts[key] in ("int", int):
            values[key] = int(value)
        elif casts[key] in ("float", float):
            values[key] = float(value)
        else:
            values[key] = value
    return values


# ---------------------------------------------------------------------------
# Artifact paths and helpers
# ---------------------------------------------------------------------------


def _artifact(cfg: RunConfig, name: str) -> Path:
    return cfg.out_dir() / name


def _require(path: Path, hint: str) -> Path:
    if not path.exists():
        raise MissingArtifactError(f"missing {path}; run the {hint} stage first")
    return path


def write_manifest(out_dir: Path) -> Path:
    entries = []
    for file in sorted(out_dir.rglob("*")):
        if file.is_file() and file.name != "manifest.txt":
            digest = hashlib.sha256(file.read_bytes()).hexdigest()
            entries.append(f"{digest}  {file.relative_to(out_dir).as_posix()}")
    manifest = out_dir / "manifest.txt"
    manifest.write_text("\n".join(entries) + "\n", encoding="utf-8")
    return manifest


def _load_corpus(cfg: RunConfig) -> Corpus:
    if not cfg.corpus or not cfg.registry:
        raise ConfigError("corpus and registry paths are required")
    return load_corpus(cfg.corpus, cfg.registry)


def _embeddings_path(cfg: RunConfig) -> Path:
    return Path(cfg.embeddings) if cfg.embeddings else _artifact(cfg, "embeddings.emb")


def _load_embeddings(cfg: RunConfig, corpus: Corpus) -> EmbeddingMatrix:
    path = _embeddings_path(cfg)
    if not path.exists():
        raise MissingArtifactError(
            f"missing embeddings file {path}; supply --embeddings or run report"
        )
    return load_embeddings(path, corpus)


def _label_sets(corpus: Corpus) -> tuple[LabeledSet, LabeledSet]:
    journal_set = label_journal_based(corpus)
    author_set = label_author_based(corpus, classify_authors(corpus))
    return journal_set, author_set


def _load_prob_file(path: Path) -> dict[str, float]:
    probs = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            if not raw.strip() or raw.startswith("#"):
                continue
            pid, value = raw.rstrip("\n").split("\t")
            probs[pid] = float(value)
    return probs


def _save_predictions(pred: FusedPrediction, path: Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# cutoff={pred.cutoff!r}\n")
        fh.write("paper_id\tp_journal\tp_author\tp_fused\n")
        for pid in pred.journal_prob:
            fh.write(
                f"{pid}\t{pred.journal_prob[pid]!r}\t{pred.author_prob[pid]!r}"
                f"\t{pred.fused_prob[pid]!r}\n"
            )


def _load_predictions(path: Path) -> FusedPrediction:
    journal, author, fused = {}, {}, {}
    cutoff = 0.5
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            if raw.startswith("# cutoff="):
                cutoff = float(raw.split("=", 1)[1])
                continue
            if not raw.strip() or raw.startswith("paper_id"):
                continue
            pid, p_j, p_a, p_c = raw.rstrip("\n").split("\t")
            journal[pid], author[pid], fused[pid] = float(p_j), float(p_a), float(p_c)
    return FusedPrediction(journal_prob=journal, author_prob=author, fused_prob=fused, cutoff=cutoff)


# ---------------------------------------------------------------------------
# Stages
# ---------------------------------------------------------------------------


def stage_ingest(cfg: RunConfig) -> None:
    corpus = _load_corpus(cfg)
    stats = corpus_stats(corpus)
    _artifact(cfg, "corpus_stats.txt").write_text(stats.to_text(), encoding="utf-8")
    print(f"ingest: {stats.total} papers, {len(corpus.registry)} journals")


def stage_label(cfg: RunConfig) -> None:
    corpus = _load_corpus(cfg)
    journal_set, author_set = _label_sets(corpus)
    authors = classify_authors(corpus)
    journal_set.save(_artifact(cfg, "labels_journal.tsv"))
    author_set.save(_artifact(cfg, "labels_author.tsv"))
    authors.save(_artifact(cfg, "author_labels.tsv"))
    print(
        f"label: journal-based {journal_set.positives()}/{len(journal_set)} positive "
        f"({len(journal_set.excluded)} excluded), author-based "
        f"{author_set.positives()}/{len(author_set)} positive "
        f"({len(author_set.excluded)} excluded)"
    )


def stage_train(cfg: RunConfig) -> None:
    corpus = _load_corpus(cfg)
    emb = _load_embeddings(cfg, corpus)
    journal_set, author_set = _label_sets(corpus)
    lines = []
    for name, labeled in (("journal", journal_set), ("author", author_set)):
        train, val, test = split_dataset(labeled, cfg.seed)
        model = train_probe(train, val, emb, cfg.hyper())
        model.save(_artifact(cfg, f"probe_{name}.txt"))
        lines.append(
            f"{name}: n_train={len(train)} n_val={len(val)} n_test={len(test)} "
            f"final_loss={model.final_loss:.6f} val_accuracy={model.validation_accuracy:.4f}"
        )
    _artifact(cfg, "train_summary.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print("train: " + "; ".join(lines))


def stage_fuse(cfg: RunConfig) -> None:
    corpus = _load_corpus(cfg)
    ids = corpus.ids()
    streams = {}
    emb = None
    for name, external in (("journal", cfg.probs_journal), ("author", cfg.probs_author)):
        if external:
            probs = _load_prob_file(Path(external))
            missing = [pid for pid in ids if pid not in probs]
            if missing:
                raise DataError(f"{external}: no probability for {missing[:5]}")
            streams[name] = {pid: probs[pid] for pid in ids}
        else:
            model_path = _require(_artifact(cfg, f"probe_{name}.txt"), "train")
            model = ProbeModel.load(model_path)
            if emb is None:
                emb = _load_embeddings(cfg, corpus)
            streams[name] = predict_corpus(model, emb, ids)

    pred = FusedPrediction(journal_prob=streams["journal"], author_prob=streams["author"])
    journal_set, author_set = _label_sets(corpus)
    union = {**journal_set.labels(), **author_set.labels()}
    union_ids = sorted(union)
    cutoff, best_f1 = threshold_search(
        [union[pid] for pid in union_ids],
        [pred.fused_prob[pid] for pid in union_ids],
        cfg.grid_step,
    )
    pred.cutoff = cutoff
    _save_predictions(pred, _artifact(cfg, "predictions.tsv"))

    report = fusion_report(journal_set, author_set, pred, cfg.grid_step)
    _artifact(cfg, "fusion_report.txt").write_text(report.to_text(), encoding="utf-8")

    edges = np.linspace(0.0, 1.0, 51)
    with open(_artifact(cfg, "prob_histogram.tsv"), "w", encoding="utf-8") as fh:
        fh.write("bin_low\tbin_high\tcount_journal\tcount_author\tcount_fused\n")
        hists = [
            np.histogram([stream[pid] for pid in ids], bins=edges)[0]
            for stream in (pred.journal_prob, pred.author_prob, pred.fused_prob)
        ]
        for i in range(50):
            fh.write(
                f"{edges[i]:.2f}\t{edges[i + 1]:.2f}\t"
                f"{hists[0][i]}\t{hists[1][i]}\t{hists[2][i]}\n"
            )
    print(f"fuse: cutoff={cutoff:.3f} global F1={best_f1:.4f}")


def stage_score(cfg: RunConfig) -> None:
    corpus = _load_corpus(cfg)
    emb = _load_embeddings(cfg, corpus)
    scores = compute_scores(
        corpus,
        emb,
        backward_window=cfg.backward_window,
        forward_window=cfg.forward_window,
        edge_policy=cfg.edge_policy,
        threads=cfg.threads,
    )
    scores.save(_artifact(cfg, "scores.tsv"))
    complete = len(scores.complete_ids())
    summary = (
        f"papers scored: {len(scores)}\n"
        f"complete (quality, novelty, impact all present): {complete}\n"
        f"dropped by {cfg.edge_policy} edge policy or empty windows: {len(scores) - complete}\n"
    )
    _artifact(cfg, "scores_summary.txt").write_text(summary, encoding="utf-8")
    print(f"score: {complete}/{len(scores)} papers with complete scores")


def _health_indicator(pred: FusedPrediction) -> dict[str, int]:
    return {pid: int(p > pred.cutoff) for pid, p in pred.fused_prob.items()}


def stage_regress(cfg: RunConfig) -> None:
    corpus = _load_corpus(cfg)
    scores = PaperScores.load(_require(_artifact(cfg, "scores.tsv"), "score"))
    pred = _load_predictions(_require(_artifact(cfg, "predictions.tsv"), "fuse"))
    citations = econ.normalize_citations(corpus, cfg.citation_norm)
    indicator = _health_indicator(pred)

    ids = [pid for pid in scores.complete_ids() if pid in citations and pid in indicator]
    if len(ids) < cfg.bins:
        raise DataError(f"only {len(ids)} papers with complete scores; need {cfg.bins}")
    y = [citations[pid] for pid in ids]
    journals = [corpus.papers[pid].journal_id for pid in ids]
    flags = [indicator[pid] for pid in ids]
    novelty = standardize([scores.records[pid].novelty for pid in ids])
    impact = standardize([scores.records[pid].impact for pid in ids])
    qual = standardize([scores.records[pid].quality for pid in ids])

    base_models = []
    interaction_models = []
    for fe in (None, journals):
        for regs in ({"novelty": novelty}, {"impact": impact},
                     {"novelty": novelty, "impact": impact}, {"quality": qual}):
            base_models.append(econ.ols(y, regs, fixed_effects=fe))
            interaction_models.append(
                econ.interaction_model(y, flags, regs, fixed_effects=fe)
            )
    labels = [f"({i + 1})" for i in range(8)]
    text = econ.format_regression_table(
        base_models,
        "year-normalized citations on text-based scores "
        "(1-4 unconditional, 5-8 with journal fixed effects)",
        labels,
    )
    text += f"\ncorr(novelty, impact) = {econ.correlation(novelty, impact):.4f}\n"
    _artifact(cfg, "regress_citations.txt").write_text(text, encoding="utf-8")
    text = econ.format_regression_table(
        interaction_models,
        "year-normalized citations with health-classifier interactions "
        "(1-4 unconditional, 5-8 with journal fixed effects)",
        labels,
    )
    _artifact(cfg, "regress_interactions.txt").write_text(text, encoding="utf-8")

    for name, column in (("novelty", novelty), ("impact", impact), ("quality", qual)):
        for fe, suffix in ((None, ""), (journals, "_fe")):
            bins = econ.binned_scatter(column, y, n_bins=cfg.bins, fixed_effects=fe)
            with open(_artifact(cfg, f"binned_{name}{suffix}.tsv"), "w", encoding="utf-8") as fh:
                fh.write("x_mean\ty_mean\tcount\n")
                for bx, by, count in bins:
                    fh.write(f"{bx!r}\t{by!r}\t{count}\n")

    # agreement between the fused classification and the journal taxonomy
    categories = {
        pid: corpus.registry[p.journal_id].category.name
        for pid, p in corpus.papers.items()
    }
    table = econ.crosstab(indicator, categories)
    _artifact(cfg, "crosstab.tsv").write_text(table.to_text(), encoding="utf-8")
    print(f"regress: {len(ids)} papers in the analysis sample")


def stage_series(cfg: RunConfig) -> None:
    corpus = _load_corpus(cfg)
    scores = PaperScores.load(_require(_artifact(cfg, "scores.tsv"), "score"))
    pred = _load_predictions(_require(_artifact(cfg, "predictions.tsv"), "fuse"))
    indicator = _health_indicator(pred)

    shares = econ.classification_share_series(corpus, indicator)
    with open(_artifact(cfg, "series_share.tsv"), "w", encoding="utf-8") as fh:
        fh.write("year\tcategory\tshare\tcount\n")
        for year, category, share, count in shares:
            fh.write(f"{year}\t{category}\t{share!r}\t{count}\n")
    share_lines: dict[str, list[tuple[float, float]]] = {}
    for year, category, share, _ in shares:
        share_lines.setdefault(category, []).append((year, share))
    svg.write_svg(
        svg.line_series_svg(share_lines, "share classified as target field", "share"),
        _artifact(cfg, "series_share.svg"),
    )

    complete = set(scores.complete_ids())
    group_names = {0: "other", 1: "health"}
    for name in ("quality", "novelty", "impact"):
        column = {pid: v for pid, v in scores.column(name).items() if pid in complete}
        series = econ.annual_series(corpus, column, indicator, use_fixed_effects=True)
        series.save(_artifact(cfg, f"series_{name}.tsv"))
        lines = {
            group_names[g]: series.group_points(g) for g in (0, 1)
        }
        svg.write_svg(
            svg.line_series_svg(lines, f"adjusted annual {name}", name),
            _artifact(cfg, f"series_{name}.svg"),
        )

    # decomposition in quality-SD units: novelty + impact adds to quality per row
    sd = quality_sd(scores)
    with open(_artifact(cfg, "series_decomposition.tsv"), "w", encoding="utf-8") as fh:
        fh.write("year\tgroup\tnovelty_sd\timpact_sd\tquality_sd\tcount\n")
        parts = {}
        for name in ("novelty", "impact", "quality"):
            column = {
                pid: v / sd for pid, v in scores.column(name).items() if pid in complete
            }
            parts[name] = econ.annual_series(corpus, column, indicator, use_fixed_effects=True)
        for row_n, row_i, row_q in zip(
            parts["novelty"].rows, parts["impact"].rows, parts["quality"].rows
        ):
            year, group, n_mean, count = row_n
            fh.write(f"{year}\t{group}\t{n_mean!r}\t{row_i[2]!r}\t{row_q[2]!r}\t{count}\n")
    print(f"series: {len(shares)} share rows, quality SD {sd:.4f}")


def stage_map(cfg: RunConfig) -> None:
    corpus = _load_corpus(cfg)
    emb = _load_embeddings(cfg, corpus)
    ids = sorted(emb.ids())
    n = len(ids)
    k = min(cfg.pca_k, n - 1, emb.dim)
    projection = mapviz.pca(emb, k, ids=ids)
    perplexity = min(cfg.tsne_perplexity, (n - 1) / 3 - 1e-9)
    projection = mapviz.reduce_to_plane(
        projection, perplexity=perplexity, iterations=cfg.tsne_iterations, seed=cfg.seed
    )
    labels = mapviz.cluster(projection.coords, min(cfg.clusters, n))
    merged = mapviz.merge_by_top_journal(labels, ids, corpus)
    mapviz.save_coordinates(projection, merged.labels, _artifact(cfg, "map_coords.tsv"))
    mapviz.emit_scatter_svg(
        projection.coords, merged.labels, _artifact(cfg, "map_clusters.svg"),
        title="corpus map (merged clusters)",
    )
    pred_path = _artifact(cfg, "predictions.tsv")
    if pred_path.exists():
        pred = _load_predictions(pred_path)
        mapviz.emit_scatter_svg(
            projection.coords,
            pred.fused_prob,
            _artifact(cfg, "map_probability.svg"),
            paper_ids=ids,
            title="corpus map (fused probability)",
        )
    lines = [
        f"papers: {n}",
        f"pca components: {k} (explained variance {projection.explained_variance_ratio.sum():.4f})",
        f"tsne: perplexity={perplexity:g} iterations={cfg.tsne_iterations} "
        f"seed={cfg.seed} final_kl={projection.final_kl:.6f}",
        f"clusters: {len(np.unique(labels))} before merge, "
        f"{len(np.unique(merged.labels))} after modal-journal merge",
        "",
        "top journals per merged cluster:",
    ]
    for lab, journals in sorted(merged.top_journals.items()):
        pretty = ", ".join(f"{j} ({c})" for j, c in journals)
        lines.append(f"  cluster {lab}: {pretty}")
    _artifact(cfg, "map_summary.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"map: {len(np.unique(merged.labels))} merged clusters from {len(np.unique(labels))}")


def stage_report(cfg: RunConfig) -> None:
    corpus = _load_corpus(cfg)
    emb_path = _embeddings_path(cfg)
    if not emb_path.exists():
        emb = embed_corpus_synthetic(corpus, cfg.embed_dim, cfg.seed)
        save_embeddings(emb, emb_path)
        print(f"report: wrote synthetic embeddings (dim {cfg.embed_dim}) to {emb_path}")
    for stage in STAGES:
        RUNNERS[stage](cfg)


def stage_synth(cfg: RunConfig, n_papers: int) -> None:
    corpus = make_synthetic_corpus(n_papers, seed=cfg.seed)
    out = cfg.out_dir()
    save_corpus(corpus, out / "corpus.jsonl", out / "registry.jsonl")
    print(f"synth: wrote {n_papers}-paper corpus to {out}")


RUNNERS = {
    "ingest": stage_ingest,
    "label": stage_label,
    "train": stage_train,
    "fuse": stage_fuse,
    "score": stage_score,
    "regress": stage_regress,
    "series": stage_series,
    "map": stage_map,
    "report": stage_report,
}


# ---------------------------------------------------------------------------
# Argument handling
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="corpusmetrics",
        description="field classification and novelty/impact/quality scoring pipeline",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value config file")
    common.add_argument("--corpus", help="corpus file (one JSON record per line)")
    common.add_argument("--registry", help="journal registry file")
    common.add_argument("--embeddings", help="embedding file (EMB1 binary)")
    common.add_argument("--out", help="output directory (default: out)")
    common.add_argument("--seed", type=int, help="seed for splits, training, layouts")
    common.add_argument("--threads", type=int, help="worker cap for scoring")
    common.add_argument("--grid-step", type=float, dest="grid_step", help="cutoff grid step")
    common.add_argument(
        "--edge-policy", dest="edge_policy", choices=EDGE_POLICIES,
        help="drop or shorten incomplete similarity windows",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, blurb in (
        ("ingest", "validate the corpus and write summary statistics"),
        ("label", "build journal-based and author-based labeled sets"),
        ("train", "train the two probes on embeddings"),
        ("fuse", "fuse probability streams and report performance"),
        ("score", "compute temporal similarity scores"),
        ("regress", "citation regressions and binned scatters"),
        ("series", "classification shares and adjusted annual series"),
        ("map", "2-D corpus map with clusters"),
        ("report", "run the whole pipeline"),
        ("synth", "generate a synthetic demo corpus"),
    ):
        p = sub.add_parser(name, parents=[common], help=blurb)
        if name == "fuse":
            p.add_argument("--probs-journal", dest="probs_journal",
                           help="external journal-stream probability file")
            p.add_argument("--probs-author", dest="probs_author",
                           help="external author-stream probability file")
        if name == "synth":
            p.add_argument("--n", type=int, default=200, help="number of papers")
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    values = {}
    if args.config:
        values.update(load_config_file(args.config))
    for key in (
        "corpus", "registry", "embeddings", "out", "seed", "threads",
        "grid_step", "edge_policy", "probs_journal", "probs_author",
    ):
        if getattr(args, key, None) is not None:
            values[key] = getattr(args, key)
    try:
        return RunConfig(**values)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        out = cfg.out_dir()
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "synth":
            stage_synth(cfg, args.n)
        else:
            RUNNERS[args.command](cfg)
        write_manifest(out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DataError, OSError, ValueError, KeyError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
