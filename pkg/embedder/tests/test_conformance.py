"""Sidecar acceptance: everything it writes must feed the main package as-is."""

from __future__ import annotations

import warnings

import numpy as np

from corpusembedder.cli import main as sidecar_main

from corpusmetrics.cli import main as pipeline_main
from corpusmetrics.embeddings import load_embeddings


def test_embeddings_round_trip_with_zero_warnings(tmp_path, corpus_files, sentence_model_dir):
    out = tmp_path / "vectors.emb"
    code = sidecar_main(
        ["embed", "--corpus", str(corpus_files["corpus"]),
         "--model", str(sentence_model_dir), "--out", str(out), "--batch", "16"]
    )
    assert code == 0
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        emb = load_embeddings(out, corpus_files["object"])
    assert emb.dim == 16
    assert set(emb.ids()) == set(corpus_files["object"].papers)
    print("ACCEPTANCE sidecar-roundtrip: PASS")


def test_embedding_is_reproducible(tmp_path, corpus_files, sentence_model_dir):
    paths = []
    for tag in ("a", "b"):
        out = tmp_path / f"{tag}.emb"
        sidecar_main(["embed", "--corpus", str(corpus_files["corpus"]),
                      "--model", str(sentence_model_dir), "--out", str(out)])
        paths.append(out)
    assert paths[0].read_bytes() == paths[1].read_bytes()
    emb = load_embeddings(paths[0])
    texts = {}
    for pid, paper in corpus_files["object"].papers.items():
        texts.setdefault(f"{paper.title} {paper.abstract}", []).append(pid)
    duplicates = [ids for ids in texts.values() if len(ids) > 1]
    for ids in duplicates:
        for other in ids[1:]:
            assert np.array_equal(emb.vectors[ids[0]], emb.vectors[other])
    print("ACCEPTANCE sidecar-determinism: PASS")


def test_probability_file_feeds_fuse(tmp_path, corpus_files, sentence_model_dir):
    out_dir = tmp_path / "run"
    base = ["--corpus", str(corpus_files["corpus"]),
            "--registry", str(corpus_files["registry"]), "--out", str(out_dir)]

    # a sidecar-format probability file standing in for both streams
    probs = tmp_path / "probs.tsv"
    emb_path = tmp_path / "vectors.emb"
    sidecar_main(["embed", "--corpus", str(corpus_files["corpus"]),
                  "--model", str(sentence_model_dir), "--out", str(emb_path)])
    emb = load_embeddings(emb_path)
    anchor = emb.vectors[sorted(emb.ids())[0]].astype(np.float64)
    with open(probs, "w") as fh:
        for pid in corpus_files["object"].papers:
            v = emb.vectors[pid].astype(np.float64)
            sim = float(v @ anchor / (np.linalg.norm(v) * np.linalg.norm(anchor)))
            fh.write(f"{pid}\t{(sim + 1) / 2!r}\n")

    code = pipeline_main(
        ["fuse", *base, "--probs-journal", str(probs), "--probs-author", str(probs)]
    )
    assert code == 0
    report = (out_dir / "fusion_report.txt").read_text()
    assert "p_C" in report
    print("ACCEPTANCE sidecar-fuse: PASS")
