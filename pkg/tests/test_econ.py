from __future__ import annotations

import numpy as np
import pytest

from corpusmetrics.econ import (
    annual_series,
    binned_scatter,
    classification_share_series,
    correlation,
    crosstab,
    format_regression_table,
    interaction_model,
    normalize_citations,
    ols,
)
from corpusmetrics.scores import standardize

from corpusutil import build_corpus, make_paper, random_corpus
from oracles import dummy_variable_fe


def test_normalize_constant_year():
    corpus = build_corpus([make_paper(f"p{i}", year=2005, citations=10) for i in range(4)])
    normalized = normalize_citations(corpus)
    assert all(v == pytest.approx(1.0) for v in normalized.values())


def test_normalize_hand_values():
    corpus = build_corpus(
        [
            make_paper("p1", year=2000, citations=0),
            make_paper("p2", year=2000, citations=20),
            make_paper("p3", year=2001, citations=7),
        ]
    )
    normalized = normalize_citations(corpus)
    assert normalized["p1"] == pytest.approx(0.0)
    assert normalized["p2"] == pytest.approx(2.0)
    assert normalized["p3"] == pytest.approx(1.0)  # single-paper year


def test_normalize_zero_year_rejected():
    corpus = build_corpus([make_paper("p1", year=2003, citations=0)])
    with pytest.raises(ValueError, match="2003"):
        normalize_citations(corpus)


def test_normalize_yearly_mean_is_one(rng):
    corpus = random_corpus(rng, 120, 6)
    normalized = normalize_citations(corpus)
    for year, ids in corpus.by_year.items():
        assert np.mean([normalized[pid] for pid in ids]) == pytest.approx(1.0, abs=1e-12)


def test_normalize_log_variant(rng):
    corpus = build_corpus([make_paper("p1", citations=9)])
    assert normalize_citations(corpus, variant="log1p")["p1"] == pytest.approx(np.log(10))
    with pytest.raises(ValueError, match="variant"):
        normalize_citations(corpus, variant="nope")


def test_ols_perfect_fit():
    x = [0.0, 1.0, 2.0, 3.0]
    res = ols([2 * v for v in x], {"x": x})
    assert res.coef[res.names.index("x")] == pytest.approx(2.0, abs=1e-10)
    assert res.coef[res.names.index("intercept")] == pytest.approx(0.0, abs=1e-10)
    assert res.r2 == pytest.approx(1.0)


def test_ols_hand_computed():
    res = ols([1.0, 3.0, 4.0], {"x": [0.0, 1.0, 2.0]})
    assert res.coef[res.names.index("x")] == pytest.approx(1.5, abs=1e-12)
    assert res.coef[res.names.index("intercept")] == pytest.approx(7 / 6, abs=1e-12)


def test_ols_errors():
    with pytest.raises(ValueError, match="collinear"):
        ols([1.0, 2.0, 3.0, 4.0], {"a": [1, 2, 3, 4], "b": [2, 4, 6, 8]})
    with pytest.raises(ValueError, match="insufficient"):
        ols([1.0, 2.0], {"a": [1, 2], "b": [2, 1]})


def test_fixed_effects_match_dummy_regression(rng):
    for _ in range(10):
        n = 60
        groups = rng.integers(0, 4, size=n)
        x = rng.normal(size=(n, 2))
        y = x @ np.array([1.5, -0.5]) + groups * 2.0 + rng.normal(size=n)
        res = ols(y, {"x1": x[:, 0], "x2": x[:, 1]}, fixed_effects=groups)
        beta, se = dummy_variable_fe(y, x, groups)
        assert res.coef == pytest.approx(beta, abs=1e-10)
        assert res.se == pytest.approx(se, abs=1e-10)


def test_interaction_model(rng):
    n = 400
    flags = np.array([0, 1] * (n // 2))
    x = rng.normal(size=n)
    y = 1.0 * x - 0.5 * flags * x + 0.1 * rng.normal(size=n)
    res = interaction_model(y, flags, {"x": x})
    assert res.coef[res.names.index("x")] == pytest.approx(1.0, abs=0.05)
    assert res.coef[res.names.index("health:x")] == pytest.approx(-0.5, abs=0.05)

    same = interaction_model(x * 2.0, flags, {"x": x})
    assert same.coef[same.names.index("health:x")] == pytest.approx(0.0, abs=1e-10)

    with pytest.raises(ValueError):
        interaction_model(y, np.zeros(n), {"x": x})


def test_correlation():
    assert correlation([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == pytest.approx(1.0)
    assert correlation([1.0, 2.0, 3.0], [-1.0, -2.0, -3.0]) == pytest.approx(-1.0)
    assert correlation([1.0, 2.0, 3.0], [1.0, 2.0, 4.0]) == pytest.approx(0.982, abs=1e-3)
    assert correlation([1.0, None, 2.0, 3.0], [1.0, 5.0, 2.0, 4.0]) == pytest.approx(
        correlation([1.0, 2.0, 3.0], [1.0, 2.0, 4.0])
    )
    with pytest.raises(ValueError, match="zero variance"):
        correlation([1.0, 1.0], [2.0, 3.0])
    with pytest.raises(ValueError, match="at least 2"):
        correlation([1.0, None], [2.0, None])


def test_standardized_slope_equals_correlation_times_sd(rng):
    for _ in range(20):
        n = int(rng.integers(20, 100))
        x = rng.normal(size=n)
        y = 0.8 * x + rng.normal(size=n)
        res = ols(y, {"x": standardize(list(x))})
        want = correlation(list(x), list(y)) * np.std(y, ddof=1)
        assert res.coef[res.names.index("x")] == pytest.approx(want, abs=1e-10)


def test_binned_scatter_sizes():
    x = list(range(40))
    bins = binned_scatter(x, x, n_bins=20)
    assert all(count == 2 for _, _, count in bins)
    bins = binned_scatter(list(range(41)), list(range(41)), n_bins=20)
    assert {count for _, _, count in bins} <= {2, 3}
    assert sum(count for _, _, count in bins) == 41
    with pytest.raises(ValueError):
        binned_scatter([1.0] * 5, [1.0] * 5, n_bins=20)


def test_binned_scatter_identity_line(rng):
    x = list(rng.normal(size=100))
    bins = binned_scatter(x, x, n_bins=20)
    for bx, by, _ in bins:
        assert by == pytest.approx(bx)
    centers = [bx for bx, _, _ in bins]
    assert centers == sorted(centers)


def test_binned_scatter_fixed_effects_removes_group_offsets(rng):
    n = 200
    groups = np.array(["a", "b"] * (n // 2))
    x = rng.normal(size=n)
    offsets = np.where(groups == "a", 5.0, -5.0)
    y = x + offsets
    raw = binned_scatter(x, y, n_bins=10)
    adjusted = binned_scatter(x, y, n_bins=10, fixed_effects=groups)
    raw_spread = np.std([by - bx for bx, by, _ in raw])
    adj_spread = np.std([by - bx for bx, by, _ in adjusted])
    assert adj_spread < raw_spread / 2


def test_annual_series_single_journal_equals_raw_means(rng):
    papers = [make_paper(f"p{i}", journal="jhe", year=2000 + i % 3) for i in range(30)]
    corpus = build_corpus(papers)
    values = {pid: float(rng.normal()) for pid in corpus.papers}
    indicator = {pid: i % 2 for i, pid in enumerate(corpus.papers)}
    series = annual_series(corpus, values, indicator, use_fixed_effects=True)
    for year, group, mean, count in series.rows:
        members = [
            values[pid] for pid in corpus.papers
            if corpus.papers[pid].year == year and indicator[pid] == group
        ]
        assert mean == pytest.approx(np.mean(members), abs=1e-12)
        assert count == len(members)


def test_annual_series_absorbs_journal_offsets(rng):
    papers = []
    values = {}
    indicator = {}
    for i in range(100):
        journal = "jhe" if i % 2 else "jole"
        pid = f"p{i}"
        papers.append(make_paper(pid, journal=journal, year=2000))
        values[pid] = 3.0 if journal == "jhe" else -3.0  # pure outlet-level offset
        indicator[pid] = 1 if journal == "jhe" else 0
    corpus = build_corpus(papers)
    series = annual_series(corpus, values, indicator, use_fixed_effects=True)
    means = {group: mean for _, group, mean, _ in series.rows}
    assert means[0] == pytest.approx(means[1], abs=1e-10)


def test_annual_series_weighted_mean_is_grand_mean(rng):
    corpus = random_corpus(rng, 80, 5)
    values = {pid: float(rng.normal()) for pid in corpus.papers}
    indicator = {pid: int(rng.integers(2)) for pid in corpus.papers}
    series = annual_series(corpus, values, indicator, use_fixed_effects=True)
    total = sum(mean * count for _, _, mean, count in series.rows)
    count = sum(count for _, _, _, count in series.rows)
    assert total / count == pytest.approx(np.mean(list(values.values())), abs=1e-10)


def test_classification_share_series():
    corpus = build_corpus(
        [
            make_paper("p1", journal="jhe", year=2000),
            make_paper("p2", journal="jhe", year=2000),
            make_paper("p3", journal="jole", year=2001),
        ]
    )
    rows = classification_share_series(corpus, {"p1": 1, "p2": 0, "p3": 1})
    assert (2000, "HEALTH_FIELD", 0.5, 2) in rows
    assert (2001, "OTHER_FIELD", 1.0, 1) in rows


def test_crosstab_identical_is_diagonal():
    labels = {f"p{i}": i % 3 for i in range(30)}
    table = crosstab(labels, labels)
    assert all(a == b for a, b in table.counts)
    for a, shares in table.row_shares.items():
        assert sum(shares.values()) == pytest.approx(1.0)
    for b, shares in table.col_shares.items():
        assert sum(shares.values()) == pytest.approx(1.0)


def test_crosstab_counts_overlap_only():
    table = crosstab({"p1": 1, "p2": 0}, {"p2": 1, "p3": 0})
    assert table.n == 1 and table.counts == {(0, 1): 1}
    with pytest.raises(ValueError, match="shared"):
        crosstab({"p1": 1}, {"p2": 0})


def test_crosstab_independent_labels(rng):
    n = 10_000
    a = {f"p{i}": int(rng.integers(2)) for i in range(n)}
    b = {f"p{i}": int(rng.integers(2)) for i in range(n)}
    table = crosstab(a, b)
    share_a1 = sum(v for k, v in table.counts.items() if k[0] == 1) / n
    share_b1 = sum(v for k, v in table.counts.items() if k[1] == 1) / n
    assert table.counts[(1, 1)] / n == pytest.approx(share_a1 * share_b1, abs=0.02)


def test_format_regression_table_layout(rng):
    x = list(rng.normal(size=30))
    y = [2 * v + float(rng.normal()) for v in x]
    res = ols(y, {"x": x})
    text = format_regression_table([res, res], "demo table")
    assert "demo table" in text
    assert "(1)" in text and "(2)" in text
    assert "standard errors in parentheses" in text
    assert "journal FE" in text
