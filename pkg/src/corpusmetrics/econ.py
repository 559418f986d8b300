"""Citation econometrics: year-normalized citations, OLS with journal fixed
effects and group interactions, correlations, binned scatters, adjusted
annual series, and classification crosstabs.

Fixed effects are absorbed by within-group demeaning; coefficients and
conventional standard errors match the equivalent dummy-variable
regression (the degrees of freedom account for the absorbed intercepts).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Hashable, Mapping, Sequence

import numpy as np
from scipy import stats

from .corpus import Corpus


@dataclass
class RegressionResult:
    names: list[str]
    coef: np.ndarray
    se: np.ndarray
    n: int
    r2: float
    fixed_effects: bool
    dof: int

    def __post_init__(self):
        if len(self.names) != len(self.coef):
            raise ValueError("coefficient names and estimates misaligned")

    def p_values(self) -> np.ndarray:
        t = np.abs(self.coef / self.se)
        return 2.0 * stats.t.sf(t, df=self.dof)

    def stars(self) -> list[str]:
        out = []
        for p in self.p_values():
            out.append("***" if p < 0.001 else "**" if p < 0.01 else "*" if p < 0.05 else "")
        return out


@dataclass
class AnnualSeries:
    """FE-adjusted mean of a per-paper value by (year, group)."""

    rows: list[tuple[int, int, float, int]]  # year, group, adjusted mean, count

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("year\tgroup\tmean\tcount\n")
            for year, group, mean, count in self.rows:
                fh.write(f"{year}\t{group}\t{mean!r}\t{count}\n")

    def group_points(self, group: int) -> list[tuple[int, float]]:
        return [(y, m) for y, g, m, _ in self.rows if g == group]


def normalize_citations(corpus: Corpus, variant: str = "mean") -> dict[str, float]:
    """Citations scaled by the publication-year average.

    The default ``mean`` variant divides by the same-year mean so every
    yearly average is exactly 1; ``log1p`` applies log(1 + c) instead.
    """
    if variant == "log1p":
        return {pid: float(np.log1p(p.citations)) for pid, p in corpus.papers.items()}
    if variant != "mean":
        raise ValueError(f"unknown normalization variant {variant!r}")
    out: dict[str, float] = {}
    for year, ids in corpus.by_year.items():
        mean = np.mean([corpus.papers[pid].citations for pid in ids])
        if mean == 0.0:
            raise ValueError(f"year {year}: zero mean citations")
        for pid in ids:
            out[pid] = corpus.papers[pid].citations / mean
    return out


def _demean_by_group(values: np.ndarray, groups: np.ndarray) -> np.ndarray:
    out = values.astype(np.float64).copy()
    for g in np.unique(groups):
        mask = groups == g
        out[mask] -= out[mask].mean(axis=0)
    return out


def ols(
    y: Sequence[float],
    x: Mapping[str, Sequence[float]],
    fixed_effects: Sequence[Hashable] | None = None,
    add_intercept: bool = True,
) -> RegressionResult:
    """Least squares of ``y`` on named regressor columns.

    With ``fixed_effects`` (one group key per row) both sides are demeaned
    within groups, which reproduces the coefficients and standard errors of
    a regression on a full set of group dummies.
    """
    y_vec = np.asarray(y, dtype=np.float64)
    names = list(x)
    cols = np.column_stack([np.asarray(x[name], dtype=np.float64) for name in names])
    n = len(y_vec)
    if cols.shape[0] != n:
        raise ValueError("outcome and regressors misaligned")

    absorbed = 0
    if fixed_effects is not None:
        groups = np.asarray(fixed_effects)
        if len(groups) != n:
            raise ValueError("fixed effects misaligned")
        absorbed = len(np.unique(groups))
        design = _demean_by_group(cols, groups)
        y_use = _demean_by_group(y_vec, groups)
    elif add_intercept:
        design = np.column_stack([np.ones(n), cols])
        names = ["intercept"] + names
        y_use = y_vec
    else:
        design = cols
        y_use = y_vec

    # absorbed group intercepts count against the degrees of freedom
    dof = n - design.shape[1] - absorbed
    if dof <= 0:
        raise ValueError(f"insufficient observations: n={n}")
    rank = np.linalg.matrix_rank(design)
    if rank < design.shape[1]:
        raise ValueError("rank-deficient design (perfectly collinear columns)")

    beta, _, _, _ = np.linalg.lstsq(design, y_use, rcond=None)
    resid = y_use - design @ beta
    rss = float(resid @ resid)
    sigma2 = rss / dof
    xtx_inv = np.linalg.inv(design.T @ design)
    se = np.sqrt(sigma2 * np.diag(xtx_inv))

    tss = float(np.sum((y_vec - y_vec.mean()) ** 2))
    r2 = 1.0 - rss / tss if tss > 0 else float("nan")
    return RegressionResult(
        names=names,
        coef=beta,
        se=se,
        n=n,
        r2=r2,
        fixed_effects=fixed_effects is not None,
        dof=dof,
    )


def interaction_model(
    y: Sequence[float],
    indicator: Sequence[int],
    x: Mapping[str, Sequence[float]],
    fixed_effects: Sequence[Hashable] | None = None,
    indicator_name: str = "health",
) -> RegressionResult:
    """OLS with a binary group indicator and group-specific slopes."""
    flags = np.asarray(indicator, dtype=np.float64)
    if set(np.unique(flags)) - {0.0, 1.0}:
        raise ValueError("indicator must be binary")
    design: dict[str, Sequence[float]] = dict(x)
    design[indicator_name] = flags
    for name in x:
        design[f"{indicator_name}:{name}"] = flags * np.asarray(x[name], dtype=np.float64)
    return ols(y, design, fixed_effects=fixed_effects)


def correlation(a: Sequence[float | None], b: Sequence[float | None]) -> float:
    """Pearson correlation over pairwise non-missing entries."""
    pairs = [(x, y) for x, y in zip(a, b) if x is not None and y is not None]
    if len(pairs) < 2:
        raise ValueError("need at least 2 paired values")
    xs = np.array([p[0] for p in pairs])
    ys = np.array([p[1] for p in pairs])
    if xs.std() == 0.0 or ys.std() == 0.0:
        raise ValueError("zero variance")
    return float(np.corrcoef(xs, ys)[0, 1])


def binned_scatter(
    x: Sequence[float],
    y: Sequence[float],
    n_bins: int = 20,
    fixed_effects: Sequence[Hashable] | None = None,
) -> list[tuple[float, float, int]]:
    """Quantile-binned means of y against x.

    Observations are sorted by x and cut into ``n_bins`` groups whose sizes
    differ by at most one. With fixed effects, both variables are first
    residualized within groups (grand means added back).
    """
    xs = np.asarray(x, dtype=np.float64)
    ys = np.asarray(y, dtype=np.float64)
    n = len(xs)
    if n < n_bins:
        raise ValueError(f"need at least {n_bins} observations, got {n}")
    if fixed_effects is not None:
        groups = np.asarray(fixed_effects)
        xs = _demean_by_group(xs, groups) + xs.mean()
        ys = _demean_by_group(ys, groups) + ys.mean()
    order = np.argsort(xs, kind="stable")
    out = []
    for chunk in np.array_split(order, n_bins):
        out.append((float(xs[chunk].mean()), float(ys[chunk].mean()), len(chunk)))
    return out


def annual_series(
    corpus: Corpus,
    values: Mapping[str, float],
    indicator: Mapping[str, int],
    use_fixed_effects: bool = True,
) -> AnnualSeries:
    """Average a per-paper value by (year, group), optionally FE-adjusted.

    Adjustment regresses the value on journal intercepts and averages
    residual-plus-grand-mean, so outlet composition differences across
    years and groups are removed while the overall mean is preserved.
    """
    ids = sorted(pid for pid in values if pid in indicator and pid in corpus.papers)
    if not ids:
        raise ValueError("no scored papers to aggregate")
    vals = np.array([values[pid] for pid in ids], dtype=np.float64)
    if use_fixed_effects:
        journals = np.array([corpus.papers[pid].journal_id for pid in ids])
        adjusted = _demean_by_group(vals, journals) + vals.mean()
    else:
        adjusted = vals
    buckets: dict[tuple[int, int], list[float]] = {}
    for pid, v in zip(ids, adjusted):
        key = (corpus.papers[pid].year, int(indicator[pid]))
        buckets.setdefault(key, []).append(float(v))
    rows = [
        (year, group, float(np.mean(vs)), len(vs))
        for (year, group), vs in sorted(buckets.items())
    ]
    return AnnualSeries(rows=rows)


def classification_share_series(
    corpus: Corpus, labels: Mapping[str, int]
) -> list[tuple[int, str, float, int]]:
    """Share of positively classified papers per (year, journal category)."""
    buckets: dict[tuple[int, str], list[int]] = {}
    for pid, lab in labels.items():
        paper = corpus.papers[pid]
        category = corpus.registry[paper.journal_id].category.name
        buckets.setdefault((paper.year, category), []).append(int(lab))
    return [
        (year, category, float(np.mean(labs)), len(labs))
        for (year, category), labs in sorted(buckets.items())
    ]


@dataclass
class Crosstab:
    counts: dict[tuple[Hashable, Hashable], int]
    row_shares: dict[Hashable, dict[Hashable, float]]  # P(b | a)
    col_shares: dict[Hashable, dict[Hashable, float]]  # P(a | b)
    n: int

    def to_text(self) -> str:
        a_vals = sorted({a for a, _ in self.counts}, key=str)
        b_vals = sorted({b for _, b in self.counts}, key=str)
        width = max([8] + [len(str(b)) + 2 for b in b_vals])
        lines = [f"n = {self.n}", ""]
        lines.append(f"{'':<14}" + "".join(f"{str(b):>{width}}" for b in b_vals))
        for a in a_vals:
            row = f"{str(a):<14}"
            for b in b_vals:
                row += f"{self.counts.get((a, b), 0):>{width}}"
            lines.append(row)
        lines.append("")
        lines.append("row shares (conditional on first classification):")
        for a in a_vals:
            row = f"{str(a):<14}"
            for b in b_vals:
                row += f"{self.row_shares[a].get(b, 0.0):>{width}.3f}"
            lines.append(row)
        return "\n".join(lines) + "\n"


def crosstab(
    class_a: Mapping[str, Hashable], class_b: Mapping[str, Hashable]
) -> Crosstab:
    """Contingency table of two classifications over their shared papers."""
    shared = sorted(set(class_a) & set(class_b))
    if not shared:
        raise ValueError("no papers shared between classifications")
    counts: dict[tuple[Hashable, Hashable], int] = {}
    for pid in shared:
        key = (class_a[pid], class_b[pid])
        counts[key] = counts.get(key, 0) + 1
    row_totals: dict[Hashable, int] = {}
    col_totals: dict[Hashable, int] = {}
    for (a, b), c in counts.items():
        row_totals[a] = row_totals.get(a, 0) + c
        col_totals[b] = col_totals.get(b, 0) + c
    row_shares = {
        a: {b: c / row_totals[a] for (aa, b), c in counts.items() if aa == a}
        for a in row_totals
    }
    col_shares = {
        b: {a: c / col_totals[b] for (a, bb), c in counts.items() if bb == b}
        for b in col_totals
    }
    return Crosstab(counts=counts, row_shares=row_shares, col_shares=col_shares, n=len(shared))


def format_regression_table(
    results: Sequence[RegressionResult], title: str, column_labels: Sequence[str] | None = None
) -> str:
    """Plain-text table: one column per model, stars and (se) under estimates."""
    labels = list(column_labels or [f"({i + 1})" for i in range(len(results))])
    all_names: list[str] = []
    for res in results:
        for name in res.names:
            if name not in all_names:
                all_names.append(name)
    width = 16
    name_w = max(len(n) for n in all_names) + 2
    lines = [title, "=" * (name_w + width * len(results))]
    lines.append(f"{'':<{name_w}}" + "".join(f"{lab:>{width}}" for lab in labels))
    lines.append("-" * (name_w + width * len(results)))
    for name in all_names:
        est_row = f"{name:<{name_w}}"
        se_row = f"{'':<{name_w}}"
        for res in results:
            if name in res.names:
                i = res.names.index(name)
                est_row += f"{res.coef[i]:>{width - 4}.3f}{res.stars()[i]:<4}"
                se_row += f"{'(' + format(res.se[i], '.3f') + ')':>{width - 4}}{'':<4}"
            else:
                est_row += f"{'':>{width}}"
                se_row += f"{'':>{width}}"
        lines.append(est_row)
        lines.append(se_row)
    lines.append("-" * (name_w + width * len(results)))
    n_row = f"{'n':<{name_w}}"
    r2_row = f"{'R2':<{name_w}}"
    fe_row = f"{'journal FE':<{name_w}}"
    for res in results:
        n_row += f"{res.n:>{width - 4}}{'':<4}"
        r2_row += f"{res.r2:>{width - 4}.3f}{'':<4}"
        fe_row += f"{'yes' if res.fixed_effects else 'no':>{width - 4}}{'':<4}"
    lines += [n_row, r2_row, fe_row]
    lines.append("stars: * p<0.05, ** p<0.01, *** p<0.001 (standard errors in parentheses)")
    return "\n".join(lines) + "\n"
