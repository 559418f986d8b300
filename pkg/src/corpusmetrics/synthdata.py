"""Deterministic synthetic corpora with two planted topic distributions.

Health papers draw their text mostly from a health vocabulary, other papers
from a general-economics vocabulary, with a shared common pool and a small
cross-field bleed, so embedding-based classifiers have real but imperfect
signal. Authors are field-loyal with occasional cross-field publications,
which makes the author-based labeling route informative too. Era-specific
tokens drift the vocabulary over time so temporal similarity scores move.
"""

from __future__ import annotations

import numpy as np

from .corpus import Corpus, Journal, JournalCategory, Paper, default_registry

HEALTH_VOCAB = (
    "hospital insurance mortality morbidity patient physician clinical care "
    "medicaid medicare epidemic vaccination screening diagnosis treatment "
    "disease obesity smoking mentalhealth disability pharmaceutical drug "
    "copayment deductible provider nursing maternal infant longevity "
    "prevention rehabilitation therapy clinic surgery prescription illness "
    "healthplan triage immunization telehealth epidemiology biometric"
).split()

ECON_VOCAB = (
    "wage labor trade tariff inflation monetary fiscal taxation growth "
    "productivity capital investment unemployment auction bargaining "
    "exchange export import industrialization urbanization banking credit "
    "bond equity portfolio incentive contract firm entry competition "
    "oligopoly regulation antitrust innovation patent schooling migration "
    "pension savings recession businesscycle exchangerate commodity"
).split()

COMMON_VOCAB = (
    "evidence effect policy estimation identification panel instrument "
    "experiment randomized model equilibrium data survey causal robustness "
    "heterogeneity elasticity welfare outcome intervention longitudinal "
    "regression inference counterfactual design sample variation"
).split()

ERA_VOCAB = {
    0: "reform privatization transition deregulation".split(),
    1: "globalization outsourcing dotcom liberalization".split(),
    2: "microdata quasiexperiment discontinuity matching".split(),
    3: "administrative bigdata machinelearning registry".split(),
    4: "pandemic remote resilience digitization".split(),
    5: "automation platform gig algorithmic".split(),
}


def _era(year: int, lo: int) -> int:
    return min((year - lo) // 5, max(ERA_VOCAB))


def _text(rng, own, other, era_tokens, n_tokens):
    tokens = []
    for _ in range(n_tokens):
        r = rng.random()
        if r < 0.62:
            tokens.append(own[rng.integers(len(own))])
        elif r < 0.87:
            tokens.append(COMMON_VOCAB[rng.integers(len(COMMON_VOCAB))])
        elif r < 0.95:
            tokens.append(era_tokens[rng.integers(len(era_tokens))])
        else:
            tokens.append(other[rng.integers(len(other))])
    return " ".join(tokens)


def make_synthetic_corpus(
    n_papers: int,
    seed: int = 0,
    year_range: tuple[int, int] = (1994, 2023),
    health_share: float = 0.3,
) -> Corpus:
    """Generate a corpus with planted health / non-health topic structure."""
    rng = np.random.default_rng(seed)
    journals = default_registry()
    by_cat: dict[JournalCategory, list[Journal]] = {}
    for j in journals:
        by_cat.setdefault(j.category, []).append(j)

    n_health_authors = max(4, n_papers // 12)
    n_econ_authors = max(8, n_papers // 6)
    health_authors = [f"ha{i:04d}" for i in range(n_health_authors)]
    econ_authors = [f"ea{i:04d}" for i in range(n_econ_authors)]

    lo, hi = year_range
    years = rng.integers(lo, hi + 1, size=n_papers)
    # guarantee every year appears so per-year statistics are total
    for i, year in enumerate(range(lo, hi + 1)):
        if i < n_papers:
            years[i] = year

    papers = []
    for i in range(n_papers):
        is_health = rng.random() < health_share
        year = int(years[i])
        own, other = (HEALTH_VOCAB, ECON_VOCAB) if is_health else (ECON_VOCAB, HEALTH_VOCAB)
        era_tokens = ERA_VOCAB[_era(year, lo)]
        title = _text(rng, own, other, era_tokens, int(rng.integers(4, 8)))
        abstract = _text(rng, own, other, era_tokens, int(rng.integers(25, 46)))

        home_pool = health_authors if is_health else econ_authors
        away_pool = econ_authors if is_health else health_authors
        n_auth = int(rng.integers(1, 4))
        author_ids = []
        for _ in range(n_auth):
            pool = home_pool if rng.random() < 0.85 else away_pool
            author_ids.append(pool[rng.integers(len(pool))])

        if is_health:
            cat = JournalCategory.HEALTH_FIELD if rng.random() < 0.55 else JournalCategory.GENERAL_INTEREST
        else:
            cat = JournalCategory.OTHER_FIELD if rng.random() < 0.55 else JournalCategory.GENERAL_INTEREST
        journal = by_cat[cat][rng.integers(len(by_cat[cat]))]

        base = 6.0 if cat is JournalCategory.GENERAL_INTEREST else 4.0
        citations = int(rng.poisson(base * (1.0 + 0.5 * rng.random())))

        papers.append(
            Paper(
                id=f"p{i:05d}",
                title=title,
                abstract=abstract,
                journal_id=journal.id,
                author_ids=tuple(dict.fromkeys(author_ids)),
                year=year,
                citations=citations,
            )
        )
    return Corpus.build(papers, journals, year_range=year_range)
