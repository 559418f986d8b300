"""Shared builders for test corpora."""

from __future__ import annotations

import numpy as np

from corpusmetrics.corpus import Corpus, Journal, JournalCategory, Paper

BASIC_JOURNALS = [
    Journal("jhe", "Journal of Health Economics", JournalCategory.HEALTH_FIELD),
    Journal("he", "Health Economics", JournalCategory.HEALTH_FIELD),
    Journal("aer", "American Economic Review", JournalCategory.GENERAL_INTEREST),
    Journal("qje", "Quarterly Journal of Economics", JournalCategory.GENERAL_INTEREST),
    Journal("jectrics", "Journal of Econometrics", JournalCategory.OTHER_FIELD),
    Journal("jole", "Journal of Labor Economics", JournalCategory.OTHER_FIELD),
]


def make_paper(pid, journal="jhe", authors=("a1",), year=2000, citations=3,
               title="a title", abstract="an abstract"):
    return Paper(
        id=pid, title=title, abstract=abstract, journal_id=journal,
        author_ids=tuple(authors), year=year, citations=citations,
    )


def build_corpus(papers, journals=None, year_range=None):
    return Corpus.build(papers, journals or BASIC_JOURNALS, year_range=year_range)


def random_corpus(rng: np.random.Generator, n_papers: int, n_years: int):
    """Random corpus over a compact year span, journals drawn uniformly."""
    journal_ids = [j.id for j in BASIC_JOURNALS]
    start = 2000
    papers = []
    for i in range(n_papers):
        papers.append(
            make_paper(
                f"p{i:04d}",
                journal=journal_ids[rng.integers(len(journal_ids))],
                authors=tuple(f"a{rng.integers(20)}" for _ in range(rng.integers(1, 4))),
                year=int(start + rng.integers(n_years)),
                citations=int(rng.poisson(4)),
            )
        )
    return build_corpus(papers)
