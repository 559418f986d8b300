"""Publication corpus and journal registry: loading, validation, indexing.

File formats (both UTF-8, one JSON object per line):

* corpus file: ``{"id", "title", "abstract", "journal", "authors", "year",
  "citations"}`` with ``authors`` a list of opaque author keys;
* registry file: ``{"id", "name", "category"}`` with ``category`` in
  ``{1, 2, 3}`` (1 = health field journal, 2 = general interest,
  3 = other-field journal).

A journal that would qualify for both categories 2 and 3 must be recorded
as category 3: the other-field list is the non-health labeling pole and
takes precedence.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .errors import CorpusFormatError

DEFAULT_YEAR_RANGE = (1994, 2023)


class JournalCategory(Enum):
    HEALTH_FIELD = 1
    GENERAL_INTEREST = 2
    OTHER_FIELD = 3


@dataclass(frozen=True)
class Paper:
    id: str
    title: str
    abstract: str
    journal_id: str
    author_ids: tuple[str, ...]
    year: int
    citations: int


@dataclass(frozen=True)
class Journal:
    id: str
    name: str
    category: JournalCategory


@dataclass
class Corpus:
    """Validated, immutable collection of papers plus the journal registry.

    Safe for concurrent reads; construct via :meth:`build` or
    :func:`load_corpus`, never mutate afterwards.
    """

    papers: dict[str, Paper]
    registry: dict[str, Journal]
    by_year: dict[int, tuple[str, ...]] = field(repr=False, default_factory=dict)
    by_journal: dict[str, tuple[str, ...]] = field(repr=False, default_factory=dict)
    by_author: dict[str, tuple[str, ...]] = field(repr=False, default_factory=dict)

    @classmethod
    def build(
        cls,
        papers: list[Paper],
        journals: list[Journal],
        year_range: tuple[int, int] | None = None,
    ) -> "Corpus":
        registry: dict[str, Journal] = {}
        for j in journals:
            if j.id in registry:
                raise CorpusFormatError(f"duplicate journal id {j.id!r}")
            registry[j.id] = j

        paper_map: dict[str, Paper] = {}
        for p in papers:
            if p.id in paper_map:
                raise CorpusFormatError(f"duplicate paper id {p.id!r}")
            if not p.title:
                raise CorpusFormatError(f"paper {p.id!r}: empty title")
            if p.citations < 0:
                raise CorpusFormatError(f"paper {p.id!r}: negative citations")
            if p.journal_id not in registry:
                raise CorpusFormatError(
                    f"paper {p.id!r}: unknown journal {p.journal_id!r}"
                )
            if year_range is not None and not year_range[0] <= p.year <= year_range[1]:
                raise CorpusFormatError(
                    f"paper {p.id!r}: year {p.year} outside {year_range[0]}-{year_range[1]}"
                )
            paper_map[p.id] = p

        by_year: dict[int, list[str]] = {}
        by_journal: dict[str, list[str]] = {}
        by_author: dict[str, list[str]] = {}
        for p in paper_map.values():
            by_year.setdefault(p.year, []).append(p.id)
            by_journal.setdefault(p.journal_id, []).append(p.id)
            for a in p.author_ids:
                by_author.setdefault(a, []).append(p.id)

        return cls(
            papers=paper_map,
            registry=registry,
            by_year={y: tuple(v) for y, v in by_year.items()},
            by_journal={j: tuple(v) for j, v in by_journal.items()},
            by_author={a: tuple(v) for a, v in by_author.items()},
        )

    def __len__(self) -> int:
        return len(self.papers)

    def category_of(self, paper_id: str) -> JournalCategory:
        return self.registry[self.papers[paper_id].journal_id].category

    def year_span(self) -> tuple[int, int]:
        years = self.by_year.keys()
        return (min(years), max(years))

    def ids(self) -> list[str]:
        return list(self.papers)


def _parse_record(raw: str, line_no: int) -> dict:
    try:
        record = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CorpusFormatError(f"invalid JSON ({exc.msg})", line=line_no) from exc
    if not isinstance(record, dict):
        raise CorpusFormatError("record is not an object", line=line_no)
    return record


def load_registry(path: str | Path) -> list[Journal]:
    journals = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            rec = _parse_record(raw, line_no)
            try:
                category = JournalCategory(int(rec["category"]))
                journals.append(Journal(str(rec["id"]), str(rec["name"]), category))
            except (KeyError, ValueError) as exc:
                raise CorpusFormatError(f"bad registry record: {exc}", line=line_no) from exc
    return journals


def load_corpus(
    path: str | Path,
    registry_path: str | Path,
    year_range: tuple[int, int] | None = DEFAULT_YEAR_RANGE,
) -> Corpus:
    """Load and validate a corpus file against its journal registry.

    Raises :class:`CorpusFormatError` on malformed records (reporting the
    line number), duplicate paper ids, or journals missing from the registry.
    """
    journals = load_registry(registry_path)
    papers = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            if not raw.strip():
                continue
            rec = _parse_record(raw, line_no)
            try:
                papers.append(
                    Paper(
                        id=str(rec["id"]),
                        title=str(rec["title"]),
                        abstract=str(rec.get("abstract", "")),
                        journal_id=str(rec["journal"]),
                        author_ids=tuple(str(a) for a in rec["authors"]),
                        year=int(rec["year"]),
                        citations=int(rec["citations"]),
                    )
                )
            except (KeyError, TypeError, ValueError) as exc:
                raise CorpusFormatError(f"bad corpus record: {exc}", line=line_no) from exc
    return Corpus.build(papers, journals, year_range=year_range)


def save_corpus(corpus: Corpus, path: str | Path, registry_path: str | Path) -> None:
    """Write a corpus back out in the line-oriented ingest format."""
    with open(registry_path, "w", encoding="utf-8") as fh:
        for j in corpus.registry.values():
            fh.write(
                json.dumps(
                    {"id": j.id, "name": j.name, "category": j.category.value},
                    ensure_ascii=False,
                )
                + "\n"
            )
    with open(path, "w", encoding="utf-8") as fh:
        for p in corpus.papers.values():
            fh.write(
                json.dumps(
                    {
                        "id": p.id,
                        "title": p.title,
                        "abstract": p.abstract,
                        "journal": p.journal_id,
                        "authors": list(p.author_ids),
                        "year": p.year,
                        "citations": p.citations,
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


@dataclass
class CorpusStats:
    total: int
    by_category: dict[JournalCategory, int]
    by_year: dict[int, int]
    by_category_year: dict[JournalCategory, dict[int, int]]

    def to_text(self) -> str:
        lines = [f"papers: {self.total}", "", "by category:"]
        for cat in JournalCategory:
            lines.append(f"  {cat.name:<16} {self.by_category[cat]}")
        lines.append("")
        lines.append("by year:")
        header = "  year  " + "".join(f"{cat.name[:9]:>10}" for cat in JournalCategory)
        lines.append(header + f"{'total':>10}")
        for year in sorted(self.by_year):
            row = f"  {year}  " + "".join(
                f"{self.by_category_year[cat][year]:>10}" for cat in JournalCategory
            )
            lines.append(row + f"{self.by_year[year]:>10}")
        return "\n".join(lines) + "\n"


def corpus_stats(corpus: Corpus) -> CorpusStats:
    """Paper counts by journal category and year.

    Every year between the first and last observed year is reported, zeros
    included; category counts sum to the corpus size.
    """
    if not corpus.papers:
        raise ValueError("empty corpus")
    lo, hi = corpus.year_span()
    years = range(lo, hi + 1)
    by_category = {cat: 0 for cat in JournalCategory}
    by_year = {y: 0 for y in years}
    by_category_year = {cat: {y: 0 for y in years} for cat in JournalCategory}
    for p in corpus.papers.values():
        cat = corpus.registry[p.journal_id].category
        by_category[cat] += 1
        by_year[p.year] += 1
        by_category_year[cat][p.year] += 1
    return CorpusStats(
        total=len(corpus.papers),
        by_category=by_category,
        by_year=by_year,
        by_category_year=by_category_year,
    )


# The 25-journal default registry: five health field journals, prestigious
# general-interest outlets whose remit includes health, and field journals
# for adjacent non-health fields. Journals qualifying as both general
# interest and other-field are recorded as category 3 (other-field wins).
DEFAULT_JOURNALS: tuple[tuple[str, str, int], ...] = (
    ("jhe", "Journal of Health Economics", 1),
    ("he", "Health Economics", 1),
    ("ajhe", "American Journal of Health Economics", 1),
    ("ejhe", "European Journal of Health Economics", 1),
    ("ijhem", "International Journal of Health Economics and Management", 1),
    ("aer", "American Economic Review", 2),
    ("jpe", "Journal of Political Economy", 2),
    ("qje", "Quarterly Journal of Economics", 2),
    ("ecma", "Econometrica", 2),
    ("restud", "Review of Economic Studies", 2),
    ("aejapp", "AEJ: Applied Economics", 2),
    ("aejpol", "AEJ: Economic Policy", 2),
    ("restat", "Review of Economics and Statistics", 2),
    ("jeea", "Journal of the European Economic Association", 2),
    ("ej", "Economic Journal", 2),
    ("jhr", "Journal of Human Resources", 2),
    ("rand", "RAND Journal of Economics", 2),
    ("aejmac", "AEJ: Macroeconomics", 3),
    ("jole", "Journal of Labor Economics", 3),
    ("jpube", "Journal of Public Economics", 3),
    ("jeg", "Journal of Economic Growth", 3),
    ("jdeveco", "Journal of Development Economics", 3),
    ("te", "Theoretical Economics", 3),
    ("jie", "Journal of International Economics", 3),
    ("jectrics", "Journal of Econometrics", 3),
)


def default_registry() -> list[Journal]:
    return [
        Journal(jid, name, JournalCategory(cat)) for jid, name, cat in DEFAULT_JOURNALS
    ]
