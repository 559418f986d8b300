"""Labeled training sets for the field classifier.

Two labeling routes:

* journal-based: papers in health field journals are positives, papers in
  other-field journals are negatives; general-interest papers are excluded.
* author-based: authors are classified by where they publish (strictly more
  than half of their field-journal output in health journals), and
  general-interest papers whose authors are unanimously health (or
  unanimously non-health) economists inherit that label. Mixed or
  partially-unlabeled author sets are excluded.

Export format: one tab-separated line per entry ``paper_id<TAB>label<TAB>source``;
excluded papers go to a companion ``*.excluded.tsv`` with reasons.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .corpus import Corpus, JournalCategory

EXCLUDED_GENERAL_INTEREST = "general-interest"
EXCLUDED_MIXED = "mixed-or-unlabeled"

SPLIT_FRACTIONS = (0.7, 0.2, 0.1)


class LabelSource(Enum):
    JOURNAL_BASED = "journal"
    AUTHOR_BASED = "author"


class AuthorLabel(Enum):
    HEALTH = "health"
    NON_HEALTH = "non-health"
    UNLABELED = "unlabeled"


@dataclass
class LabeledSet:
    entries: list[tuple[str, int]]
    source: LabelSource
    excluded: list[tuple[str, str]] = field(default_factory=list)

    def __post_init__(self):
        overlap = {pid for pid, _ in self.entries} & {pid for pid, _ in self.excluded}
        if overlap:
            raise ValueError(f"papers both labeled and excluded: {sorted(overlap)[:5]}")
        bad = [lab for _, lab in self.entries if lab not in (0, 1)]
        if bad:
            raise ValueError(f"labels must be 0 or 1, got {bad[:5]}")

    def __len__(self) -> int:
        return len(self.entries)

    def labels(self) -> dict[str, int]:
        return dict(self.entries)

    def positives(self) -> int:
        return sum(lab for _, lab in self.entries)

    def save(self, path: str | Path) -> None:
        path = Path(path)
        with open(path, "w", encoding="utf-8") as fh:
            for pid, lab in self.entries:
                fh.write(f"{pid}\t{lab}\t{self.source.value}\n")
        companion = path.with_suffix(".excluded.tsv")
        with open(companion, "w", encoding="utf-8") as fh:
            for pid, reason in self.excluded:
                fh.write(f"{pid}\t{reason}\n")

    @classmethod
    def load(cls, path: str | Path) -> "LabeledSet":
        entries = []
        source = None
        with open(path, encoding="utf-8") as fh:
            for raw in fh:
                if not raw.strip():
                    continue
                pid, lab, src = raw.rstrip("\n").split("\t")
                entries.append((pid, int(lab)))
                source = LabelSource(src)
        if source is None:
            raise ValueError(f"{path}: no entries")
        return cls(entries=entries, source=source)


@dataclass
class AuthorLabelMap:
    """Per-author field-journal publication counts and the resulting label."""

    counts: dict[str, tuple[int, int]]  # author -> (health-journal, other-field) papers
    labels: dict[str, AuthorLabel]

    def save(self, path: str | Path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            for author in sorted(self.labels):
                c1, c3 = self.counts[author]
                fh.write(f"{author}\t{c1}\t{c3}\t{self.labels[author].value}\n")


def label_journal_based(corpus: Corpus) -> LabeledSet:
    """Label health-field papers 1 and other-field papers 0.

    General-interest papers are excluded with reason ``general-interest``.
    """
    categories = {j.category for j in corpus.registry.values()}
    if JournalCategory.HEALTH_FIELD not in categories:
        raise ValueError("registry has no health field journal")
    if JournalCategory.OTHER_FIELD not in categories:
        raise ValueError("registry has no other-field journal")
    entries = []
    excluded = []
    for pid in corpus.papers:
        cat = corpus.category_of(pid)
        if cat is JournalCategory.HEALTH_FIELD:
            entries.append((pid, 1))
        elif cat is JournalCategory.OTHER_FIELD:
            entries.append((pid, 0))
        else:
            excluded.append((pid, EXCLUDED_GENERAL_INTEREST))
    return LabeledSet(entries=entries, source=LabelSource.JOURNAL_BASED, excluded=excluded)


def classify_authors(corpus: Corpus) -> AuthorLabelMap:
    """Classify every author by their field-journal publication record.

    Health iff strictly more than half of the author's papers in field
    journals (health or other-field) appear in health journals; authors
    with no field-journal papers stay unlabeled. General-interest papers
    never enter the denominator.
    """
    counts: dict[str, tuple[int, int]] = {a: (0, 0) for a in corpus.by_author}
    for p in corpus.papers.values():
        cat = corpus.registry[p.journal_id].category
        if cat is JournalCategory.GENERAL_INTEREST:
            continue
        for a in p.author_ids:
            c1, c3 = counts[a]
            if cat is JournalCategory.HEALTH_FIELD:
                counts[a] = (c1 + 1, c3)
            else:
                counts[a] = (c1, c3 + 1)
    labels = {}
    for a, (c1, c3) in counts.items():
        if c1 + c3 == 0:
            labels[a] = AuthorLabel.UNLABELED
        elif c1 > 0.5 * (c1 + c3):
            labels[a] = AuthorLabel.HEALTH
        else:
            labels[a] = AuthorLabel.NON_HEALTH
    return AuthorLabelMap(counts=counts, labels=labels)


def label_author_based(corpus: Corpus, authors: AuthorLabelMap) -> LabeledSet:
    """Label general-interest papers through their authors.

    A paper is labeled 1 when every author is a health economist, 0 when
    every author is a non-health economist; any unlabeled author or mix of
    the two excludes the paper.
    """
    entries = []
    excluded = []
    for pid, paper in corpus.papers.items():
        if corpus.category_of(pid) is not JournalCategory.GENERAL_INTEREST:
            continue
        author_labels = {authors.labels[a] for a in paper.author_ids}
        if author_labels == {AuthorLabel.HEALTH}:
            entries.append((pid, 1))
        elif author_labels == {AuthorLabel.NON_HEALTH}:
            entries.append((pid, 0))
        else:
            excluded.append((pid, EXCLUDED_MIXED))
    return LabeledSet(entries=entries, source=LabelSource.AUTHOR_BASED, excluded=excluded)


def _largest_remainder(targets: list[float], total: int, caps: list[int]) -> list[int]:
    """Integer allocation summing to ``total``: floors, then largest remainders.

    Never allocates above ``caps`` (the floors themselves always fit).
    """
    alloc = [min(int(t), cap) for t, cap in zip(targets, caps)]
    leftover = total - sum(alloc)
    order = sorted(range(len(targets)), key=lambda i: (alloc[i] - targets[i], i))
    while leftover > 0:
        for i in order:
            if alloc[i] < caps[i]:
                alloc[i] += 1
                leftover -= 1
                break
        else:
            raise ValueError("allocation exceeds capacity")
    return alloc


def split_dataset(
    labeled: LabeledSet, seed: int
) -> tuple[LabeledSet, LabeledSet, LabeledSet]:
    """Deterministic stratified 0.7 / 0.2 / 0.1 split.

    Global sizes are floor(0.7 n), floor(0.2 n) and the remainder; within
    that, per-label counts follow largest-remainder rounding so both labels
    land in every split whenever a label has at least 10 entries.
    """
    n = len(labeled.entries)
    if n < 10:
        raise ValueError("too small to split")

    by_label: dict[int, list[tuple[str, int]]] = {}
    for entry in labeled.entries:
        by_label.setdefault(entry[1], []).append(entry)
    labels_present = sorted(by_label)
    rng = random.Random(seed)
    for lab in labels_present:
        rng.shuffle(by_label[lab])

    n_train = int(SPLIT_FRACTIONS[0] * n)
    n_val = int(SPLIT_FRACTIONS[1] * n)
    sizes = [len(by_label[lab]) for lab in labels_present]
    train_alloc = _largest_remainder(
        [SPLIT_FRACTIONS[0] * m for m in sizes], n_train, caps=sizes
    )
    val_alloc = _largest_remainder(
        [SPLIT_FRACTIONS[1] * m for m in sizes],
        n_val,
        caps=[m - tr for m, tr in zip(sizes, train_alloc)],
    )

    parts: tuple[list, list, list] = ([], [], [])
    for lab, tr, va in zip(labels_present, train_alloc, val_alloc):
        pool = by_label[lab]
        parts[0].extend(pool[:tr])
        parts[1].extend(pool[tr : tr + va])
        parts[2].extend(pool[tr + va :])

    return tuple(
        LabeledSet(entries=part, source=labeled.source) for part in parts
    )  # type: ignore[return-value]
