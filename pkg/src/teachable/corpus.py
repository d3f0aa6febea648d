"""AG News style corpus loading, validation, and desk-scale subsampling.

Wire format: UTF-8 CSV rows ``label,"title","description"`` with labels 1-4
and no header, as the dataset is commonly distributed. Documents carry their
raw text plus, after :func:`preprocess_corpus`, the lemma bag used by every
model component.
"""

from __future__ import annotations

import csv
import random
from collections import Counter
from dataclasses import dataclass, field, replace
from enum import IntEnum
from pathlib import Path

from .pipeline import PipelineConfig, preprocess

FULL_TRAIN_PER_CLASS = 30_000
FULL_TEST_PER_CLASS = 1_900


class ClassLabel(IntEnum):
    WORLD = 1
    SPORTS = 2
    BUSINESS = 3
    SCITECH = 4

    @property
    def display_name(self) -> str:
        return _DISPLAY_NAMES[self]


_DISPLAY_NAMES = {
    ClassLabel.WORLD: "World",
    ClassLabel.SPORTS: "Sports",
    ClassLabel.BUSINESS: "Business",
    ClassLabel.SCITECH: "SciTech",
}


class CorpusError(Exception):
    """Malformed corpus file or failed validation."""


@dataclass(frozen=True)
class LabeledDocument:
    id: int
    label: ClassLabel
    title: str
    body: str
    lemmas: Counter = field(default_factory=Counter, compare=False)

    @property
    def text(self) -> str:
        """Classification text: title and body joined by one space."""
        return f"{self.title} {self.body}"


@dataclass(frozen=True)
class CorpusSplit:
    train: tuple[LabeledDocument, ...]
    test: tuple[LabeledDocument, ...]


def _read_csv(path: str | Path, split_name: str) -> tuple[LabeledDocument, ...]:
    docs: list[LabeledDocument] = []
    with open(path, encoding="utf-8", newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), start=1):
            if len(row) != 3:
                raise CorpusError(f"{path}:{lineno}: expected 3 columns, got {len(row)}")
            raw_label, title, body = row
            try:
                label = ClassLabel(int(raw_label))
            except ValueError:
                raise CorpusError(f"{path}:{lineno}: label {raw_label!r} not in 1-4") from None
            docs.append(LabeledDocument(id=lineno - 1, label=label, title=title, body=body))
    return tuple(docs)


def _check_counts(docs: tuple[LabeledDocument, ...], per_class: int, which: str) -> None:
    counts = Counter(d.label for d in docs)
    for label in ClassLabel:
        if counts.get(label, 0) != per_class:
            raise CorpusError(
                f"{which} split: class {label.display_name} has {counts.get(label, 0)} "
                f"documents, expected {per_class}"
            )


def load_ag_news(train_path: str | Path, test_path: str | Path, strict_counts: bool = False) -> CorpusSplit:
    """Load CSV train/test files into a validated split.

    ``strict_counts`` additionally enforces the full-dataset shape
    (30,000/1,900 per class); fixtures and subsamples leave it off.
    Preprocessing is not applied here.
    """
    split = CorpusSplit(train=_read_csv(train_path, "train"), test=_read_csv(test_path, "test"))
    if strict_counts:
        _check_counts(split.train, FULL_TRAIN_PER_CLASS, "train")
        _check_counts(split.test, FULL_TEST_PER_CLASS, "test")
    return split


def save_ag_news(split: CorpusSplit, train_path: str | Path, test_path: str | Path) -> None:
    """Write a split back to the same CSV wire format (round-trip safe)."""
    for docs, path in ((split.train, train_path), (split.test, test_path)):
        with open(path, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, quoting=csv.QUOTE_NONNUMERIC)
            for doc in docs:
                writer.writerow([int(doc.label), doc.title, doc.body])


def preprocess_corpus(split: CorpusSplit, pipeline_config: PipelineConfig) -> CorpusSplit:
    """Populate every document's lemma bag; raw text is retained unchanged."""
    def run(docs: tuple[LabeledDocument, ...]) -> tuple[LabeledDocument, ...]:
        return tuple(replace(d, lemmas=preprocess(d.text, pipeline_config)) for d in docs)

    return CorpusSplit(train=run(split.train), test=run(split.test))


def _sample_per_class(
    docs: tuple[LabeledDocument, ...], per_class_n: int, rng: random.Random
) -> tuple[LabeledDocument, ...]:
    by_class: dict[ClassLabel, list[LabeledDocument]] = {label: [] for label in ClassLabel}
    for doc in docs:
        by_class[doc.label].append(doc)
    chosen: list[LabeledDocument] = []
    for label in ClassLabel:
        pool = by_class[label]
        if per_class_n > len(pool):
            raise CorpusError(
                f"cannot sample {per_class_n} documents for class {label.display_name}; "
                f"only {len(pool)} available"
            )
        chosen.extend(rng.sample(pool, per_class_n))
    chosen.sort(key=lambda d: d.id)
    return tuple(chosen)


def subsample(
    split: CorpusSplit,
    per_class_n: int,
    seed: int,
    *,
    test_per_class_n: int | None = None,
) -> CorpusSplit:
    """Deterministic class-balanced subsample of both lists.

    ``test_per_class_n`` overrides the test-side size when an asymmetric
    shape is needed (e.g. 2000 train / 500 test per class).
    """
    if per_class_n < 0:
        raise CorpusError("per_class_n must be nonnegative")
    rng = random.Random(seed)
    train = _sample_per_class(split.train, per_class_n, rng)
    test = _sample_per_class(
        split.test, per_class_n if test_per_class_n is None else test_per_class_n, rng
    )
    return CorpusSplit(train=train, test=test)
