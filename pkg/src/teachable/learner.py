"""Conversational keyword store and the interactive prediction modes.

The teacher's relevant/irrelevant words accumulate in a KeywordStore. Each
document word then picks up a per-class keyword likelihood:

    (similar_count + 0.5) / (relevant_total + 1)

where similar_count counts the class's relevant keywords within cosine
distance tau of the word (exact string match always counts). Prediction
either uses these factors alone (keywords_only) or multiplies them into
the corpus Naive Bayes likelihoods (combined). A document word that
matches a class's *irrelevant* set contributes no keyword factor for that
class; in combined mode the corpus factor is kept.
"""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import bayes
from .bayes import NBModel
from .corpus import ClassLabel, LabeledDocument
from .embeddings import EmbeddingStore, similar_count
from .pipeline import PipelineConfig, default_config, normalize_word

# additive smoothing s in the keyword likelihood (count + s) / (total + 2s);
# overridable through the environment for experiments
KEYWORD_SMOOTHING = float(os.environ.get("TEACHABLE_KEYWORD_SMOOTHING", "0.5"))

STORE_FORMAT_VERSION = 1


class KeywordPolarity(str, Enum):
    RELEVANT = "relevant"
    IRRELEVANT = "irrelevant"


class KeywordOrigin(str, Enum):
    EXTERNAL = "external"
    INTERNAL_TEXT = "internal_text"
    HIGHLIGHT = "highlight"


class PredictionMode(str, Enum):
    BASELINE = "baseline"
    KEYWORDS_ONLY = "keywords_only"
    COMBINED = "combined"


class KeywordRejected(Exception):
    """The taught word vanished in normalization (empty or stopword-only)."""


@dataclass(frozen=True)
class KeywordRecord:
    lemma: str
    label: ClassLabel
    polarity: KeywordPolarity
    origin: KeywordOrigin
    sequence_number: int


class KeywordStore:
    """Append-only keyword records plus the derived per-class sets.

    For each (lemma, class) pair the most recent record decides the
    polarity; earlier records stay in the history but stop counting.
    """

    def __init__(self) -> None:
        self.records: list[KeywordRecord] = []
        self._latest: dict[tuple[str, ClassLabel], KeywordPolarity] = {}

    def __len__(self) -> int:
        return len(self.records)

    def next_sequence_number(self) -> int:
        return self.records[-1].sequence_number + 1 if self.records else 0

    def append(self, record: KeywordRecord) -> None:
        if self.records and record.sequence_number <= self.records[-1].sequence_number:
            raise ValueError(
                f"sequence_number {record.sequence_number} not after "
                f"{self.records[-1].sequence_number}"
            )
        self.records.append(record)
        self._latest[(record.lemma, record.label)] = record.polarity

    def _polarity_set(self, label: ClassLabel, polarity: KeywordPolarity) -> frozenset[str]:
        return frozenset(
            lemma
            for (lemma, cls), pol in self._latest.items()
            if cls == label and pol is polarity
        )

    def relevant_set(self, label: ClassLabel) -> frozenset[str]:
        return self._polarity_set(label, KeywordPolarity.RELEVANT)

    def irrelevant_set(self, label: ClassLabel) -> frozenset[str]:
        return self._polarity_set(label, KeywordPolarity.IRRELEVANT)

    def relevant_total(self, label: ClassLabel) -> int:
        return len(self.relevant_set(label))

    def is_empty(self) -> bool:
        """True when no class has any currently-relevant keyword."""
        return all(self.relevant_total(label) == 0 for label in ClassLabel)

    def copy(self) -> "KeywordStore":
        dup = KeywordStore()
        dup.records = list(self.records)
        dup._latest = dict(self._latest)
        return dup


class _SetIndex:
    """One class's keyword set with vectors stacked for batch cosine."""

    def __init__(self, keywords: frozenset[str], embeddings: EmbeddingStore) -> None:
        self.keywords = keywords
        vectored = sorted(kw for kw in keywords if kw in embeddings)
        self.position = {kw: i for i, kw in enumerate(vectored)}
        if vectored:
            self.matrix = np.stack(
                [np.asarray(embeddings.get(kw), dtype=np.float64) for kw in vectored]
            )
            self.norms = np.linalg.norm(self.matrix, axis=1)
        else:
            self.matrix = None
            self.norms = None

    def count(self, word: str, embeddings: EmbeddingStore, tau: float) -> int:
        """Same result as embeddings.similar_count over this set."""
        tau = min(tau, 1.0)
        exact = 1 if word in self.keywords else 0
        vec = embeddings.get(word)
        if vec is None or self.matrix is None:
            return exact
        v = np.asarray(vec, dtype=np.float64)
        cos = np.clip((self.matrix @ v) / (self.norms * float(np.linalg.norm(v))), -1.0, 1.0)
        n = int(np.count_nonzero(cos >= tau))
        # the word itself, if present, counts via the exact-match rule, not its cosine
        pos = self.position.get(word)
        if pos is not None and cos[pos] >= tau:
            n -= 1
        return n + exact


class StoreSnapshot:
    """Immutable prediction view of a store at fixed embeddings and tau.

    Memoizes per-word similarity counts, which makes evaluating thousands
    of documents against one store state cheap. Build one per store state;
    it does not see later record_keyword calls.
    """

    def __init__(self, store: KeywordStore, embeddings: EmbeddingStore, tau: float) -> None:
        self.embeddings = embeddings
        self.tau = tau
        self._relevant = {c: _SetIndex(store.relevant_set(c), embeddings) for c in ClassLabel}
        self._irrelevant = {c: _SetIndex(store.irrelevant_set(c), embeddings) for c in ClassLabel}
        self.relevant_totals = {c: len(self._relevant[c].keywords) for c in ClassLabel}
        self._count_memo: dict[tuple[str, ClassLabel], int] = {}
        self._excluded_memo: dict[tuple[str, ClassLabel], bool] = {}

    def relevant_total(self, label: ClassLabel) -> int:
        return self.relevant_totals[label]

    def is_empty(self) -> bool:
        return all(total == 0 for total in self.relevant_totals.values())

    def similar_relevant(self, word: str, label: ClassLabel) -> int:
        key = (word, label)
        found = self._count_memo.get(key)
        if found is None:
            found = self._relevant[label].count(word, self.embeddings, self.tau)
            self._count_memo[key] = found
        return found

    def matches_irrelevant(self, word: str, label: ClassLabel) -> bool:
        key = (word, label)
        found = self._excluded_memo.get(key)
        if found is None:
            found = self._irrelevant[label].count(word, self.embeddings, self.tau) > 0
            self._excluded_memo[key] = found
        return found

    def keyword_likelihood(self, word: str, label: ClassLabel) -> float:
        count = self.similar_relevant(word, label)
        total = self.relevant_totals[label]
        return (count + KEYWORD_SMOOTHING) / (total + 2 * KEYWORD_SMOOTHING)


def record_keyword(
    store: KeywordStore,
    raw_word: str,
    label: ClassLabel,
    polarity: KeywordPolarity,
    origin: KeywordOrigin,
    config: PipelineConfig | None = None,
) -> KeywordRecord:
    """Normalize raw_word through the text pipeline and append it.

    Raises KeywordRejected when nothing survives normalization so the
    caller can re-prompt the teacher. Multi-token input (rare; e.g.
    dotted abbreviations) keeps the first surviving lemma.
    """
    lemmas = normalize_word(raw_word, config or default_config())
    if not lemmas:
        raise KeywordRejected(f"{raw_word!r} reduces to nothing after normalization")
    record = KeywordRecord(
        lemma=lemmas[0],
        label=ClassLabel(label),
        polarity=polarity,
        origin=origin,
        sequence_number=store.next_sequence_number(),
    )
    store.append(record)
    return record


def keyword_likelihood(
    store: KeywordStore,
    embeddings: EmbeddingStore,
    tau: float,
    word: str,
    label: ClassLabel,
) -> float:
    """Smoothed fraction of the class's relevant keywords similar to word."""
    relevant = store.relevant_set(label)
    count = similar_count(word, relevant, embeddings, tau)
    return (count + KEYWORD_SMOOTHING) / (len(relevant) + 2 * KEYWORD_SMOOTHING)


def matches_irrelevant(
    store: KeywordStore,
    embeddings: EmbeddingStore,
    tau: float,
    word: str,
    label: ClassLabel,
) -> bool:
    """True when word hits the class's irrelevant set (cosine >= tau or equal)."""
    return similar_count(word, store.irrelevant_set(label), embeddings, tau) > 0


def uniform_priors() -> dict[ClassLabel, float]:
    n = len(ClassLabel)
    return {label: 1.0 / n for label in ClassLabel}


def _as_snapshot(
    store: KeywordStore | StoreSnapshot, embeddings: EmbeddingStore, tau: float
) -> StoreSnapshot:
    if isinstance(store, StoreSnapshot):
        return store
    return StoreSnapshot(store, embeddings, tau)


def _keyword_adjustment(
    snapshot: StoreSnapshot, lemmas: Mapping[str, int], label: ClassLabel
) -> float:
    """Sum of per-token log keyword factors for one class.

    The smoothed formula applies to every class, so one without relevant
    keywords contributes log 0.5 per token. Tokens matching the class's
    irrelevant set are skipped.
    """
    adjustment = 0.0
    for lemma, count in lemmas.items():
        if snapshot.matches_irrelevant(lemma, label):
            continue
        adjustment += count * math.log(snapshot.keyword_likelihood(lemma, label))
    return adjustment


def predict_keywords_only(
    store: KeywordStore | StoreSnapshot,
    embeddings: EmbeddingStore,
    tau: float,
    doc: LabeledDocument | Mapping[str, int],
    priors: Mapping[ClassLabel, float] | None = None,
) -> tuple[ClassLabel, dict[ClassLabel, float]]:
    """Classify from the taught keywords alone (no corpus pre-training).

    Priors default to uniform. A class with no relevant keywords takes
    the zero-count factor 0.5 for each kept token, so matching a taught
    keyword (factor > 0.5) pulls a document toward that class and a
    taught class without matches (factor < 0.5) falls behind untaught
    ones. Ties break to the lowest class code.
    """
    snapshot = _as_snapshot(store, embeddings, tau)
    lemmas = bayes.doc_lemmas(doc)
    if priors is None:
        priors = uniform_priors()
    scores: dict[ClassLabel, float] = {}
    for label in ClassLabel:
        scores[label] = math.log(priors[label]) + _keyword_adjustment(snapshot, lemmas, label)
    return bayes.argmax_label(scores), scores


def predict_combined(
    store: KeywordStore | StoreSnapshot,
    embeddings: EmbeddingStore,
    tau: float,
    doc: LabeledDocument | Mapping[str, int],
    base_model: NBModel,
) -> tuple[ClassLabel, dict[ClassLabel, float]]:
    """Corpus likelihoods and keyword likelihoods as independent factors.

    With no relevant keyword anywhere in the store, every keyword factor
    is taken as exactly 1 and the result is bit-identical to the baseline
    prediction. Otherwise each class picks up the same per-token keyword
    factors as keywords_only mode, on top of its corpus factors.
    """
    snapshot = _as_snapshot(store, embeddings, tau)
    lemmas = bayes.doc_lemmas(doc)
    scores = bayes.log_scores(base_model, lemmas)
    if snapshot.is_empty():
        return bayes.argmax_label(scores), scores
    for label in ClassLabel:
        scores[label] += _keyword_adjustment(snapshot, lemmas, label)
    return bayes.argmax_label(scores), scores


def predict_mode(
    mode: PredictionMode,
    store: KeywordStore | StoreSnapshot,
    embeddings: EmbeddingStore,
    tau: float,
    doc: LabeledDocument | Mapping[str, int],
    base_model: NBModel | None = None,
    priors: Mapping[ClassLabel, float] | None = None,
) -> tuple[ClassLabel, dict[ClassLabel, float]]:
    """Dispatch one of the three prediction modes over shared arguments."""
    if mode is PredictionMode.BASELINE:
        if base_model is None:
            raise ValueError("baseline mode needs a fitted model")
        return bayes.predict(base_model, doc)
    if mode is PredictionMode.KEYWORDS_ONLY:
        return predict_keywords_only(store, embeddings, tau, doc, priors)
    if base_model is None:
        raise ValueError("combined mode needs a fitted model")
    return predict_combined(store, embeddings, tau, doc, base_model)


def merge_stores(stores: Sequence[KeywordStore]) -> KeywordStore:
    """Combine several teachers' stores into one.

    Records interleave by ascending original sequence_number (ties keep
    the input-list order of their stores), get renumbered densely, and
    the recency rule re-resolves relevant/irrelevant conflicts over the
    merged order.
    """
    tagged = sorted(
        ((record.sequence_number, position, record)
         for position, store in enumerate(stores)
         for record in store.records),
        key=lambda item: (item[0], item[1]),
    )
    merged = KeywordStore()
    for new_seq, (_, _, record) in enumerate(tagged):
        merged.append(
            KeywordRecord(
                lemma=record.lemma,
                label=record.label,
                polarity=record.polarity,
                origin=record.origin,
                sequence_number=new_seq,
            )
        )
    return merged


def store_to_dict(store: KeywordStore) -> dict:
    return {
        "format_version": STORE_FORMAT_VERSION,
        "records": [
            {
                "lemma": r.lemma,
                "class": int(r.label),
                "polarity": r.polarity.value,
                "origin": r.origin.value,
                "sequence_number": r.sequence_number,
            }
            for r in store.records
        ],
    }


def store_from_dict(payload: dict) -> KeywordStore:
    version = payload.get("format_version")
    if version != STORE_FORMAT_VERSION:
        raise ValueError(f"unsupported keyword store format_version: {version!r}")
    store = KeywordStore()
    for row in payload["records"]:
        store.append(
            KeywordRecord(
                lemma=str(row["lemma"]),
                label=ClassLabel(int(row["class"])),
                polarity=KeywordPolarity(row["polarity"]),
                origin=KeywordOrigin(row["origin"]),
                sequence_number=int(row["sequence_number"]),
            )
        )
    return store


def save_store(store: KeywordStore, path: str | Path) -> None:
    Path(path).write_text(json.dumps(store_to_dict(store)), encoding="utf-8")


def load_store(path: str | Path) -> KeywordStore:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(payload, dict):
        raise ValueError(f"{path}: expected a JSON object")
    return store_from_dict(payload)
