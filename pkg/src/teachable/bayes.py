"""Baseline Naive Bayes text classifier (multinomial and Bernoulli).

All scoring happens in log space. A fitted model is immutable; refitting
with one extra document through incremental_update matches a full refit
field for field, so training can stream.
"""

from __future__ import annotations

import copy
import json
import math
from collections import Counter
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Iterable, Mapping

from .corpus import ClassLabel, LabeledDocument

DEFAULT_ALPHA = 1.0

MODEL_FORMAT_VERSION = 1


class NBVariant(str, Enum):
    MULTINOMIAL = "multinomial"
    BERNOULLI = "bernoulli"


class ModelError(Exception):
    """Unusable training input or serialized model."""


@dataclass(frozen=True)
class VocabularyStats:
    """Sufficient statistics collected from the training lemmas.

    token_counts / token_totals feed the multinomial likelihoods;
    doc_frequency / class_doc_counts feed the Bernoulli ones and the priors.
    """

    token_counts: dict[ClassLabel, Counter[str]]
    token_totals: dict[ClassLabel, int]
    doc_frequency: dict[ClassLabel, Counter[str]]
    class_doc_counts: dict[ClassLabel, int]
    vocabulary: set[str]

    def total_documents(self) -> int:
        return sum(self.class_doc_counts.values())


@dataclass(frozen=True)
class NBModel:
    variant: NBVariant
    stats: VocabularyStats
    alpha: float = DEFAULT_ALPHA

    def __post_init__(self) -> None:
        if self.alpha <= 0:
            raise ModelError(f"alpha must be positive, got {self.alpha}")


def doc_lemmas(doc: LabeledDocument | Mapping[str, int]) -> Mapping[str, int]:
    lemmas = getattr(doc, "lemmas", doc)
    if not isinstance(lemmas, Mapping):
        raise TypeError(f"expected a preprocessed document or lemma counts, got {type(doc).__name__}")
    return lemmas


def fit(
    train_docs: Iterable[LabeledDocument],
    variant: NBVariant = NBVariant.MULTINOMIAL,
    alpha: float = DEFAULT_ALPHA,
) -> NBModel:
    """Count lemmas per class and wrap the result in an immutable model.

    Every class must be represented by at least one document.
    """
    token_counts: dict[ClassLabel, Counter[str]] = {c: Counter() for c in ClassLabel}
    doc_frequency: dict[ClassLabel, Counter[str]] = {c: Counter() for c in ClassLabel}
    class_doc_counts: dict[ClassLabel, int] = {c: 0 for c in ClassLabel}
    vocabulary: set[str] = set()

    for doc in train_docs:
        label = ClassLabel(doc.label)
        lemmas = doc_lemmas(doc)
        class_doc_counts[label] += 1
        for lemma, count in lemmas.items():
            token_counts[label][lemma] += count
            doc_frequency[label][lemma] += 1
            vocabulary.add(lemma)

    for label in ClassLabel:
        if class_doc_counts[label] == 0:
            raise ModelError(f"no training documents for class {label.display_name}")

    token_totals = {c: sum(token_counts[c].values()) for c in ClassLabel}
    stats = VocabularyStats(
        token_counts=token_counts,
        token_totals=token_totals,
        doc_frequency=doc_frequency,
        class_doc_counts=class_doc_counts,
        vocabulary=vocabulary,
    )
    return NBModel(variant=variant, stats=stats, alpha=alpha)


def incremental_update(model: NBModel, doc: LabeledDocument) -> NBModel:
    """Return a new model equal to refitting with ``doc`` appended."""
    stats = model.stats
    label = ClassLabel(doc.label)
    lemmas = doc_lemmas(doc)

    token_counts = {c: copy.copy(stats.token_counts[c]) for c in ClassLabel}
    doc_frequency = {c: copy.copy(stats.doc_frequency[c]) for c in ClassLabel}
    class_doc_counts = dict(stats.class_doc_counts)
    token_totals = dict(stats.token_totals)
    vocabulary = set(stats.vocabulary)

    class_doc_counts[label] += 1
    for lemma, count in lemmas.items():
        token_counts[label][lemma] += count
        doc_frequency[label][lemma] += 1
        token_totals[label] += count
        vocabulary.add(lemma)

    new_stats = VocabularyStats(
        token_counts=token_counts,
        token_totals=token_totals,
        doc_frequency=doc_frequency,
        class_doc_counts=class_doc_counts,
        vocabulary=vocabulary,
    )
    return NBModel(variant=model.variant, stats=new_stats, alpha=model.alpha)


def log_prior(model: NBModel, label: ClassLabel) -> float:
    stats = model.stats
    return math.log(stats.class_doc_counts[label] / stats.total_documents())


def log_likelihood(model: NBModel, lemma: str, label: ClassLabel) -> float:
    """Smoothed log P(lemma | class) for the model's variant.

    Defined for any lemma: unseen ones take the zero-count value of the
    same formula, and |V| stays the fit-time vocabulary size.
    """
    stats = model.stats
    alpha = model.alpha
    if model.variant is NBVariant.MULTINOMIAL:
        count = stats.token_counts[label].get(lemma, 0)
        denom = stats.token_totals[label] + alpha * len(stats.vocabulary)
        return math.log((count + alpha) / denom)
    df = stats.doc_frequency[label].get(lemma, 0)
    return math.log((df + alpha) / (stats.class_doc_counts[label] + 2 * alpha))


def log_scores(
    model: NBModel,
    doc: LabeledDocument | Mapping[str, int],
    *,
    bernoulli_absence_terms: bool = False,
) -> dict[ClassLabel, float]:
    """Per-class unnormalized log posteriors.

    Multinomial sums over token multiplicity (every token, in-vocabulary or
    not). Bernoulli sums presence terms over vocabulary words present in the
    document; set bernoulli_absence_terms to also charge log(1-p) for every
    vocabulary word the document lacks.
    """
    lemmas = doc_lemmas(doc)
    stats = model.stats
    scores: dict[ClassLabel, float] = {}
    for label in ClassLabel:
        score = log_prior(model, label)
        if model.variant is NBVariant.MULTINOMIAL:
            for lemma, count in lemmas.items():
                score += count * log_likelihood(model, lemma, label)
        else:
            present = {lemma for lemma in lemmas if lemma in stats.vocabulary}
            for lemma in present:
                score += log_likelihood(model, lemma, label)
            if bernoulli_absence_terms:
                for lemma in stats.vocabulary:
                    if lemma not in present:
                        score += math.log1p(-math.exp(log_likelihood(model, lemma, label)))
        scores[label] = score
    return scores


def argmax_label(scores: Mapping[ClassLabel, float]) -> ClassLabel:
    """Highest-scoring class; ties go to the lowest class code."""
    best: ClassLabel | None = None
    best_score = -math.inf
    for label in sorted(scores):
        if scores[label] > best_score:
            best = label
            best_score = scores[label]
    assert best is not None
    return best


def predict(
    model: NBModel,
    doc: LabeledDocument | Mapping[str, int],
    *,
    bernoulli_absence_terms: bool = False,
) -> tuple[ClassLabel, dict[ClassLabel, float]]:
    scores = log_scores(model, doc, bernoulli_absence_terms=bernoulli_absence_terms)
    return argmax_label(scores), scores


def softmax(scores: Mapping[ClassLabel, float]) -> dict[ClassLabel, float]:
    peak = max(scores.values())
    exps = {label: math.exp(score - peak) for label, score in scores.items()}
    z = sum(exps.values())
    return {label: value / z for label, value in exps.items()}


def posterior(
    model: NBModel,
    doc: LabeledDocument | Mapping[str, int],
    *,
    bernoulli_absence_terms: bool = False,
) -> dict[ClassLabel, float]:
    return softmax(log_scores(model, doc, bernoulli_absence_terms=bernoulli_absence_terms))


def model_to_dict(model: NBModel) -> dict:
    stats = model.stats
    return {
        "format_version": MODEL_FORMAT_VERSION,
        "variant": model.variant.value,
        "alpha": model.alpha,
        "token_counts": {str(int(c)): dict(stats.token_counts[c]) for c in ClassLabel},
        "doc_frequency": {str(int(c)): dict(stats.doc_frequency[c]) for c in ClassLabel},
        "class_doc_counts": {str(int(c)): stats.class_doc_counts[c] for c in ClassLabel},
    }


def model_from_dict(payload: dict) -> NBModel:
    version = payload.get("format_version")
    if version != MODEL_FORMAT_VERSION:
        raise ModelError(f"unsupported model format_version: {version!r}")
    try:
        variant = NBVariant(payload["variant"])
        alpha = float(payload["alpha"])
        token_counts = {
            ClassLabel(int(code)): Counter({str(k): int(v) for k, v in table.items()})
            for code, table in payload["token_counts"].items()
        }
        doc_frequency = {
            ClassLabel(int(code)): Counter({str(k): int(v) for k, v in table.items()})
            for code, table in payload["doc_frequency"].items()
        }
        class_doc_counts = {
            ClassLabel(int(code)): int(n) for code, n in payload["class_doc_counts"].items()
        }
    except (KeyError, ValueError, TypeError) as exc:
        raise ModelError(f"malformed model payload: {exc}") from exc
    for label in ClassLabel:
        token_counts.setdefault(label, Counter())
        doc_frequency.setdefault(label, Counter())
        class_doc_counts.setdefault(label, 0)
    vocabulary = set().union(*(token_counts[c].keys() for c in ClassLabel))
    vocabulary |= set().union(*(doc_frequency[c].keys() for c in ClassLabel))
    token_totals = {c: sum(token_counts[c].values()) for c in ClassLabel}
    stats = VocabularyStats(
        token_counts=token_counts,
        token_totals=token_totals,
        doc_frequency=doc_frequency,
        class_doc_counts=class_doc_counts,
        vocabulary=vocabulary,
    )
    return NBModel(variant=variant, stats=stats, alpha=alpha)


def save_model(model: NBModel, path: str | Path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model)), encoding="utf-8")


def load_model(path: str | Path) -> NBModel:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ModelError(f"{path}: not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ModelError(f"{path}: expected a JSON object")
    return model_from_dict(payload)
