"""Metrics, per-article learning curves, simulated teachers, benchmarks.

The learning curve treats each teaching article as an epoch: after every
completed article in an event log, the chosen prediction mode is
re-evaluated on the full test list. Simulated teachers stand in for
human ones so the benchmark table (two model variants crossed with
no/best/worst/all teaching) can be produced headlessly.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import bayes
from .bayes import NBModel, NBVariant
from .corpus import ClassLabel, CorpusSplit, LabeledDocument
from .embeddings import EmbeddingStore
from .events import EventKind, SessionEvent, apply_keyword, article_groups, replay_store
from .learner import (
    KEYWORD_SMOOTHING,
    KeywordOrigin,
    KeywordPolarity,
    KeywordStore,
    PredictionMode,
    StoreSnapshot,
    merge_stores,
    predict_mode,
)

SIMULATED_TS = "1970-01-01T00:00:00+00:00"


@dataclass(frozen=True)
class ClassMetrics:
    precision: dict[ClassLabel, float]
    recall: dict[ClassLabel, float]
    f1: dict[ClassLabel, float]
    macro_precision: float
    macro_recall: float
    macro_f1: float

    def to_dict(self) -> dict:
        return {
            "per_class": {
                label.display_name: {
                    "precision": self.precision[label],
                    "recall": self.recall[label],
                    "f1": self.f1[label],
                }
                for label in ClassLabel
            },
            "macro_precision": self.macro_precision,
            "macro_recall": self.macro_recall,
            "macro_f1": self.macro_f1,
        }


@dataclass(frozen=True)
class EpochPoint:
    article_index: int
    metrics: ClassMetrics


def macro_metrics(
    predictions: Sequence[ClassLabel], gold_labels: Sequence[ClassLabel]
) -> ClassMetrics:
    """Per-class precision/recall/F1 plus their unweighted means."""
    if len(predictions) != len(gold_labels):
        raise ValueError(f"{len(predictions)} predictions for {len(gold_labels)} gold labels")
    if not predictions:
        raise ValueError("no predictions to score")
    confusion = np.zeros((len(ClassLabel), len(ClassLabel)), dtype=np.int64)
    for pred, gold in zip(predictions, gold_labels):
        confusion[int(gold) - 1][int(pred) - 1] += 1
    precision: dict[ClassLabel, float] = {}
    recall: dict[ClassLabel, float] = {}
    f1: dict[ClassLabel, float] = {}
    for label in ClassLabel:
        i = int(label) - 1
        tp = float(confusion[i][i])
        predicted = float(confusion[:, i].sum())
        actual = float(confusion[i, :].sum())
        p = tp / predicted if predicted > 0 else 0.0
        r = tp / actual if actual > 0 else 0.0
        precision[label] = p
        recall[label] = r
        f1[label] = 2 * p * r / (p + r) if p + r > 0 else 0.0
    n = len(ClassLabel)
    return ClassMetrics(
        precision=precision,
        recall=recall,
        f1=f1,
        macro_precision=sum(precision.values()) / n,
        macro_recall=sum(recall.values()) / n,
        macro_f1=sum(f1.values()) / n,
    )


def evaluate(
    docs: Sequence[LabeledDocument],
    mode: PredictionMode,
    store: KeywordStore | StoreSnapshot | None = None,
    embeddings: EmbeddingStore | None = None,
    tau: float = 0.0,
    base_model: NBModel | None = None,
    priors: Mapping[ClassLabel, float] | None = None,
) -> ClassMetrics:
    """Run one prediction mode over docs and score it against gold labels."""
    if mode is not PredictionMode.BASELINE:
        if store is None or embeddings is None:
            raise ValueError(f"{mode.value} mode needs a keyword store and embeddings")
        if not isinstance(store, StoreSnapshot):
            store = StoreSnapshot(store, embeddings, tau)
    predictions = [
        predict_mode(mode, store, embeddings, tau, doc, base_model, priors)[0] for doc in docs
    ]
    return macro_metrics(predictions, [ClassLabel(doc.label) for doc in docs])


def epoch_curve(
    event_log: Iterable[SessionEvent],
    test_docs: Sequence[LabeledDocument],
    mode: PredictionMode,
    embeddings: EmbeddingStore,
    tau: float,
    base_model: NBModel | None = None,
    priors: Mapping[ClassLabel, float] | None = None,
) -> list[EpochPoint]:
    """Replay a session log article by article, evaluating after each.

    article_index counts completed teaching articles, so an empty log
    yields the single point 0 (the untaught baseline) and an n-article
    log yields points 1..n.
    """
    if mode is PredictionMode.COMBINED and base_model is None:
        raise ValueError("combined mode needs a fitted model")
    events = list(event_log)
    groups = article_groups(events)
    store = KeywordStore()
    if not groups:
        metrics = evaluate(test_docs, mode, store, embeddings, tau, base_model, priors)
        return [EpochPoint(0, metrics)]
    points: list[EpochPoint] = []
    for index, group in enumerate(groups, start=1):
        for event in group:
            if event.kind is EventKind.KEYWORD:
                apply_keyword(store, event, event.seq)
        snapshot = StoreSnapshot(store, embeddings, tau)
        metrics = evaluate(test_docs, mode, snapshot, embeddings, tau, base_model, priors)
        points.append(EpochPoint(index, metrics))
    return points


def curve_to_csv(points: Sequence[EpochPoint]) -> str:
    lines = ["article_index,macro_precision,macro_recall,macro_f1"]
    for point in points:
        m = point.metrics
        lines.append(f"{point.article_index},{m.macro_precision!r},{m.macro_recall!r},{m.macro_f1!r}")
    return "\n".join(lines) + "\n"


def curve_to_svg(points: Sequence[EpochPoint], width: int = 640, height: int = 360) -> str:
    """Minimal standalone chart of macro F1 against articles taught."""
    pad = 40
    xs = [p.article_index for p in points]
    ys = [p.metrics.macro_f1 for p in points]
    x_max = max(max(xs), 1)
    def sx(x: float) -> float:
        return pad + (width - 2 * pad) * x / x_max
    def sy(y: float) -> float:
        return height - pad - (height - 2 * pad) * y
    polyline = " ".join(f"{sx(x):.1f},{sy(y):.1f}" for x, y in zip(xs, ys))
    ticks = []
    for frac in (0.0, 0.25, 0.5, 0.75, 1.0):
        y = sy(frac)
        ticks.append(f'<line x1="{pad}" y1="{y:.1f}" x2="{width-pad}" y2="{y:.1f}" stroke="#ddd"/>')
        ticks.append(f'<text x="4" y="{y+4:.1f}" font-size="11">{frac:.2f}</text>')
    return (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">'
        f'<rect width="100%" height="100%" fill="white"/>'
        + "".join(ticks)
        + f'<polyline points="{polyline}" fill="none" stroke="#1668b4" stroke-width="2"/>'
        + "".join(
            f'<circle cx="{sx(x):.1f}" cy="{sy(y):.1f}" r="3" fill="#1668b4"/>'
            for x, y in zip(xs, ys)
        )
        + f'<text x="{width/2:.0f}" y="{height-8}" font-size="12" text-anchor="middle">articles taught</text>'
        + f'<text x="14" y="16" font-size="12">macro F1</text>'
        "</svg>\n"
    )


class TeacherKind(str, Enum):
    ORACLE_MI = "oracle_mi"
    RANDOM = "random"
    ADVERSARIAL = "adversarial"


@dataclass(frozen=True)
class TeacherStrategy:
    kind: TeacherKind
    k: int = 3
    seed: int = 0

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"words per article must be >= 1, got {self.k}")


def _mi_table(stats: bayes.VocabularyStats, label: ClassLabel) -> dict[str, float]:
    """Mutual information of each lemma's presence with [class == label].

    Only lemmas positively associated with the class are scored; a lemma
    can be highly informative through its absence, and teaching such a
    lemma as relevant would invert its meaning.
    """
    n_total = stats.total_documents()
    n_class = stats.class_doc_counts[label]
    n_rest = n_total - n_class
    table: dict[str, float] = {}
    for lemma in stats.vocabulary:
        df_class = stats.doc_frequency[label].get(lemma, 0)
        df_rest = sum(stats.doc_frequency[c].get(lemma, 0) for c in ClassLabel) - df_class
        if df_class * n_rest <= df_rest * n_class:
            continue
        mi = 0.0
        df_all = df_class + df_rest
        for n_wc, n_w, n_c in (
            (df_class, df_all, n_class),
            (df_rest, df_all, n_rest),
            (n_class - df_class, n_total - df_all, n_class),
            (n_rest - df_rest, n_total - df_all, n_rest),
        ):
            if n_wc > 0:
                mi += (n_wc / n_total) * math.log(n_wc * n_total / (n_w * n_c))
        table[lemma] = mi
    return table


def _top_k(candidates: Iterable[str], mi: Mapping[str, float], k: int) -> list[str]:
    scored = [(lemma, mi[lemma]) for lemma in set(candidates) if lemma in mi]
    scored.sort(key=lambda item: (-item[1], item[0]))
    return [lemma for lemma, _ in scored[:k]]


def select_teaching_articles(
    train_docs: Sequence[LabeledDocument], seed: int, per_class: int = 5
) -> list[LabeledDocument]:
    """Class-balanced teaching set from a seeded shuffle of the train split.

    Returns per_class articles for each class, interleaved round-robin
    in class-code order, so a prefix of the result stays near-balanced.
    """
    rng = random.Random(seed)
    chosen: dict[ClassLabel, list[LabeledDocument]] = {}
    for label in ClassLabel:
        docs = [d for d in train_docs if d.label == label]
        if len(docs) < per_class:
            raise ValueError(
                f"need at least {per_class} training articles for {label.display_name}, "
                f"found {len(docs)}"
            )
        rng.shuffle(docs)
        chosen[label] = docs[:per_class]
    return [chosen[label][i] for i in range(per_class) for label in ClassLabel]


def simulate_teacher(
    strategy: TeacherStrategy,
    train_docs: Sequence[LabeledDocument],
    teaching_articles: Sequence[LabeledDocument],
    stats: bayes.VocabularyStats | None = None,
) -> list[SessionEvent]:
    """Produce the event log a scripted teacher would leave behind.

    oracle_mi teaches each article's most class-informative lemmas;
    random teaches arbitrary article lemmas; adversarial teaches the
    strongest lemmas of a *different* class as if they belonged to the
    article's class. All three emit one article_advanced marker per
    article, so the logs replay into per-article learning curves.
    """
    if stats is None:
        stats = bayes.fit(train_docs).stats
    rng = random.Random(strategy.seed)
    mi_tables: dict[ClassLabel, dict[str, float]] = {}

    def mi_for(label: ClassLabel) -> dict[str, float]:
        if label not in mi_tables:
            mi_tables[label] = _mi_table(stats, label)
        return mi_tables[label]

    events: list[SessionEvent] = []

    def emit(kind: EventKind, payload: dict) -> None:
        events.append(SessionEvent(seq=len(events), ts=SIMULATED_TS, kind=kind, payload=payload))

    for article in teaching_articles:
        label = ClassLabel(article.label)
        article_lemmas = sorted(article.lemmas)
        if strategy.kind is TeacherKind.ORACLE_MI:
            chosen = _top_k(article_lemmas, mi_for(label), strategy.k)
            origin = KeywordOrigin.INTERNAL_TEXT
        elif strategy.kind is TeacherKind.RANDOM:
            chosen = rng.sample(article_lemmas, min(strategy.k, len(article_lemmas)))
            origin = KeywordOrigin.INTERNAL_TEXT
        else:
            wrong = rng.choice([c for c in ClassLabel if c != label])
            chosen = _top_k(mi_for(wrong).keys(), mi_for(wrong), strategy.k)
            origin = KeywordOrigin.EXTERNAL
        for lemma in chosen:
            emit(
                EventKind.KEYWORD,
                {
                    "lemma": lemma,
                    "class": int(label),
                    "polarity": KeywordPolarity.RELEVANT.value,
                    "origin": origin.value,
                },
            )
        emit(EventKind.ARTICLE_ADVANCED, {"article_id": article.id})
    return events


class BenchmarkCondition(str, Enum):
    BASELINE = "baseline"
    BEST_TEACHER = "best_teacher"
    WORST_TEACHER = "worst_teacher"
    ALL_TEACHERS = "all_teachers"


_CONDITION_LABELS = {
    BenchmarkCondition.BASELINE: "without teachers (baseline)",
    BenchmarkCondition.BEST_TEACHER: "best teacher",
    BenchmarkCondition.WORST_TEACHER: "worst teacher",
    BenchmarkCondition.ALL_TEACHERS: "all teachers merged",
}

_VARIANT_LABELS = {
    NBVariant.MULTINOMIAL: "Multinomial Naive Bayes",
    NBVariant.BERNOULLI: "Bernoulli Naive Bayes",
}


@dataclass(frozen=True)
class BenchmarkReport:
    rows: dict[tuple[NBVariant, BenchmarkCondition], ClassMetrics]
    config: dict

    def to_dict(self) -> dict:
        return {
            "config": self.config,
            "rows": [
                {
                    "variant": variant.value,
                    "condition": condition.value,
                    **metrics.to_dict(),
                }
                for (variant, condition), metrics in self.rows.items()
            ],
        }

    def format_table(self) -> str:
        header = f"{'model':<26} {'condition':<30} {'precision':>9} {'recall':>9} {'f1':>9}"
        lines = [header, "-" * len(header)]
        for variant in NBVariant:
            for condition in BenchmarkCondition:
                metrics = self.rows.get((variant, condition))
                if metrics is None:
                    continue
                lines.append(
                    f"{_VARIANT_LABELS[variant]:<26} {_CONDITION_LABELS[condition]:<30} "
                    f"{metrics.macro_precision:>9.4f} {metrics.macro_recall:>9.4f} "
                    f"{metrics.macro_f1:>9.4f}"
                )
        return "\n".join(lines) + "\n"


def run_benchmark(
    split: CorpusSplit,
    teacher_logs: Mapping[str, object],
    embeddings: EmbeddingStore,
    *,
    tau: float,
    alpha: float = bayes.DEFAULT_ALPHA,
) -> BenchmarkReport:
    """Fill the two-variant, four-condition benchmark grid.

    teacher_logs carries "best" and "worst" (each one event log) and
    "all" (a list of logs merged into one shared store).
    """
    best_store = replay_store(teacher_logs["best"])
    worst_store = replay_store(teacher_logs["worst"])
    all_store = merge_stores([replay_store(log) for log in teacher_logs["all"]])
    condition_stores = {
        BenchmarkCondition.BEST_TEACHER: best_store,
        BenchmarkCondition.WORST_TEACHER: worst_store,
        BenchmarkCondition.ALL_TEACHERS: all_store,
    }
    rows: dict[tuple[NBVariant, BenchmarkCondition], ClassMetrics] = {}
    for variant in NBVariant:
        model = bayes.fit(split.train, variant, alpha)
        rows[(variant, BenchmarkCondition.BASELINE)] = evaluate(
            split.test, PredictionMode.BASELINE, base_model=model
        )
        for condition, store in condition_stores.items():
            snapshot = StoreSnapshot(store, embeddings, tau)
            rows[(variant, condition)] = evaluate(
                split.test,
                PredictionMode.COMBINED,
                snapshot,
                embeddings,
                tau,
                base_model=model,
            )
    config = {
        "alpha": alpha,
        "tau": tau,
        "keyword_smoothing": KEYWORD_SMOOTHING,
        "train_docs": len(split.train),
        "test_docs": len(split.test),
    }
    return BenchmarkReport(rows=rows, config=config)
