import math
import random
from collections import Counter

import numpy as np
import pytest

import oracles
from conftest import oracle_train
from teachable.bayes import NBVariant, fit
from teachable.corpus import ClassLabel, CorpusSplit, LabeledDocument
from teachable.embeddings import EmbeddingStore
from teachable.events import EventKind, SessionEvent, replay_store
from teachable.evaluation import (
    SIMULATED_TS,
    BenchmarkCondition,
    TeacherKind,
    TeacherStrategy,
    _mi_table,
    _top_k,
    curve_to_csv,
    curve_to_svg,
    epoch_curve,
    evaluate,
    macro_metrics,
    run_benchmark,
    select_teaching_articles,
    simulate_teacher,
)
from teachable.learner import KeywordOrigin, KeywordStore, PredictionMode

EMPTY_EMB = EmbeddingStore(dimension=3, vectors={})

TOPICS = {
    1: ["troop", "border", "treaty", "minister", "embassy"],
    2: ["goal", "coach", "season", "league", "striker"],
    3: ["market", "profit", "shares", "oil", "bank"],
    4: ["chip", "software", "rocket", "browser", "server"],
}


def synth_split(n_train=40, n_test=24, seed=5):
    rng = random.Random(seed)

    def make(n, offset):
        docs = []
        for i in range(n):
            label = 1 + i % 4
            words = rng.sample(TOPICS[label], 3) + [rng.choice(TOPICS[1 + rng.randint(0, 3)])]
            docs.append(
                LabeledDocument(
                    id=offset + i,
                    label=ClassLabel(label),
                    title=" ".join(words[:2]),
                    body=" ".join(words),
                    lemmas=Counter(words),
                )
            )
        return tuple(docs)

    return CorpusSplit(train=make(n_train, 0), test=make(n_test, 1000))


# --- metrics -----------------------------------------------------------------

def test_macro_metrics_match_independent_evaluator():
    rng = random.Random(11)
    for _ in range(40):
        n = rng.randint(1, 60)
        pred = [ClassLabel(rng.randint(1, 4)) for _ in range(n)]
        gold = [ClassLabel(rng.randint(1, 4)) for _ in range(n)]
        got = macro_metrics(pred, gold)
        p, r, f = oracles.macro_metrics([(int(a), int(b)) for a, b in zip(pred, gold)])
        assert got.macro_precision == pytest.approx(p, abs=1e-12)
        assert got.macro_recall == pytest.approx(r, abs=1e-12)
        assert got.macro_f1 == pytest.approx(f, abs=1e-12)


def test_macro_metrics_perfect_and_degenerate():
    gold = [ClassLabel(c) for c in (1, 2, 3, 4)]
    perfect = macro_metrics(gold, gold)
    assert perfect.macro_f1 == 1.0
    all_world = macro_metrics([ClassLabel.WORLD] * 4, gold)
    assert all_world.macro_f1 == pytest.approx(0.1)


def test_macro_metrics_rejects_bad_inputs():
    with pytest.raises(ValueError):
        macro_metrics([], [])
    with pytest.raises(ValueError):
        macro_metrics([ClassLabel.WORLD], [])


def test_evaluate_baseline_equals_manual_loop():
    split = synth_split()
    model = fit(split.train)
    from teachable.bayes import predict

    manual = macro_metrics(
        [predict(model, d)[0] for d in split.test], [d.label for d in split.test]
    )
    auto = evaluate(split.test, PredictionMode.BASELINE, base_model=model)
    assert auto == manual


def test_evaluate_requires_store_for_keyword_modes():
    split = synth_split()
    with pytest.raises(ValueError):
        evaluate(split.test, PredictionMode.KEYWORDS_ONLY)


# --- curves --------------------------------------------------------------------

def kw_event(seq, lemma, cls):
    return SessionEvent(
        seq=seq,
        ts=SIMULATED_TS,
        kind=EventKind.KEYWORD,
        payload={"lemma": lemma, "class": cls, "polarity": "relevant", "origin": "external"},
    )


def adv_event(seq, article_id=0):
    return SessionEvent(
        seq=seq, ts=SIMULATED_TS, kind=EventKind.ARTICLE_ADVANCED, payload={"article_id": article_id}
    )


def test_epoch_curve_empty_log_gives_single_baseline_point():
    split = synth_split()
    points = epoch_curve([], split.test, PredictionMode.KEYWORDS_ONLY, EMPTY_EMB, 0.2)
    assert len(points) == 1
    assert points[0].article_index == 0
    assert points[0].metrics.macro_f1 == pytest.approx(0.1)


def test_epoch_curve_one_point_per_article_marker():
    split = synth_split()
    events = [
        kw_event(0, "troop", 1),
        adv_event(1),
        kw_event(2, "goal", 2),
        kw_event(3, "coach", 2),
        adv_event(4, article_id=1),
        kw_event(5, "market", 3),  # trailing group without a marker
    ]
    points = epoch_curve(events, split.test, PredictionMode.KEYWORDS_ONLY, EMPTY_EMB, 0.2)
    assert [p.article_index for p in points] == [1, 2, 3]
    # the store grows cumulatively, so later points see every earlier keyword
    final_store = replay_store(events)
    direct = evaluate(split.test, PredictionMode.KEYWORDS_ONLY, final_store, EMPTY_EMB, 0.2)
    assert points[-1].metrics == direct


def test_epoch_curve_combined_requires_model():
    split = synth_split()
    with pytest.raises(ValueError):
        epoch_curve([], split.test, PredictionMode.COMBINED, EMPTY_EMB, 0.2)


def test_curve_to_csv_exact_format():
    split = synth_split()
    points = epoch_curve(
        [kw_event(0, "troop", 1), adv_event(1)],
        split.test,
        PredictionMode.KEYWORDS_ONLY,
        EMPTY_EMB,
        0.2,
    )
    csv_text = curve_to_csv(points)
    lines = csv_text.splitlines()
    assert lines[0] == "article_index,macro_precision,macro_recall,macro_f1"
    m = points[0].metrics
    assert lines[1] == f"1,{m.macro_precision!r},{m.macro_recall!r},{m.macro_f1!r}"
    assert csv_text.endswith("\n")
    # repr round-trips the floats exactly
    assert float(lines[1].split(",")[3]) == m.macro_f1


def test_curve_to_svg_well_formed():
    split = synth_split()
    points = epoch_curve(
        [kw_event(0, "troop", 1), adv_event(1), kw_event(2, "goal", 2), adv_event(3)],
        split.test,
        PredictionMode.KEYWORDS_ONLY,
        EMPTY_EMB,
        0.2,
    )
    svg = curve_to_svg(points)
    assert svg.startswith("<svg ")
    assert svg.rstrip().endswith("</svg>")
    assert svg.count("<circle ") == len(points)
    assert "polyline" in svg


# --- mutual information ----------------------------------------------------------

def test_mi_table_matches_independent_evaluator():
    split = synth_split(n_train=60)
    stats = fit(split.train).stats
    plain = oracle_train(split.train)
    for label in ClassLabel:
        got = _mi_table(stats, label)
        want = oracles.mi_positive_table(plain, int(label))
        assert set(got) == set(want)
        for lemma, mi in want.items():
            assert got[lemma] == pytest.approx(mi, abs=1e-12)


def test_mi_positive_association_filter():
    # "goal" appears in every Sports doc and nowhere else: top MI for Sports,
    # excluded (absence-informative) for World
    split = synth_split(n_train=60)
    stats = fit(split.train).stats
    sports = _mi_table(stats, ClassLabel.SPORTS)
    world = _mi_table(stats, ClassLabel.WORLD)
    assert "goal" in sports
    assert "goal" not in world
    assert "troop" in world


def test_top_k_orders_by_mi_then_lemma():
    mi = {"a": 0.5, "b": 0.5, "c": 0.9, "d": 0.1}
    assert _top_k(["d", "c", "b", "a"], mi, 3) == ["c", "a", "b"]
    assert _top_k(["q"], mi, 3) == []
    assert _top_k(["a", "a", "c"], mi, 5) == ["c", "a"]


# --- teachers ----------------------------------------------------------------------

def test_strategy_rejects_bad_k():
    with pytest.raises(ValueError):
        TeacherStrategy(kind=TeacherKind.RANDOM, k=0)


def test_select_teaching_articles_balanced_and_deterministic():
    split = synth_split()
    picked = select_teaching_articles(split.train, seed=3, per_class=2)
    again = select_teaching_articles(split.train, seed=3, per_class=2)
    assert [d.id for d in picked] == [d.id for d in again]
    assert [int(d.label) for d in picked] == [1, 2, 3, 4, 1, 2, 3, 4]
    with pytest.raises(ValueError):
        select_teaching_articles(split.train[:3], seed=0, per_class=2)


def test_oracle_teacher_teaches_top_mi_words_of_each_article():
    split = synth_split(n_train=60)
    stats = fit(split.train).stats
    articles = select_teaching_articles(split.train, seed=0, per_class=1)
    events = simulate_teacher(TeacherStrategy(TeacherKind.ORACLE_MI, k=2, seed=0), split.train, articles, stats)
    assert [e.seq for e in events] == list(range(len(events)))
    assert all(e.ts == SIMULATED_TS for e in events)
    groups: list[list] = [[]]
    for e in events:
        if e.kind is EventKind.ARTICLE_ADVANCED:
            groups[-1].append(e)
            groups.append([])
        else:
            groups[-1].append(e)
    groups = [g for g in groups if g]
    assert len(groups) == len(articles)
    plain = oracle_train(split.train)
    for article, group in zip(articles, groups):
        taught = [e.payload["lemma"] for e in group if e.kind is EventKind.KEYWORD]
        table = oracles.mi_positive_table(plain, int(article.label))
        assert taught == oracles.top_k_mi(sorted(article.lemmas), table, 2)
        assert all(e.payload["class"] == int(article.label) for e in group if e.kind is EventKind.KEYWORD)
        assert group[-1].kind is EventKind.ARTICLE_ADVANCED
        assert group[-1].payload == {"article_id": article.id}


def test_random_teacher_uses_article_words_and_respects_k():
    split = synth_split()
    articles = select_teaching_articles(split.train, seed=1, per_class=2)
    events = simulate_teacher(TeacherStrategy(TeacherKind.RANDOM, k=3, seed=9), split.train, articles)
    by_article = iter(articles)
    current = next(by_article)
    for e in events:
        if e.kind is EventKind.ARTICLE_ADVANCED:
            current = next(by_article, None)
        else:
            assert e.payload["lemma"] in current.lemmas
            assert e.payload["origin"] == KeywordOrigin.INTERNAL_TEXT.value
    replayed = simulate_teacher(TeacherStrategy(TeacherKind.RANDOM, k=3, seed=9), split.train, articles)
    assert replayed == events


def test_adversarial_teacher_mislabels_other_class_words():
    split = synth_split(n_train=60)
    stats = fit(split.train).stats
    articles = select_teaching_articles(split.train, seed=2, per_class=2)
    events = simulate_teacher(TeacherStrategy(TeacherKind.ADVERSARIAL, k=2, seed=4), split.train, articles, stats)
    plain = oracle_train(split.train)
    own_words = {
        int(label): set(oracles.mi_positive_table(plain, int(label)))
        for label in ClassLabel
    }
    keyword_events = [e for e in events if e.kind is EventKind.KEYWORD]
    assert keyword_events
    for e in keyword_events:
        assert e.payload["origin"] == KeywordOrigin.EXTERNAL.value
        # taught lemma is positively associated with some class other than
        # the one it is being taught for
        taught_class = e.payload["class"]
        assert any(e.payload["lemma"] in own_words[c] for c in own_words if c != taught_class)


# --- benchmark -----------------------------------------------------------------------

def test_run_benchmark_grid_and_config():
    split = synth_split(n_train=60)
    articles = select_teaching_articles(split.train, seed=0, per_class=1)
    stats = fit(split.train).stats
    logs = {
        "best": simulate_teacher(TeacherStrategy(TeacherKind.ORACLE_MI, k=2, seed=0), split.train, articles, stats),
        "worst": simulate_teacher(TeacherStrategy(TeacherKind.ADVERSARIAL, k=2, seed=2), split.train, articles, stats),
        "all": [
            simulate_teacher(TeacherStrategy(TeacherKind.ORACLE_MI, k=2, seed=0), split.train, articles, stats),
            simulate_teacher(TeacherStrategy(TeacherKind.RANDOM, k=2, seed=1), split.train, articles, stats),
        ],
    }
    report = run_benchmark(split, logs, EMPTY_EMB, tau=0.2)
    assert set(report.rows) == {
        (variant, condition) for variant in NBVariant for condition in BenchmarkCondition
    }
    assert report.config["tau"] == 0.2
    assert report.config["train_docs"] == len(split.train)
    table = report.format_table()
    assert "Multinomial Naive Bayes" in table
    assert "all teachers merged" in table
    payload = report.to_dict()
    assert len(payload["rows"]) == 8
    assert {row["condition"] for row in payload["rows"]} == {c.value for c in BenchmarkCondition}
