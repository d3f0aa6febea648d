#!/usr/bin/env python3
"""Generate the bundled corpus and embedding fixtures.

Seeded synthetic news-style data in the exact CSV wire format the corpus
loader consumes, plus a 50-dimensional embedding file covering the
corpus vocabulary with topic-cluster structure (same-topic lemmas are
cosine-similar, cross-topic lemmas are not). Rerunning the script
reproduces the committed fixtures byte for byte and prints the sanity
metrics used to pin the regression constants in the test suite.

Usage: python3 scripts/make_fixtures.py [--check-only]
"""

from __future__ import annotations

import argparse
import random
import sys
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent
DATA = ROOT / "src" / "teachable" / "data"

SEED = 20240816
TRAIN_PER_CLASS = 2000
TEST_PER_CLASS = 500
EMBED_DIM = 50
BLOCK = 6  # dims per topic block; remaining dims hold shared directions

# ---------------------------------------------------------------------------
# vocabulary
# ---------------------------------------------------------------------------

WORLD = """
minister embassy treaty border election parliament president rebel ceasefire
diplomat sanction summit regime militia refugee coup protest violence hostage
airstrike troop envoy insurgent asylum dictator referendum coalition warhead
tribunal delegation monarchy uprising blockade cabinet constitution junta
negotiation sovereignty extradition consulate detainee warlord frontier
annexation genocide peacekeeper emissary armistice judiciary premier
ambassador separatist dissident crackdown clashes curfew mediator
humanitarian enclave province governor unrest mosque kurdish baghdad
kabul gaza
""".split()

SPORTS = """
football coach stadium tournament goalkeeper striker playoff inning homer
quarterback touchdown referee midfielder penalty champion league medal
olympics sprinter marathon batsman wicket umpire dugout fastball slugger
shortstop linebacker podium relay qualifier semifinal heavyweight knockout
racquet volley birdie fairway bogey derby fixture winger defender bullpen
outfielder pitcher catcher kickoff halftime scrum tryout grandstand gymnast
skater freestyle butterfly backstroke hurdles javelin decathlon standings
roster playoffs preseason cornerback fullback
""".split()

BUSINESS = """
market profit shares investor merger dividend earnings revenue stock
brokerage takeover bankruptcy regulator inflation tariff shareholder
quarterly forecast acquisition startup bond hedge portfolio commodity
futures nasdaq retailer wholesale audit ledger equity valuation creditor
debtor insurer premium pension payroll subsidiary antitrust cartel monopoly
buyout downturn rebound stimulus lender mortgage refinance liquidity
solvency turnover markup procurement invoice surplus deficit broker trader
conglomerate outsourcing stockholder underwriter
""".split()

SCITECH = """
software rocket chip browser processor satellite telescope genome laser
robot algorithm server database encryption malware spacecraft asteroid orbit
quantum silicon broadband wireless firmware kernel compiler pixel sensor
drone neuron enzyme molecule fossil supernova galaxy photon reactor turbine
vaccine microchip mainframe peripheral bandwidth firewall spam gadget
circuit motherboard modem router protocol developer prototype probe lander
rover telemetry spectrometer antenna capsule propulsion payload astronomer
physicist biologist nanotube
""".split()

# confusable words shared between exactly two topics, used by both
OVERLAP = {
    (1, 3): "oil trade currency export embargo crude opec barrel".split(),
    (1, 4): "missile nuclear weapon radar drone surveillance".split(),
    (1, 2): "doping boycott anthem bid host federation".split(),
    (2, 3): "sponsor contract franchise salary endorsement ticket".split(),
    (3, 4): "telecom patent semiconductor chipmaker outage subscriber".split(),
    (2, 4): "analytics biometric replay scoreboard headset".split(),
}

# class-neutral news vocabulary (verbs, quantities, reporting words)
SHARED = """
say announce report official week year percent million billion group plan
deal talk leader meeting decision statement issue record rise fall gain
drop move start end return face seek claim reveal confirm deny expect warn
urge call push open close cut boost surge slump target source analyst
chief executive spokesman agency country city state nation world people
month day time way part number result effort member question problem
company firm industry sector growth loss cost price rate level share term
agreement dispute crisis pressure support concern news update review
monday tuesday wednesday thursday friday weekend
""".split()

NUMBERS = "2003 2004 10 12 15 20 25 30 40 50 100 200 500".split()

TICKER_TAGS = ["(Reuters)", "(AP)", "(AFP)", "(USATODAY.com)", "(SPACE.com)"]
WIRE_LEADS = ["Reuters - ", "AP - ", "AFP - ", ""]

# function words woven between content words; all are pipeline stopwords
FUNCTION_WORDS = """
the a an of to in on for with at by from and as after over under against
between during before is was has have will would its their his her this
that these those it he she they
""".split()

# document difficulty profiles: (own, overlap, other-class, shared)
PROFILES = {
    "easy": (0.27, 0.09, 0.06, 0.58),
    "medium": (0.15, 0.12, 0.11, 0.62),
    "hard": (0.06, 0.13, 0.18, 0.63),
}
PROFILE_WEIGHTS = {"easy": 0.27, "medium": 0.40, "hard": 0.33}

# chance a drawn own-topic word is immediately repeated (word burstiness)
BURST = 0.35

# frequency skew inside each lexicon; higher concentrates mass on head words
OWN_ZIPF = 1.1
SHARED_ZIPF = 0.7

# vocabulary drift: the first HEAD_FRACTION of each topic lexicon appears in
# training articles; test articles draw topic words from the held-out tail
# with probability TAIL_TEST. Tail words are invisible to the corpus model
# but live in the same embedding cluster as the head, so taught keywords
# still reach them through cosine similarity. A DRIFTED_DOC_RATE slice of
# test articles is written almost entirely in tail vocabulary for its own
# topic while its cross-topic words stay head (corpus-visible) and come
# from one fixed wrong class per document: the corpus model gets pulled
# toward that class, and only keyword evidence can pull back.
HEAD_FRACTION = 0.62
TAIL_TEST = 0.10
DRIFTED_DOC_RATE = 0.12
DRIFTED_TAIL = 0.97
DRIFTED_PROFILE = (0.42, 0.04, 0.14, 0.40)


def zipf_weights(n: int, exponent: float = 0.7) -> list[float]:
    return [1.0 / (i + 1) ** exponent for i in range(n)]


def build_lexicons():
    """Pipeline-normalize the word lists and drop lemma collisions."""
    from teachable.pipeline import default_config, normalize_word

    config = default_config()
    seen: dict[str, str] = {}

    def normalize_list(words, group):
        out = []
        for word in words:
            lemmas = normalize_word(word, config)
            if not lemmas:
                print(f"  [vocab] {word!r} ({group}) is stopword-only, dropped", file=sys.stderr)
                continue
            lemma = lemmas[0]
            if lemma in seen:
                if seen[lemma] != group:
                    print(
                        f"  [vocab] {word!r} ({group}) collides with {seen[lemma]} "
                        f"on lemma {lemma!r}, dropped",
                        file=sys.stderr,
                    )
                continue
            seen[lemma] = group
            out.append(word)
        return out

    topical = {
        1: normalize_list(WORLD, "world"),
        2: normalize_list(SPORTS, "sports"),
        3: normalize_list(BUSINESS, "business"),
        4: normalize_list(SCITECH, "scitech"),
    }
    overlap = {
        pair: normalize_list(words, f"overlap{pair}") for pair, words in OVERLAP.items()
    }
    shared = normalize_list(SHARED + NUMBERS, "shared")
    return topical, overlap, shared, config


def make_sentence(rng: random.Random, words: list[str]) -> str:
    toks: list[str] = []
    for word in words:
        if rng.random() < 0.55:
            toks.append(rng.choice(FUNCTION_WORDS))
        toks.append(word)
    if len(toks) >= 8 and rng.random() < 0.35:
        toks.insert(rng.randrange(3, len(toks) - 2), ",")
    text = " ".join(toks).replace(" ,", ",")
    return text[0].upper() + text[1:] + "."


def _head(words: list[str]) -> list[str]:
    return words[: max(1, int(len(words) * HEAD_FRACTION))]


def _tail(words: list[str]) -> list[str]:
    return words[max(1, int(len(words) * HEAD_FRACTION)) :]


def draw_words(rng, n, label, topical, overlap_pools, shared, weights, tail_prob,
               contam_tail_prob=None, contam_label=None):
    p_own, p_overlap, p_other, p_shared = weights
    shared_zipf = zipf_weights(len(shared), SHARED_ZIPF)
    overlap_pool = overlap_pools[label]
    if contam_tail_prob is None:
        contam_tail_prob = tail_prob

    def topic_word(topic: int, tp: float) -> str:
        tail = _tail(topical[topic])
        if tail and rng.random() < tp:
            return rng.choice(tail)
        pool = _head(topical[topic])
        return rng.choices(pool, weights=zipf_weights(len(pool), OWN_ZIPF))[0]

    out = []
    for _ in range(n):
        r = rng.random()
        if r < p_own:
            word = topic_word(label, tail_prob)
            out.append(word)
            if rng.random() < BURST:
                out.append(word)
        elif r < p_own + p_overlap and overlap_pool:
            out.append(rng.choice(overlap_pool))
        elif r < p_own + p_overlap + p_other:
            other = contam_label or rng.choice([c for c in (1, 2, 3, 4) if c != label])
            out.append(topic_word(other, contam_tail_prob))
        else:
            out.append(rng.choices(shared, weights=shared_zipf)[0])
    return out


def make_doc(rng, label, topical, overlap_pools, shared, which):
    tail_prob = TAIL_TEST if which == "test" else 0.0
    contam_tail = None
    contam_label = None
    drifted = which == "test" and rng.random() < DRIFTED_DOC_RATE
    if drifted:
        weights = DRIFTED_PROFILE
        tail_prob = DRIFTED_TAIL
        contam_tail = 0.0
        contam_label = rng.choice([c for c in (1, 2, 3, 4) if c != label])
    else:
        profile = rng.choices(list(PROFILE_WEIGHTS), weights=list(PROFILE_WEIGHTS.values()))[0]
        weights = PROFILES[profile]
    title_words = draw_words(
        rng, rng.randint(3, 5), label, topical, overlap_pools, shared, weights, tail_prob,
        contam_tail, contam_label,
    )
    title = " ".join(w.capitalize() for w in title_words)
    if rng.random() < 0.18:
        title += " " + rng.choice(TICKER_TAGS)
    n_body = rng.randint(12, 24)
    body_words = draw_words(
        rng, n_body, label, topical, overlap_pools, shared, weights, tail_prob,
        contam_tail, contam_label,
    )
    sentences = []
    start = 0
    while start < len(body_words):
        step = rng.randint(7, 12)
        chunk = body_words[start : start + step]
        if chunk:
            sentences.append(make_sentence(rng, chunk))
        start += step
    body = rng.choice(WIRE_LEADS) + " ".join(sentences)
    return title, body, drifted


def generate_corpus(topical, overlap, shared):
    """Returns (train_rows, test_rows, drifted_test_indices)."""
    rng = random.Random(SEED)
    overlap_pools = {
        c: [w for pair, words in overlap.items() if c in pair for w in words]
        for c in (1, 2, 3, 4)
    }

    def rows(per_class, which):
        generated = {
            label: [
                make_doc(rng, label, topical, overlap_pools, shared, which)
                for _ in range(per_class)
            ]
            for label in (1, 2, 3, 4)
        }
        out = []
        drifted_rows = []
        for i in range(per_class):
            for label in (1, 2, 3, 4):
                title, body, drifted = generated[label][i]
                if drifted:
                    drifted_rows.append(len(out))
                out.append((label, title, body))
        return out, drifted_rows

    train_rows, _ = rows(TRAIN_PER_CLASS, "train")
    test_rows, drifted_test = rows(TEST_PER_CLASS, "test")
    return train_rows, test_rows, drifted_test


def write_corpus(train_rows, test_rows):
    import csv

    corpus_dir = DATA / "corpus"
    corpus_dir.mkdir(parents=True, exist_ok=True)
    for rows, name in ((train_rows, "train.csv"), (test_rows, "test.csv")):
        with open(corpus_dir / name, "w", encoding="utf-8", newline="") as fh:
            writer = csv.writer(fh, quoting=csv.QUOTE_NONNUMERIC)
            for label, title, body in rows:
                writer.writerow([label, title, body])
    print(f"wrote {corpus_dir}/train.csv ({len(train_rows)} rows), "
          f"test.csv ({len(test_rows)} rows)")


def build_embeddings(topical, overlap, shared, config):
    """Topic-cluster embeddings over the fixture vocabulary's lemmas."""
    from teachable.pipeline import normalize_word

    rng = np.random.default_rng(SEED)

    def centroid(label: int) -> np.ndarray:
        v = np.zeros(EMBED_DIM)
        v[(label - 1) * BLOCK : label * BLOCK] = 1.0 / np.sqrt(BLOCK)
        return v

    def block_jitter(labels) -> np.ndarray:
        v = np.zeros(EMBED_DIM)
        for label in labels:
            sl = slice((label - 1) * BLOCK, label * BLOCK)
            v[sl] = rng.normal(0.0, 1.0, BLOCK)
        norm = np.linalg.norm(v)
        return v / norm if norm else v

    def tail_vector() -> np.ndarray:
        v = np.zeros(EMBED_DIM)
        v[4 * BLOCK :] = rng.normal(0.0, 1.0, EMBED_DIM - 4 * BLOCK)
        return v / np.linalg.norm(v)

    # tail mixing is kept small so topic vectors stay near-orthogonal to the
    # shared-word subspace; otherwise common words spuriously match taught
    # keywords at the default threshold and wash keyword evidence in noise
    tail_mix = 0.3
    block_weight = float(np.sqrt(1.0 - tail_mix**2))

    def topic_vector(labels) -> np.ndarray:
        base = sum((centroid(c) for c in labels), np.zeros(EMBED_DIM))
        base /= np.linalg.norm(base)
        u = base + 0.35 * block_jitter(labels)
        u /= np.linalg.norm(u)
        return block_weight * u + tail_mix * tail_vector()

    vectors: dict[str, np.ndarray] = {}

    def lemma_of(word: str) -> str:
        return normalize_word(word, config)[0]

    for label, words in topical.items():
        for word in words:
            vectors[lemma_of(word)] = topic_vector([label])
    for pair, words in overlap.items():
        for word in words:
            vectors[lemma_of(word)] = topic_vector(list(pair))
    # hold a deterministic slice of shared vocabulary out as OOV
    for index, word in enumerate(shared):
        if index % 17 == 3:
            continue
        vectors[lemma_of(word)] = tail_vector()
    return vectors


def write_embeddings(vectors: dict[str, np.ndarray]):
    from teachable.embeddings import EmbeddingStore, save_text_embeddings

    store = EmbeddingStore(
        dimension=EMBED_DIM,
        vectors={w: np.round(v, 6) for w, v in sorted(vectors.items())},
    )
    path = DATA / "embeddings_50d.txt"
    save_text_embeddings(store, path)
    print(f"wrote {path} ({len(vectors)} words, {EMBED_DIM} dims)")


def sanity_report():
    from teachable.bayes import NBVariant, fit
    from teachable.corpus import load_ag_news, preprocess_corpus
    from teachable.embeddings import load_text_embeddings
    from teachable.evaluation import (
        TeacherKind,
        TeacherStrategy,
        epoch_curve,
        evaluate,
        select_teaching_articles,
        simulate_teacher,
    )
    from teachable.learner import PredictionMode, merge_stores
    from teachable.events import replay_store
    from teachable.pipeline import default_config

    from teachable.embeddings import DEFAULT_TAU

    split = preprocess_corpus(
        load_ag_news(DATA / "corpus" / "train.csv", DATA / "corpus" / "test.csv"),
        default_config(),
    )
    embeddings = load_text_embeddings(DATA / "embeddings_50d.txt")
    tau = DEFAULT_TAU

    multinomial = fit(split.train, variant=NBVariant.MULTINOMIAL)
    bernoulli = fit(split.train, variant=NBVariant.BERNOULLI)
    m_f1 = evaluate(split.test, PredictionMode.BASELINE, base_model=multinomial).macro_f1
    b_f1 = evaluate(split.test, PredictionMode.BASELINE, base_model=bernoulli).macro_f1
    print(f"baseline multinomial macro F1: {m_f1!r}")
    print(f"baseline bernoulli   macro F1: {b_f1!r}")

    teaching = select_teaching_articles(split.train, seed=0, per_class=5)
    stats = multinomial.stats
    oracle = simulate_teacher(TeacherStrategy(TeacherKind.ORACLE_MI, k=3, seed=0), split.train, teaching, stats)
    rand = simulate_teacher(TeacherStrategy(TeacherKind.RANDOM, k=3, seed=1), split.train, teaching, stats)
    advs = [
        simulate_teacher(TeacherStrategy(TeacherKind.ADVERSARIAL, k=3, seed=2 + i), split.train, teaching, stats)
        for i in range(3)
    ]

    curve = epoch_curve(oracle, split.test, PredictionMode.KEYWORDS_ONLY, embeddings, tau)
    f1s = [p.metrics.macro_f1 for p in curve]
    xs = np.arange(1, len(f1s) + 1)
    slope = float(np.polyfit(xs, np.array(f1s), 1)[0])
    print(f"oracle keywords-only curve: first={f1s[0]:.4f} final={f1s[-1]!r} slope={slope:.5f}")
    print("  points:", " ".join(f"{v:.3f}" for v in f1s))

    oracle_store = replay_store(oracle)
    adv_store = replay_store(advs[0])
    merged = merge_stores([oracle_store, replay_store(rand), *(replay_store(a) for a in advs)])
    from teachable.corpus import ClassLabel

    sizes = {c.display_name: len(oracle_store.relevant_set(c)) for c in ClassLabel}
    print(f"oracle store relevant sizes: {sizes}")
    comb = lambda store: evaluate(split.test, PredictionMode.COMBINED, store, embeddings, tau, multinomial).macro_f1
    oracle_comb = comb(oracle_store)
    adv_comb = comb(adv_store)
    merged_comb = comb(merged)
    print(f"combined oracle={oracle_comb!r} adversarial={adv_comb!r} merged={merged_comb!r}")
    print(f"orderings: oracle>=base {oracle_comb >= m_f1}, adv<=base {adv_comb <= m_f1}, "
          f"merged<oracle {merged_comb < oracle_comb}")
    print(f"curve positive slope: {slope > 0}, final>=0.45: {f1s[-1] >= 0.45}")


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--check-only", action="store_true", help="skip regeneration, just report")
    parser.add_argument("--drift-index", default=None,
                        help="also dump drifted test-row indices as JSON (diagnostics)")
    args = parser.parse_args()
    if not args.check_only:
        print("building lexicons...")
        topical, overlap, shared, config = build_lexicons()
        print("generating corpus...")
        train_rows, test_rows, drifted_test = generate_corpus(topical, overlap, shared)
        write_corpus(train_rows, test_rows)
        if args.drift_index:
            import json

            Path(args.drift_index).write_text(json.dumps(drifted_test), encoding="utf-8")
            print(f"wrote {args.drift_index} ({len(drifted_test)} drifted test rows)")
        print("building embeddings...")
        write_embeddings(build_embeddings(topical, overlap, shared, config))
    print("sanity report:")
    sanity_report()


if __name__ == "__main__":
    main()
