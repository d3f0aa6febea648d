"""Independent brute-force evaluators used to cross-check the package.

Everything here is written from the underlying definitions using only the
standard library (math, collections) — no numpy, no imports from the
package under test — so agreement between these and the real
implementations is evidence, not tautology. Inputs are plain python
structures:

* a training corpus is a list of ``(label, counts)`` pairs with integer
  labels 1..4 and ``counts`` a dict word -> int;
* a document is a dict word -> int;
* embeddings are a dict word -> list[float];
* a keyword store is an ordered list of ``(lemma, label, polarity)``
  with polarity "relevant"/"irrelevant"; later entries win per
  (lemma, label).

Keep this module boring and obvious; cleverness here would defeat its
purpose.
"""

from __future__ import annotations

import math
from collections import Counter

LABELS = (1, 2, 3, 4)


# ---------------------------------------------------------------------------
# vector math
# ---------------------------------------------------------------------------

def cosine(a: list[float], b: list[float]) -> float:
    if len(a) != len(b):
        raise ValueError("dimension mismatch")
    dot = math.fsum(x * y for x, y in zip(a, b))
    na = math.sqrt(math.fsum(x * x for x in a))
    nb = math.sqrt(math.fsum(y * y for y in b))
    if na == 0.0 or nb == 0.0:
        raise ValueError("cosine undefined for zero vectors")
    return max(-1.0, min(1.0, dot / (na * nb)))


def similar_count(word, keyword_set, embeddings, tau) -> int:
    """Keywords equal to the word always count; the rest need vectors."""
    tau = min(tau, 1.0)
    n = 0
    for kw in keyword_set:
        if kw == word:
            n += 1
        elif word in embeddings and kw in embeddings:
            if cosine(embeddings[word], embeddings[kw]) >= tau:
                n += 1
    return n


# ---------------------------------------------------------------------------
# keyword store semantics
# ---------------------------------------------------------------------------

def polarity_sets(records, label):
    """(relevant, irrelevant) frozensets for one class; last record wins."""
    latest = {}
    for lemma, cls, polarity in records:
        if cls == label:
            latest[lemma] = polarity
    relevant = frozenset(w for w, p in latest.items() if p == "relevant")
    irrelevant = frozenset(w for w, p in latest.items() if p == "irrelevant")
    return relevant, irrelevant


def keyword_likelihood(records, embeddings, tau, word, label, s=0.5):
    relevant, _ = polarity_sets(records, label)
    count = similar_count(word, relevant, embeddings, tau)
    return (count + s) / (len(relevant) + 2 * s)


# ---------------------------------------------------------------------------
# the four scoring routes
# ---------------------------------------------------------------------------

def multinomial_log_scores(train, doc, alpha=1.0):
    """Laplace-smoothed multinomial NB; every token scores, seen or not."""
    token_counts = {c: Counter() for c in LABELS}
    doc_counts = {c: 0 for c in LABELS}
    vocab = set()
    for label, counts in train:
        doc_counts[label] += 1
        for word, n in counts.items():
            token_counts[label][word] += n
            vocab.add(word)
    n_docs = sum(doc_counts.values())
    scores = {}
    for c in LABELS:
        total = sum(token_counts[c].values())
        score = math.log(doc_counts[c] / n_docs)
        for word, n in doc.items():
            p = (token_counts[c].get(word, 0) + alpha) / (total + alpha * len(vocab))
            score += n * math.log(p)
        scores[c] = score
    return scores


def bernoulli_log_scores(train, doc, alpha=1.0):
    """Presence-only Bernoulli NB restricted to the training vocabulary."""
    doc_frequency = {c: Counter() for c in LABELS}
    doc_counts = {c: 0 for c in LABELS}
    vocab = set()
    for label, counts in train:
        doc_counts[label] += 1
        for word in counts:
            doc_frequency[label][word] += 1
            vocab.add(word)
    n_docs = sum(doc_counts.values())
    scores = {}
    for c in LABELS:
        score = math.log(doc_counts[c] / n_docs)
        for word in set(doc) & vocab:
            p = (doc_frequency[c].get(word, 0) + alpha) / (doc_counts[c] + 2 * alpha)
            score += math.log(p)
        scores[c] = score
    return scores


def _keyword_adjustment(records, embeddings, tau, doc, label, s=0.5):
    relevant, irrelevant = polarity_sets(records, label)
    adjustment = 0.0
    for word, n in doc.items():
        if similar_count(word, irrelevant, embeddings, tau) > 0:
            continue
        factor = (similar_count(word, relevant, embeddings, tau) + s) / (len(relevant) + 2 * s)
        adjustment += n * math.log(factor)
    return adjustment


def keywords_only_log_scores(records, embeddings, tau, doc, priors=None, s=0.5):
    if priors is None:
        priors = {c: 1.0 / len(LABELS) for c in LABELS}
    return {
        c: math.log(priors[c]) + _keyword_adjustment(records, embeddings, tau, doc, c, s)
        for c in LABELS
    }


def combined_log_scores(train, records, embeddings, tau, doc, alpha=1.0, s=0.5):
    scores = multinomial_log_scores(train, doc, alpha)
    if all(not polarity_sets(records, c)[0] for c in LABELS):
        return scores
    return {
        c: scores[c] + _keyword_adjustment(records, embeddings, tau, doc, c, s)
        for c in LABELS
    }


def argmax(scores) -> int:
    """Highest score, ties to the lowest class code."""
    best, best_score = None, -math.inf
    for c in sorted(scores):
        if scores[c] > best_score:
            best, best_score = c, scores[c]
    return best


# ---------------------------------------------------------------------------
# evaluation metrics
# ---------------------------------------------------------------------------

def macro_metrics(pairs):
    """pairs: iterable of (predicted, gold) ints -> (precision, recall, f1)."""
    pairs = list(pairs)
    per_p, per_r, per_f = {}, {}, {}
    for c in LABELS:
        tp = sum(1 for p, g in pairs if p == c and g == c)
        pred = sum(1 for p, _ in pairs if p == c)
        gold = sum(1 for _, g in pairs if g == c)
        p = tp / pred if pred else 0.0
        r = tp / gold if gold else 0.0
        per_p[c] = p
        per_r[c] = r
        per_f[c] = 2 * p * r / (p + r) if p + r else 0.0
    n = len(LABELS)
    return (
        sum(per_p.values()) / n,
        sum(per_r.values()) / n,
        sum(per_f.values()) / n,
    )


# ---------------------------------------------------------------------------
# mutual information (teacher oracle)
# ---------------------------------------------------------------------------

def mi_positive_table(train, label):
    """MI of each word's presence with [class == label], positive side only.

    Words whose presence rate in the class does not exceed the rate outside
    it are omitted: teaching such a word as relevant would invert its
    meaning.
    """
    df_class = Counter()
    df_rest = Counter()
    n_class = 0
    n_rest = 0
    for lbl, counts in train:
        if lbl == label:
            n_class += 1
            for word in counts:
                df_class[word] += 1
        else:
            n_rest += 1
            for word in counts:
                df_rest[word] += 1
    n_total = n_class + n_rest
    table = {}
    for word in set(df_class) | set(df_rest):
        a = df_class.get(word, 0)          # in class, has word
        b = df_rest.get(word, 0)           # out of class, has word
        if a * n_rest <= b * n_class:      # not positively associated
            continue
        cells = (
            (a, a + b, n_class),
            (b, a + b, n_rest),
            (n_class - a, n_total - a - b, n_class),
            (n_rest - b, n_total - a - b, n_rest),
        )
        mi = 0.0
        for joint, n_w, n_c in cells:
            if joint > 0:
                mi += (joint / n_total) * math.log(joint * n_total / (n_w * n_c))
        table[word] = mi
    return table


def top_k_mi(candidates, table, k):
    scored = sorted(
        ((w, table[w]) for w in set(candidates) if w in table),
        key=lambda item: (-item[1], item[0]),
    )
    return [w for w, _ in scored[:k]]
