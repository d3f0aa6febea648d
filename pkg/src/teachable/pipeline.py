"""Deterministic text preprocessing: tokenize, lowercase, drop stopwords, lemmatize.

The stages compose into :func:`preprocess`, which turns raw article text into
the bag of lemmas every other component (classifier, keyword store, teachers)
operates on. Everything here is a pure function over an immutable
:class:`PipelineConfig`, so concurrent use needs no locking.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from importlib.resources import as_file, files


class POSTag(str, Enum):
    NOUN = "noun"
    VERB = "verb"
    ADJ = "adj"
    ADV = "adv"
    OTHER = "other"


@dataclass(frozen=True)
class Token:
    """One surface token with its assigned tag and lemma."""

    surface: str
    lemma: str
    pos_tag: POSTag


@dataclass(frozen=True)
class PipelineConfig:
    """Immutable preprocessing configuration.

    ``suffix_rules`` is an ordered list of ``(pos, suffix, replacement)``
    triples; the first rule whose POS and suffix match is applied, at most
    once. Replacements never lengthen a token, so rule application
    terminates.
    """

    stopword_list: frozenset[str]
    lemma_dictionary: dict[tuple[str, POSTag], str] = field(default_factory=dict)
    suffix_rules: tuple[tuple[POSTag, str, str], ...] = ()

    def __post_init__(self) -> None:
        for word in self.stopword_list:
            if word != word.lower() or any(ch.isspace() for ch in word):
                raise ValueError(f"stopword {word!r} must be lowercase with no whitespace")
        for pos, suffix, replacement in self.suffix_rules:
            if len(replacement) > len(suffix):
                raise ValueError(f"suffix rule {suffix!r}->{replacement!r} would lengthen tokens")


# Characters kept inside a word when flanked by alphanumerics on both sides.
_INTERNAL_JOINERS = {"-", "'", "’"}

# Minimum characters a lemma may shrink to via a suffix rule.
_MIN_STEM = 2


def tokenize(text: str) -> list[str]:
    """Split text into surface tokens.

    Whitespace separates chunks; within a chunk every non-alphanumeric
    character becomes its own token, except hyphens and apostrophes
    sandwiched between alphanumerics ("co-op", "don't" stay whole).
    Total function: any string, including empty, is accepted.
    """
    tokens: list[str] = []
    for chunk in text.split():
        word_start: int | None = None
        for i, ch in enumerate(chunk):
            joiner = (
                ch in _INTERNAL_JOINERS
                and 0 < i < len(chunk) - 1
                and chunk[i - 1].isalnum()
                and chunk[i + 1].isalnum()
            )
            if ch.isalnum() or joiner:
                if word_start is None:
                    word_start = i
            else:
                if word_start is not None:
                    tokens.append(chunk[word_start:i])
                    word_start = None
                tokens.append(ch)
        if word_start is not None:
            tokens.append(chunk[word_start:])
    return tokens


def normalize(tokens: list[str]) -> list[str]:
    """Lowercase every surface with the default Unicode case mapping."""
    return [t.lower() for t in tokens]


def remove_stopwords(tokens: list[str], config: PipelineConfig) -> list[str]:
    """Drop tokens whose surface is in the stopword list; order preserved."""
    return [t for t in tokens if t not in config.stopword_list]


_ADV_LEXICON = frozenset({
    "soon", "often", "always", "never", "already", "together", "abroad",
    "ahead", "away", "back", "forward", "overseas", "worldwide", "yesterday",
    "today", "tomorrow",
})

_VERB_LEXICON = frozenset({
    "said", "went", "made", "took", "got", "won", "lost", "sold", "bought",
    "paid", "met", "held", "led", "left", "kept", "felt", "found", "began",
    "begun", "rose", "risen", "fell", "fallen", "grew", "grown", "drew",
    "drawn", "ran", "came", "gave", "given", "knew", "known", "saw", "seen",
    "sent", "spent", "built", "told", "thought", "brought", "caught",
    "taught", "heard", "meant", "stood", "struck", "threw", "thrown",
    "wrote", "written", "broke", "broken", "chose", "chosen", "spoke",
    "spoken", "drove", "driven", "flew", "flown", "laid", "shot", "sought",
    "fought", "beaten", "became", "taken", "gone", "hid", "hidden", "bitten",
    "forgot", "forgotten", "understood", "withdrew", "withdrawn", "overcame",
    "underwent", "arose", "beat", "put", "set", "cut", "hit",
})

_ADJ_LEXICON = frozenset({
    "better", "best", "worse", "worst", "larger", "largest", "bigger",
    "biggest", "smaller", "smallest", "higher", "highest", "lower", "lowest",
    "stronger", "strongest", "greater", "greatest", "faster", "fastest",
    "slower", "slowest", "earlier", "earliest", "later", "latest", "newer",
    "newest", "older", "oldest", "cheaper", "cheapest", "richer", "richest",
    "safer", "safest", "wider", "widest", "deeper", "deepest", "longer",
    "longest", "shorter", "shortest",
})

_ADJ_SUFFIXES = ("ous", "ful", "ive", "able", "ible", "ish")


def pos_tag(surface: str) -> POSTag:
    """Coarse POS for lemmatization routing: lexicon + suffix heuristics.

    Defaults to noun; lemmatization only needs enough precision to pick the
    right suffix rules, not a real tagger.
    """
    if not any(ch.isalnum() for ch in surface):
        return POSTag.OTHER
    if surface in _VERB_LEXICON:
        return POSTag.VERB
    if surface in _ADJ_LEXICON:
        return POSTag.ADJ
    if surface in _ADV_LEXICON or (len(surface) > 4 and surface.endswith("ly")):
        return POSTag.ADV
    if len(surface) >= 5 and surface.endswith("ing"):
        return POSTag.VERB
    if len(surface) >= 4 and surface.endswith("ed"):
        return POSTag.VERB
    if surface.endswith(_ADJ_SUFFIXES) or (len(surface) >= 5 and surface.endswith("est")):
        return POSTag.ADJ
    return POSTag.NOUN


def lemmatize(token: str, config: PipelineConfig, pos: POSTag | None = None) -> str:
    """Lemmatize one normalized token.

    Dictionary lookup wins; otherwise the first matching suffix rule for the
    token's POS applies once; otherwise the token is its own lemma. Unknown
    or OTHER POS is treated as noun. Idempotent.
    """
    if pos is None:
        pos = pos_tag(token)
    if pos is POSTag.OTHER:
        pos = POSTag.NOUN
    hit = config.lemma_dictionary.get((token, pos))
    if hit is not None:
        return hit
    for rule_pos, suffix, replacement in config.suffix_rules:
        if rule_pos is not pos or not token.endswith(suffix):
            continue
        stem = token[: len(token) - len(suffix)] + replacement
        if len(stem) >= _MIN_STEM:
            return stem
        return token
    return token


def analyze(text: str, config: PipelineConfig) -> list[Token]:
    """Run the full pipeline, keeping per-token detail.

    Stopwords are dropped on the surface form, then again on lemmas so the
    no-stopword-survives invariant holds even for configs whose stopword
    list is not closed under the lemmatizer (the bundled one is).
    """
    out: list[Token] = []
    for surface in remove_stopwords(normalize(tokenize(text)), config):
        if not any(ch.isalnum() for ch in surface):
            continue
        pos = pos_tag(surface)
        lemma = lemmatize(surface, config, pos)
        if lemma in config.stopword_list:
            continue
        out.append(Token(surface=surface, lemma=lemma, pos_tag=pos))
    return out


def preprocess(text: str, config: PipelineConfig) -> Counter[str]:
    """Raw text to a multiset of lemmas (counts kept for multinomial models)."""
    return Counter(tok.lemma for tok in analyze(text, config))


def normalize_word(raw_word: str, config: PipelineConfig) -> list[str]:
    """Pipeline-normalize a word (or short phrase) into surviving lemmas.

    Returns an empty list when nothing survives (stopword-only or
    punctuation-only input), which callers treat as a rejection.
    """
    return [tok.lemma for tok in analyze(raw_word, config)]


_COMMENT_RE = re.compile(r"#.*$")


def load_stopwords(path) -> frozenset[str]:
    """Stopword file: UTF-8, one word per line, ``#`` comments allowed."""
    words = set()
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            word = _COMMENT_RE.sub("", line).strip()
            if word:
                words.add(word)
    return frozenset(words)


def load_lemma_dictionary(path) -> dict[tuple[str, POSTag], str]:
    """Lemma dictionary file: UTF-8 TSV ``surface<TAB>pos<TAB>lemma``."""
    mapping: dict[tuple[str, POSTag], str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise ValueError(f"{path}:{lineno}: expected 3 tab-separated fields")
            surface, pos, lemma = parts
            mapping[(surface, POSTag(pos))] = lemma
    return mapping


def default_suffix_rules() -> tuple[tuple[POSTag, str, str], ...]:
    """Ordered regular-inflection rules; guards are no-op self rules."""
    N, V, J = POSTag.NOUN, POSTag.VERB, POSTag.ADJ
    return (
        (N, "ies", "y"),
        (N, "ss", "ss"),
        (N, "us", "us"),
        (N, "is", "is"),
        (N, "xes", "x"),
        (N, "zes", "z"),
        (N, "ches", "ch"),
        (N, "shes", "sh"),
        (N, "oes", "o"),
        (N, "ses", "se"),
        (N, "s", ""),
        (V, "ied", "y"),
        (V, "ies", "y"),
        (V, "ying", "y"),
        (V, "ing", ""),
        (V, "eed", "ee"),
        (V, "ed", ""),
        (V, "ches", "ch"),
        (V, "shes", "sh"),
        (V, "sses", "ss"),
        (V, "xes", "x"),
        (V, "oes", "o"),
        (V, "es", "e"),
        (V, "s", ""),
        (J, "iest", "y"),
        (J, "ier", "y"),
        (J, "est", ""),
        (J, "er", ""),
    )


@lru_cache(maxsize=1)
def default_config() -> PipelineConfig:
    """The bundled configuration (stopwords + lemma dictionary data files)."""
    data = files("teachable").joinpath("data")
    with as_file(data.joinpath("stopwords.txt")) as sw, as_file(data.joinpath("lemma_dict.tsv")) as ld:
        return PipelineConfig(
            stopword_list=load_stopwords(sw),
            lemma_dictionary=load_lemma_dictionary(ld),
            suffix_rules=default_suffix_rules(),
        )
