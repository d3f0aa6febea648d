import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from teachable.pipeline import (
    PipelineConfig,
    POSTag,
    analyze,
    default_config,
    lemmatize,
    load_lemma_dictionary,
    load_stopwords,
    normalize,
    normalize_word,
    pos_tag,
    preprocess,
    remove_stopwords,
    tokenize,
)


def test_tokenize_splits_on_whitespace_and_punctuation():
    assert tokenize("Oil prices rose, again.") == ["Oil", "prices", "rose", ",", "again", "."]


def test_tokenize_keeps_internal_hyphens_and_apostrophes():
    assert tokenize("co-op don't") == ["co-op", "don't"]
    # leading/trailing joiners are their own tokens
    assert tokenize("-edge 'quote'") == ["-", "edge", "'", "quote", "'"]


def test_tokenize_handles_empty_and_whitespace_only():
    assert tokenize("") == []
    assert tokenize("   \n\t ") == []


def test_tokenize_unicode_apostrophe():
    assert tokenize("won’t") == ["won’t"]


@given(st.text(max_size=200))
@settings(max_examples=200, deadline=None)
def test_tokenize_total_and_preserves_nonspace_characters(text):
    tokens = tokenize(text)
    assert all(tokens)
    assert "".join(tokens) == "".join(text.split())


def test_normalize_lowercases():
    assert normalize(["NASA", "Mars"]) == ["nasa", "mars"]


def test_remove_stopwords_preserves_order():
    config = PipelineConfig(stopword_list=frozenset({"the", "a"}))
    assert remove_stopwords(["the", "oil", "a", "price"], config) == ["oil", "price"]


def test_stopword_validation():
    with pytest.raises(ValueError):
        PipelineConfig(stopword_list=frozenset({"The"}))
    with pytest.raises(ValueError):
        PipelineConfig(stopword_list=frozenset({"two words"}))


def test_suffix_rule_validation():
    with pytest.raises(ValueError):
        PipelineConfig(
            stopword_list=frozenset(),
            suffix_rules=((POSTag.NOUN, "s", "ses"),),
        )


def test_pos_tag_routes():
    assert pos_tag("won") is POSTag.VERB
    assert pos_tag("largest") is POSTag.ADJ
    assert pos_tag("quickly") is POSTag.ADV
    assert pos_tag("running") is POSTag.VERB
    assert pos_tag("exported") is POSTag.VERB
    assert pos_tag("famous") is POSTag.ADJ
    assert pos_tag("market") is POSTag.NOUN
    assert pos_tag("!") is POSTag.OTHER


def test_lemmatize_dictionary_wins_over_rules():
    config = PipelineConfig(
        stopword_list=frozenset(),
        lemma_dictionary={("mice", POSTag.NOUN): "mouse"},
        suffix_rules=((POSTag.NOUN, "s", ""),),
    )
    assert lemmatize("mice", config) == "mouse"
    assert lemmatize("markets", config) == "market"


def test_lemmatize_first_matching_rule_only():
    config = PipelineConfig(
        stopword_list=frozenset(),
        suffix_rules=((POSTag.NOUN, "ies", "y"), (POSTag.NOUN, "s", "")),
    )
    assert lemmatize("companies", config) == "company"


def test_lemmatize_respects_minimum_stem():
    config = PipelineConfig(stopword_list=frozenset(), suffix_rules=((POSTag.NOUN, "s", ""),))
    # stripping would leave one character, so the token is kept whole
    assert lemmatize("as", config) == "as"


def test_lemmatize_bundled_spot_checks():
    config = default_config()
    assert lemmatize("companies", config) == "company"
    assert lemmatize("exports", config) == "export"
    assert lemmatize("trading", config) == "trade" or lemmatize("trading", config) == "trad"


@given(st.text(alphabet=st.characters(whitelist_categories=("Ll",)), min_size=1, max_size=15))
@settings(max_examples=300, deadline=None)
def test_lemmatize_idempotent_on_default_config(word):
    config = default_config()
    once = lemmatize(word, config)
    assert lemmatize(once, config) == once


def test_analyze_drops_punctuation_and_stopwords():
    config = default_config()
    tokens = analyze("The oil markets, rising again!", config)
    lemmas = [t.lemma for t in tokens]
    assert "the" not in lemmas
    assert "," not in lemmas
    assert "oil" in lemmas
    assert "market" in lemmas


@given(st.text(max_size=120))
@settings(max_examples=200, deadline=None)
def test_analyze_never_emits_stopwords_or_empty_lemmas(text):
    config = default_config()
    for token in analyze(text, config):
        assert token.lemma
        assert token.lemma not in config.stopword_list
        assert any(ch.isalnum() for ch in token.surface)


def test_preprocess_counts_repeats():
    config = default_config()
    bag = preprocess("market markets marketing market", config)
    assert bag["market"] >= 3


def test_normalize_word_rejections_and_survival():
    config = default_config()
    assert normalize_word("Exports", config) == ["export"]
    assert normalize_word("the", config) == []
    assert normalize_word("???", config) == []
    assert normalize_word("", config) == []


def test_load_stopwords_comments_and_blanks(tmp_path):
    path = tmp_path / "stop.txt"
    path.write_text("# header\nthe\n\na  # trailing\n", encoding="utf-8")
    assert load_stopwords(path) == frozenset({"the", "a"})


def test_load_lemma_dictionary_rejects_bad_rows(tmp_path):
    path = tmp_path / "lemmas.tsv"
    path.write_text("mice\tnoun\n", encoding="utf-8")
    with pytest.raises(ValueError):
        load_lemma_dictionary(path)


def test_load_lemma_dictionary_parses(tmp_path):
    path = tmp_path / "lemmas.tsv"
    path.write_text("# comment\nmice\tnoun\tmouse\n\n", encoding="utf-8")
    mapping = load_lemma_dictionary(path)
    assert mapping[("mice", POSTag.NOUN)] == "mouse"
