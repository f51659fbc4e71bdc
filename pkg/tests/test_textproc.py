from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from svlink.hashing import fnv1a64, fnv1a64_hex
from svlink.textproc import (
    HASH_DIMENSION,
    EmptyCorpus,
    LanguageTag,
    TermVector,
    cosine,
    detect_language,
    embed,
    feature_id,
    fit_vectorizer,
    segment_sentences,
    stopwords,
    token_matches,
    tokenize,
    word_tokens,
)


# --- hashing -----------------------------------------------------------------

def test_fnv1a64_reference_values():
    # Published FNV-1a test vectors.
    assert fnv1a64(b"") == 0xCBF29CE484222325
    assert fnv1a64(b"a") == 0xAF63DC4C8601EC8C
    assert fnv1a64(b"foobar") == 0x85944171F73967E8
    assert fnv1a64_hex(b"") == "cbf29ce484222325"


def test_feature_id_is_fnv_masked_to_dimension():
    for feat in ("w=trust", "c=abc", "w=zufrieden"):
        assert feature_id(feat) == fnv1a64(feat.encode("utf-8")) % HASH_DIMENSION
        assert 0 <= feature_id(feat) < HASH_DIMENSION


# --- tokens ------------------------------------------------------------------

def test_word_tokens_keep_stopwords_and_lowercase():
    assert word_tokens("The Parliament voted, twice!") == [
        "the", "parliament", "voted", "twice",
    ]


def test_word_tokens_split_on_underscore_and_digits_stay():
    assert word_tokens("alpha_beta 42nd") == ["alpha", "beta", "42nd"]


def test_tokenize_removes_language_stopwords():
    assert tokenize("the trust of the people", "en") == ["trust", "people"]
    # "die"/"und" are German stopwords but not English ones.
    assert "die" not in tokenize("die Skala und die Frage", "de")
    assert "die" in tokenize("die Skala", "en")


def test_token_matches_offsets_slice_back():
    text = "Trust, but verify."
    for start, end, token in token_matches(text):
        assert text[start:end].lower() == token


def test_stopword_lists_loaded():
    assert "the" in stopwords("en")
    assert "und" in stopwords("de")


# --- sentence segmentation ---------------------------------------------------

def test_segment_basic_two_sentences():
    spans = segment_sentences("Dr. Smith measured trust. It rose.")
    assert [(s.start, s.end) for s in spans] == [(0, 25), (26, 34)]
    assert spans[0].text == "Dr. Smith measured trust."
    assert spans[1].text == "It rose."
    assert [s.index for s in spans] == [0, 1]


def test_segment_does_not_split_after_abbreviation():
    spans = segment_sentences("See et al. 2019 for details. More here.")
    assert len(spans) == 2
    assert spans[0].text == "See et al. 2019 for details."


def test_segment_requires_uppercase_or_digit_after_break():
    # lowercase continuation -> no split.
    spans = segment_sentences("It rose. and then fell.")
    assert len(spans) == 1


def test_segment_handles_question_marks():
    spans = segment_sentences("How safe do you feel? Low mood was measured.")
    assert [s.text for s in spans] == [
        "How safe do you feel?",
        "Low mood was measured.",
    ]


def test_segment_tail_without_terminator():
    spans = segment_sentences("First part. trailing fragment without end")
    assert spans[-1].text.endswith("without end")


def test_segment_empty_and_whitespace():
    assert segment_sentences("") == []
    assert segment_sentences("   \n  ") == []


def test_segment_spans_reconstruct_source(bundle):
    for pub in bundle.publications.values():
        for span in pub.sentences:
            assert pub.full_text[span.start : span.end] == span.text
            assert span.text == span.text.strip()


# --- language detection ------------------------------------------------------

def test_detect_language_english_confident():
    tag = detect_language("The committee discussed the report and approved it.")
    assert tag == LanguageTag("en", confident=True)


def test_detect_language_german_confident():
    tag = detect_language("Die Kommission hat den Bericht geprüft und angenommen.")
    assert tag == LanguageTag("de", confident=True)


def test_detect_language_defaults_to_english_unconfident():
    tag = detect_language("xylophone quartz")
    assert tag.value == "en"
    assert not tag.confident


# --- vectorizer --------------------------------------------------------------

def test_fit_vectorizer_rejects_empty_corpus():
    with pytest.raises(EmptyCorpus):
        fit_vectorizer([])


def test_idf_formula_presence_based():
    docs = [
        ("trust parliament", "en"),
        ("trust trust trust police", "en"),
        ("health sleep", "en"),
    ]
    model = fit_vectorizer(docs)
    n = 3
    # "trust" appears in two documents (term frequency is irrelevant).
    assert model.idf[feature_id("w=trust")] == pytest.approx(
        math.log((n + 1) / (2 + 1)) + 1.0
    )
    assert model.idf[feature_id("w=health")] == pytest.approx(
        math.log((n + 1) / (1 + 1)) + 1.0
    )


def test_embed_is_unit_length_and_tf_log_scaled(model):
    vec = embed("trust in the parliament", "en", model)
    assert vec.norm == pytest.approx(1.0)
    length = math.sqrt(sum(w * w for w in vec.entries.values()))
    assert length == pytest.approx(1.0)


def test_embed_empty_text_gives_empty_vector(model):
    vec = embed("", "en", model)
    assert vec.is_empty()
    assert cosine(vec, vec) == 0.0


def test_embed_includes_char_grams_of_stopworded_text(model):
    # "the" is a stopword, so no word feature; char grams still fire.
    vec = embed("the", "en", model)
    assert not vec.is_empty()
    assert feature_id("w=the") not in vec.entries
    assert feature_id("c=the") in vec.entries


def test_cosine_self_is_one(model):
    vec = embed("How safe do you feel walking alone after dark?", "en", model)
    assert cosine(vec, vec) == pytest.approx(1.0)


def test_cosine_orders_by_relatedness(model):
    query = embed("trust in the national parliament", "en", model)
    near = embed("trust the parliament of the nation", "en", model)
    far = embed("cigarettes smoked on an average day", "en", model)
    assert cosine(query, near) > cosine(query, far)


@settings(max_examples=50, deadline=None)
@given(
    a=st.text(alphabet="abcdefgh stuvw", min_size=0, max_size=40),
    b=st.text(alphabet="abcdefgh stuvw", min_size=0, max_size=40),
)
def test_cosine_symmetric_bounded(a, b):
    model = fit_vectorizer([("abc stu vwx", "en"), ("hgf uts", "en")])
    va = embed(a, "en", model)
    vb = embed(b, "en", model)
    s1, s2 = cosine(va, vb), cosine(vb, va)
    assert s1 == pytest.approx(s2)
    assert -1e-9 <= s1 <= 1.0 + 1e-9


def test_term_vector_dot():
    a = TermVector(entries={1: 0.5, 2: 0.5}, norm=math.sqrt(0.5))
    b = TermVector(entries={2: 1.0}, norm=1.0)
    assert a.dot(b) == pytest.approx(0.5)
