from __future__ import annotations

import string

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mi_rewrite.text import (
    STOPWORDS,
    content_words,
    detokenize,
    normalize_space,
    stem,
    tokenize_words,
)

# Canonical input/output pairs for the suffix-stripping stemmer (Porter's
# published examples).  These pin the algorithm, not just "some stemmer".
STEM_VECTORS = [
    ("caresses", "caress"),
    ("ponies", "poni"),
    ("ties", "ti"),
    ("caress", "caress"),
    ("cats", "cat"),
    ("feed", "feed"),
    ("agreed", "agre"),
    ("plastered", "plaster"),
    ("bled", "bled"),
    ("motoring", "motor"),
    ("sing", "sing"),
    ("conflated", "conflat"),
    ("troubled", "troubl"),
    ("sized", "size"),
    ("hopping", "hop"),
    ("tanned", "tan"),
    ("falling", "fall"),
    ("hissing", "hiss"),
    ("fizzed", "fizz"),
    ("failing", "fail"),
    ("filing", "file"),
    ("happy", "happi"),
    ("sky", "sky"),
    ("relational", "relat"),
    ("conditional", "condit"),
    ("rational", "ration"),
    ("valenci", "valenc"),
    ("hesitanci", "hesit"),
    ("digitizer", "digit"),
    ("differentli", "differ"),
    ("vileli", "vile"),
    ("analogousli", "analog"),
    ("vietnamization", "vietnam"),
    ("predication", "predic"),
    ("operator", "oper"),
    ("feudalism", "feudal"),
    ("decisiveness", "decis"),
    ("hopefulness", "hope"),
    ("callousness", "callous"),
    ("formaliti", "formal"),
    ("sensitiviti", "sensit"),
    ("sensibiliti", "sensibl"),
    ("triplicate", "triplic"),
    ("formative", "form"),
    ("formalize", "formal"),
    ("electriciti", "electr"),
    ("electrical", "electr"),
    ("hopeful", "hope"),
    ("goodness", "good"),
    ("revival", "reviv"),
    ("allowance", "allow"),
    ("inference", "infer"),
    ("airliner", "airlin"),
    ("gyroscopic", "gyroscop"),
    ("adjustable", "adjust"),
    ("defensible", "defens"),
    ("irritant", "irrit"),
    ("replacement", "replac"),
    ("adjustment", "adjust"),
    ("dependent", "depend"),
    ("adoption", "adopt"),
    ("communism", "commun"),
    ("activate", "activ"),
    ("angulariti", "angular"),
    ("homologous", "homolog"),
    ("effective", "effect"),
    ("probate", "probat"),
    ("rate", "rate"),
    ("cease", "ceas"),
    ("controll", "control"),
    ("roll", "roll"),
]


@pytest.mark.parametrize("word,expected", STEM_VECTORS)
def test_stem_vectors(word, expected):
    assert stem(word) == expected


def test_stem_is_lowercasing():
    assert stem("Dieting") == stem("dieting")


def test_stem_leaves_short_words_alone():
    assert stem("as") == "as"
    assert stem("is") == "is"


@given(st.text(alphabet=string.ascii_letters, min_size=1, max_size=12))
def test_stem_never_longer_than_input(word):
    assert len(stem(word)) <= len(word)
    assert stem(word) != ""


def test_tokenize_splits_punctuation():
    assert tokenize_words("What do you know?") == ["What", "do", "you", "know", "?"]


def test_tokenize_keeps_internal_apostrophes():
    assert tokenize_words("don't, you've said.") == ["don't", ",", "you've", "said", "."]


def test_tokenize_empty():
    assert tokenize_words("") == []
    assert tokenize_words("   \n\t ") == []


def test_detokenize_attaches_punctuation():
    toks = ["You", "feel", "stuck", ",", "right", "?"]
    assert detokenize(toks) == "You feel stuck, right?"


def test_detokenize_apostrophe_words_left_alone():
    assert detokenize(["I", "don't", "know", "."]) == "I don't know."


@given(st.text(alphabet=string.ascii_letters + " .,?!'", max_size=60))
def test_tokenize_detokenize_roundtrip_tokens(text):
    toks = tokenize_words(text)
    assert tokenize_words(detokenize(toks)) == toks


def test_normalize_space():
    assert normalize_space("  a   b \n c ") == "a b c"


def test_stopwords_contain_function_words():
    for w in ("the", "you", "and", "of", "is"):
        assert w in STOPWORDS


def test_content_words_filters_stopwords_and_punct():
    got = content_words("You have given up all unhealthy food , right ?")
    assert "unhealthy" in got
    assert "food" in got
    assert "the" not in got
    assert "?" not in got
    assert all(w == w.lower() for w in got)
