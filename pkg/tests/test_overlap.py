import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mi_rewrite.metrics.overlap import meteor, reference_similarity, sentence_bleu

WORDS = st.sampled_from(
    ["you", "feel", "stuck", "about", "food", "dieting", "part", "worried"]
)
SENTENCES = st.lists(WORDS, min_size=1, max_size=10).map(" ".join)


# ---------------------------------------------------------------- BLEU


def test_bleu_identity_is_100():
    s = "it sounds like part of you is worried about dieting"
    assert sentence_bleu(s, s) == pytest.approx(100.0)


def test_bleu_disjoint_near_zero():
    score = sentence_bleu("alpha beta gamma delta", "one two three four")
    assert score < 5.0


def test_bleu_short_hypothesis_hand_computed():
    # hyp "the cat sat" vs ref "the cat sat on the mat": unigram, bigram
    # and trigram precisions are all 1, no 4-grams exist, so the score
    # is pure brevity penalty exp(1 - 6/3).
    score = sentence_bleu("the cat sat", "the cat sat on the mat")
    assert score == pytest.approx(100.0 * math.exp(1.0 - 6.0 / 3.0))


def test_bleu_smoothing_hand_computed():
    # "a x c d" vs "a b c d": p1=3/4, p2=1/3, p3 and p4 have zero
    # matches and take the 0.1 floor over 2 and 1 trials.
    expected = 100.0 * (0.75 * (1 / 3) * (0.1 / 2) * (0.1 / 1)) ** 0.25
    assert sentence_bleu("a x c d", "a b c d") == pytest.approx(expected)


def test_bleu_empty_hypothesis_zero():
    assert sentence_bleu("", "some reference") == 0.0


def test_bleu_empty_reference_raises():
    with pytest.raises(ValueError):
        sentence_bleu("something", "")


def test_bleu_clipping_counts_repeats():
    # hypothesis repeats "the": clipped unigram matches = 2, not 7
    score = sentence_bleu("the the the the the the the", "the cat on the mat")
    assert score < 100.0 * (3 / 7)


@settings(max_examples=150)
@given(SENTENCES, SENTENCES)
def test_bleu_bounds(a, b):
    assert 0.0 <= sentence_bleu(a, b) <= 100.0 + 1e-9


# ---------------------------------------------------------------- METEOR


def test_meteor_identity_is_exactly_one():
    s = "you are worried about your health"
    assert meteor(s, s) == pytest.approx(1.0)


def test_meteor_disjoint_zero():
    assert meteor("alpha beta gamma", "one two three") == 0.0


def test_meteor_recall_weighted_hand_computed():
    # hyp "the cat" vs ref "the cat sat": P=1, R=2/3, one chunk.
    # F = PR / (0.9 P + 0.1 R) = (2/3) / (0.9 + 1/15)
    expected = (2 / 3) / (0.9 + 0.1 * (2 / 3))
    assert meteor("the cat", "the cat sat") == pytest.approx(expected)


def test_meteor_stem_stage_matches_inflections():
    # "food" aligns with "foods" only through the stem stage
    assert meteor("unhealthy food", "unhealthy foods") == pytest.approx(1.0)


def test_meteor_fragmentation_penalized():
    ordered = meteor("a b c d", "a b c d")
    scattered = meteor("d c b a", "a b c d")
    # same unigram matches, so only the chunk penalty separates them
    assert scattered < ordered
    assert scattered == pytest.approx(1.0 * (1.0 - 0.5 * 1.0**3))


def test_meteor_empty_reference_raises():
    with pytest.raises(ValueError):
        meteor("something", "")


def test_meteor_empty_hypothesis_zero():
    assert meteor("", "some reference") == 0.0


@settings(max_examples=150)
@given(SENTENCES, SENTENCES)
def test_meteor_bounds(a, b):
    assert 0.0 <= meteor(a, b) <= 1.0 + 1e-9


@settings(max_examples=100)
@given(SENTENCES)
def test_meteor_self_is_max(s):
    assert meteor(s, s) == pytest.approx(1.0)


# ---------------------------------------------------------------- combined


def test_reference_similarity_keys():
    out = reference_similarity("you feel stuck", "you feel stuck")
    assert set(out) == {"bleu", "meteor"}
    assert out["bleu"] == pytest.approx(100.0)
    assert out["meteor"] == pytest.approx(1.0)
