import numpy as np
import pytest
import torch
from sklearn.base import clone

from mi_rewrite.attention import Segment
from mi_rewrite.models.discriminator import (
    CLASS_ORDER,
    ReflectionDiscriminator,
    ReflectionPrediction,
)
from mi_rewrite.models.scorer import ReflectionScorer
from mi_rewrite.corpus import split
from mi_rewrite.synthetic import generate_pair_corpus


def as_xy(exchanges):
    return [(e.prompt, e.response) for e in exchanges], [
        e.reflection_label for e in exchanges
    ]


@pytest.fixture(scope="module")
def world():
    corpus = generate_pair_corpus(60, seed=11, ambiguous_rate=0.0)
    parts = split(corpus, (0.75, 0.05, 0.20), seed=11)
    return parts


@pytest.fixture(scope="module")
def trained(world):
    X, y = as_xy(world.train)
    dev = as_xy(world.dev)
    model = ReflectionDiscriminator(epochs=10, seed=11).fit(X, y, dev=dev)
    return model


@pytest.fixture(scope="module")
def trained_scorer(world):
    X, y = as_xy(world.train)
    model = ReflectionScorer(epochs=10, seed=11).fit(X, y)
    return model


# ---------------------------------------------------------------- discriminator


def test_learns_clean_markers(trained, world):
    X, y = as_xy(world.test)
    acc = float(np.mean(np.asarray(trained.predict(X)) == np.asarray(y)))
    assert acc > 0.7


def test_training_is_deterministic(world):
    X, y = as_xy(world.train)
    dev = as_xy(world.dev)
    a = ReflectionDiscriminator(epochs=3, seed=5).fit(X, y, dev=dev)
    b = ReflectionDiscriminator(epochs=3, seed=5).fit(X, y, dev=dev)
    assert a.history_ == b.history_
    pa = a.predict_proba(X[:8])
    pb = b.predict_proba(X[:8])
    assert np.allclose(pa, pb)


def test_classify_contract(trained):
    pred = trained.classify("I feel stuck with dieting.", "You should try a journal.")
    assert pred.label in CLASS_ORDER
    assert abs(sum(pred.probabilities) - 1.0) < 1e-6
    assert pred.label == CLASS_ORDER[int(np.argmax(pred.probabilities))]
    assert pred.truncated is False


def test_classify_rejects_empty(trained):
    with pytest.raises(ValueError):
        trained.classify("", "response")
    with pytest.raises(ValueError):
        trained.classify("prompt", "   ")


def test_classify_flags_truncation(trained):
    long_response = " ".join(["word"] * 500)
    pred = trained.classify("short prompt", long_response)
    assert pred.truncated is True


def test_prediction_validation():
    with pytest.raises(ValueError):
        ReflectionPrediction(label="NR", probabilities=(0.2, 0.2, 0.2))
    with pytest.raises(ValueError):
        ReflectionPrediction(label="NR", probabilities=(0.1, 0.2, 0.7))


def test_missing_label_rejected(world):
    X, y = as_xy(world.train)
    y = list(y)
    y[0] = None
    with pytest.raises(ValueError):
        ReflectionDiscriminator(epochs=1).fit(X, y)


def test_single_label_degenerate_flag():
    corpus = [
        e for e in generate_pair_corpus(10, seed=0, ambiguous_rate=0.0)
        if e.reflection_label == "NR"
    ]
    X = [(e.prompt, e.response) for e in corpus]
    y = [e.reflection_label for e in corpus]
    with pytest.raises(ValueError):
        ReflectionDiscriminator(epochs=1).fit(X, y)
    with pytest.warns(UserWarning):
        ReflectionDiscriminator(epochs=1, degenerate_labels="warn").fit(X, y)


def test_estimator_cloneable(trained):
    fresh = clone(clone(ReflectionDiscriminator(epochs=2, seed=9)))
    assert fresh.epochs == 2 and fresh.seed == 9


# ---------------------------------------------------------------- attention


def test_attention_zeroes_prompt_positions(trained):
    amap = trained.extract_attention("I feel stuck with dieting.", "You should try.")
    for i, seg in enumerate(amap.source.segments):
        if seg is not Segment.RESPONSE:
            assert amap.scores[i] == 0.0


def test_attention_mean_matches_scores(trained):
    amap = trained.extract_attention(
        "I feel stuck with dieting.", "You should try a food journal."
    )
    pos = amap.source.response_positions()
    assert amap.mean_response_score == pytest.approx(
        float(np.mean(amap.scores[pos])), abs=1e-9
    )
    assert (amap.scores >= 0).all()


def test_attention_deterministic(trained):
    a = trained.extract_attention("I feel stuck.", "You should try.")
    b = trained.extract_attention("I feel stuck.", "You should try.")
    assert np.array_equal(a.scores, b.scores)


def test_attention_query_row_switch(world):
    X, y = as_xy(world.train)
    m = ReflectionDiscriminator(epochs=2, seed=3, query_row="mean").fit(X, y)
    amap = m.extract_attention("I feel stuck.", "You should try dieting.")
    assert amap.mean_response_score > 0
    with pytest.raises(ValueError):
        ReflectionDiscriminator(epochs=1, query_row="rows").fit(X, y)


def test_attention_rejects_empty_response(trained):
    # punctuation still tokenizes; only a truly empty response errors
    assert trained.extract_attention("prompt", "...").mean_response_score >= 0
    with pytest.raises(ValueError):
        trained.extract_attention("prompt", "")


# ---------------------------------------------------------------- scorer


def test_scorer_orders_levels(trained_scorer, world):
    X, y = as_xy(world.test)
    scores = trained_scorer.predict(X)
    nr = [s for s, label in zip(scores, y) if label == "NR"]
    cr = [s for s, label in zip(scores, y) if label == "CR"]
    assert np.mean(cr) > np.mean(nr)


def test_scorer_output_bounded(trained_scorer):
    rng = np.random.default_rng(0)
    words = ["you", "dieting", "zz", "try", "worried", "qqq", "part"]
    for _ in range(25):
        text = " ".join(rng.choice(words, size=rng.integers(1, 12)))
        s = trained_scorer.score_pair("any prompt at all", text)
        assert 0.0 <= s <= 1.0


def test_scorer_rejects_blank_response(trained_scorer):
    with pytest.raises(ValueError):
        trained_scorer.score_pair("prompt", "   ")


def test_scorer_ignores_trailing_whitespace(trained_scorer):
    a = trained_scorer.score_pair("a prompt", "you should try dieting")
    b = trained_scorer.score_pair("a prompt", "you should try dieting   \n")
    assert a == pytest.approx(b)


def test_scorer_deterministic(world):
    X, y = as_xy(world.train)
    a = ReflectionScorer(epochs=3, seed=4).fit(X, y)
    b = ReflectionScorer(epochs=3, seed=4).fit(X, y)
    assert a.history_ == b.history_
    assert np.allclose(a.predict(X[:6]), b.predict(X[:6]))


def test_scorer_rejects_bad_labels(world):
    X, y = as_xy(world.train)
    y = ["XX"] + list(y[1:])
    with pytest.raises(ValueError):
        ReflectionScorer(epochs=1).fit(X, y)
