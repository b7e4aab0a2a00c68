import math

import pytest
import torch

from mi_rewrite.models.coherence import CoherenceClassifier
from mi_rewrite.models.lm import CausalLM
from mi_rewrite.synthetic import generate_pair_corpus


@pytest.fixture(scope="module")
def corpus():
    return generate_pair_corpus(n_groups=80, seed=17, ambiguous_rate=0.0)


@pytest.fixture(scope="module")
def lm(corpus):
    texts = [ex.response for ex in corpus]
    model = CausalLM(epochs=10, seed=0, batch_size=32)
    model.fit(texts[:-30], dev=texts[-30:])
    return model


@pytest.fixture(scope="module")
def coh(corpus):
    pairs = [(ex.prompt, ex.response) for ex in corpus]
    model = CoherenceClassifier(epochs=8, seed=0, batch_size=32)
    model.fit(pairs[:-40], dev=pairs[-40:-20])
    return model


# -------------------------------------------------- language model


def test_perplexity_positive_and_finite(lm, corpus):
    ppl = lm.perplexity(corpus[0].response)
    assert 0 < ppl < float("inf")


def test_perplexity_rejects_empty_text(lm):
    for bad in ("", "   "):
        with pytest.raises(ValueError):
            lm.perplexity(bad)


def test_single_token_matches_manual_nll(lm):
    # independent route: score P(token | BOS) straight from the network
    ids = lm.vocab_.encode_target("you", lm.max_len)
    assert len(ids) == 3  # BOS, you, EOS
    with torch.no_grad():
        logits = lm.net_(torch.tensor([[ids[0]]]))
        logprob = float(logits.log_softmax(dim=-1)[0, 0, ids[1]])
    assert lm.perplexity("you") == pytest.approx(math.exp(-logprob), rel=1e-6)


@pytest.mark.xfail(
    strict=False,
    reason=(
        "repetition-friendliness holds for large pretrained LMs but not for "
        "this from-scratch model: its training text never repeats a token, "
        "so repeated 'you' measures ~1441 vs ~408 for random in-vocab words"
    ),
)
def test_repeated_common_token_beats_random_rare_tokens(lm):
    repeated = " ".join(["you"] * 6)
    random_ish = "underneath journal struggling frustrated deep worried"
    assert lm.perplexity(repeated) < lm.perplexity(random_ish)


def test_training_sentence_beats_scrambled_rare(lm, corpus):
    text = corpus[0].response
    words = text.lower().replace(".", "").split()
    scrambled = " ".join(sorted(words, reverse=True))
    assert lm.perplexity(text) < lm.perplexity(scrambled)


def test_perplexity_deterministic(lm, corpus):
    text = corpus[3].response
    assert lm.perplexity(text) == lm.perplexity(text)


def test_lm_fit_deterministic(corpus):
    texts = [ex.response for ex in corpus[:60]]
    runs = []
    for _ in range(2):
        model = CausalLM(epochs=3, seed=9, batch_size=16)
        model.fit(texts)
        runs.append((model.history_, model.perplexity(texts[0])))
    assert runs[0] == runs[1]


def test_lm_rejects_empty_corpus():
    with pytest.raises(ValueError):
        CausalLM().fit(["", "   "])


# -------------------------------------------------- coherence


def test_coherence_bounded(coh, corpus):
    for ex in corpus[:20]:
        assert 0.0 <= coh.coherence(ex.prompt, ex.response) <= 1.0


def test_matched_mean_exceeds_mismatched_mean(coh, corpus):
    held_out = corpus[-20:]
    matched = [coh.coherence(ex.prompt, ex.response) for ex in held_out]
    mismatched = [
        coh.coherence(held_out[j].prompt, held_out[(j + 7) % len(held_out)].response)
        for j in range(len(held_out))
    ]
    assert sum(matched) / len(matched) > sum(mismatched) / len(mismatched)


def test_coherence_rejects_blank_inputs(coh):
    with pytest.raises(ValueError):
        coh.coherence("", "a response")
    with pytest.raises(ValueError):
        coh.coherence("a prompt", "   ")


def test_coherence_before_fit_raises():
    with pytest.raises(Exception):
        CoherenceClassifier().coherence("a", "b")


def test_coherence_deterministic(coh, corpus):
    ex = corpus[5]
    assert coh.coherence(ex.prompt, ex.response) == coh.coherence(ex.prompt, ex.response)


def test_coherence_fit_needs_two_pairs():
    with pytest.raises(ValueError):
        CoherenceClassifier().fit([("p", "r")])
