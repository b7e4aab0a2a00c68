from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mi_rewrite.paraphrase import (
    ParaphraseModelUnavailable,
    ParaphraseSet,
    RuleParaphraser,
    build_paraphrase_set,
    generate_paraphrases,
    levenshtein,
    select_paraphrase,
    word_distance,
)


def lev_oracle(a, b):
    """Plain recursive edit distance; independent of the DP implementation."""
    if not a:
        return len(b)
    if not b:
        return len(a)
    head_cost = 0 if a[0] == b[0] else 1
    return min(
        lev_oracle(a[1:], b) + 1,
        lev_oracle(a, b[1:]) + 1,
        lev_oracle(a[1:], b[1:]) + head_cost,
    )


def select_oracle(original_tokens, candidate_token_lists):
    best_idx, best = 0, -1
    for i, cand in enumerate(candidate_token_lists):
        d = lev_oracle(original_tokens, cand)
        if d > best:
            best_idx, best = i, d
    return best_idx


def test_levenshtein_identity():
    assert levenshtein(["a", "b", "c"], ["a", "b", "c"]) == 0


def test_levenshtein_single_substitution():
    assert levenshtein(["a", "b", "c"], ["a", "x", "c"]) == 1


def test_levenshtein_insertions_from_empty():
    assert levenshtein([], ["a", "b"]) == 2


short_seq = st.lists(st.sampled_from(["a", "b", "c"]), max_size=6)


@given(short_seq, short_seq)
def test_levenshtein_matches_recursive_oracle(a, b):
    assert levenshtein(a, b) == lev_oracle(a, b)


@given(short_seq, short_seq)
def test_levenshtein_symmetry(a, b):
    assert levenshtein(a, b) == levenshtein(b, a)


@given(short_seq, short_seq)
def test_levenshtein_identity_of_indiscernibles(a, b):
    d = levenshtein(a, b)
    assert (d == 0) == (a == b)


@settings(max_examples=200)
@given(short_seq, short_seq, short_seq)
def test_levenshtein_triangle_inequality(a, b, c):
    assert levenshtein(a, c) <= levenshtein(a, b) + levenshtein(b, c)


def test_select_prefers_distant_candidate():
    got = select_paraphrase("I feel stuck", ["I feel stuck", "You sound trapped"])
    assert got == "You sound trapped"


def test_select_single_candidate():
    assert select_paraphrase("anything", ["only choice"]) == "only choice"


def test_select_tie_goes_to_first():
    original = "a b"
    # both at distance 1
    assert select_paraphrase(original, ["a c", "x b"]) == "a c"


def test_select_empty_candidates_error():
    with pytest.raises(ValueError):
        select_paraphrase("a", [])


def test_selected_is_always_a_candidate():
    cands = ["x", "y z", "a b c"]
    assert select_paraphrase("a", cands) in cands


def test_select_exhaustive_small_space_matches_oracle():
    """Every (original, candidate-list) combination over short {a,b} strings."""
    vocab = ["a", "b"]
    strings = [" ".join(p) for k in range(0, 3) for p in itertools.product(vocab, repeat=k)]
    lists = [[c] for c in strings] + [
        [c1, c2] for c1 in strings for c2 in strings
    ]
    for original in strings:
        orig_toks = original.split()
        for cands in lists:
            expected = select_oracle(orig_toks, [c.split() for c in cands])
            got = build_paraphrase_set(original, cands)
            assert got.selected_index == expected


def test_paraphrase_set_invariants():
    ps = build_paraphrase_set("a b", ["a b", "x y"])
    assert isinstance(ps, ParaphraseSet)
    assert ps.selected == "x y"
    assert ps.candidates == ("a b", "x y")
    with pytest.raises(ValueError):
        ParaphraseSet(original="a", candidates=("b",), selected_index=3)


# ---------------------------------------------------------------------------
# Candidate generation.


def test_generate_requires_model_or_fallback():
    with pytest.raises(ParaphraseModelUnavailable):
        generate_paraphrases("You feel stuck.", n=3)


def test_generate_fallback_returns_original():
    got = generate_paraphrases("You feel  stuck.", n=3, offline_fallback=True)
    assert got == ["You feel stuck."]


def test_generate_n_must_be_positive():
    with pytest.raises(ValueError):
        generate_paraphrases("x", n=0, offline_fallback=True)


def test_rule_paraphraser_is_deterministic():
    p = RuleParaphraser(seed=7)
    a = p.generate("You feel stuck because dieting keeps failing.", 5)
    b = p.generate("You feel stuck because dieting keeps failing.", 5)
    assert a == b


def test_rule_paraphraser_moves_away_from_original():
    p = RuleParaphraser(seed=0)
    text = "You feel stuck and you want things to change."
    cands = generate_paraphrases(text, n=5, paraphraser=p)
    assert all(c.strip() for c in cands)
    assert max(word_distance(text, c) for c in cands) >= 2


def test_generate_deduplicates_candidates():
    class Fixed:
        def generate(self, text, n):
            return ["same  thing", "same thing", "other"]

    got = generate_paraphrases("x", n=5, paraphraser=Fixed())
    assert got == ["same thing", "other"]


def test_generate_caps_at_n():
    class Many:
        def generate(self, text, n):
            return [f"cand {i}" for i in range(10)]

    assert len(generate_paraphrases("x", n=3, paraphraser=Many())) == 3


def test_generate_empty_model_output_falls_back_to_original():
    class Empty:
        def generate(self, text, n):
            return []

    assert generate_paraphrases("keep me", n=2, paraphraser=Empty()) == ["keep me"]


def test_rule_paraphraser_independent_of_call_order():
    p = RuleParaphraser(seed=3)
    first = p.generate("It sounds like you are worn out.", 4)
    p.generate("Some unrelated sentence to disturb state.", 4)
    second = p.generate("It sounds like you are worn out.", 4)
    assert first == second
