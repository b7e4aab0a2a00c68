from __future__ import annotations

import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mi_rewrite.metrics.ter import edit_distance, ter, ter_edits


def dp_oracle(a, b):
    """Full-matrix edit distance, written independently of the implementation."""
    rows = len(a) + 1
    cols = len(b) + 1
    table = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        table[i][0] = i
    for j in range(cols):
        table[0][j] = j
    for i in range(1, rows):
        for j in range(1, cols):
            same = a[i - 1] == b[j - 1]
            table[i][j] = min(
                table[i - 1][j] + 1,
                table[i][j - 1] + 1,
                table[i - 1][j - 1] + (0 if same else 1),
            )
    return table[-1][-1]


def test_identical_strings():
    assert ter("a b c", "a b c") == 0.0


def test_single_substitution():
    assert ter("a b c", "a x c") == pytest.approx(1 / 3)


def test_empty_rewrite_is_all_deletions():
    assert ter("a b c", "") == pytest.approx(1.0)


def test_empty_original_rejected():
    with pytest.raises(ValueError):
        ter("", "anything")


def test_can_exceed_one():
    assert ter("a", "x y z") == pytest.approx(3.0)


def test_lowercases_by_default():
    assert ter("A b", "a B") == 0.0
    assert ter("A b", "a B", lowercase=False) == pytest.approx(1.0)


def test_block_shift_beats_shiftless():
    original = "a b c d e f"
    rewrite = "e f a b c d"
    assert ter(original, rewrite, shifts=False) == pytest.approx(4 / 6)
    assert ter(original, rewrite) == pytest.approx(1 / 6)


def test_shift_requires_block_present_in_original():
    # "x y" never occurs in the original, so no shift can apply
    original = "a b c"
    rewrite = "x y a b c"
    assert ter(original, rewrite) == pytest.approx(2 / 3)


def test_two_shifts():
    original = "a b c d e f g h"
    rewrite = "c d a b g h e f"
    assert ter_edits(original.split(), rewrite.split()) == 2


def test_shiftless_exhaustive_matches_dp_oracle():
    """All token-sequence pairs over a 3-symbol alphabet with combined
    length <= 7 agree with the independent DP table."""
    alphabet = ["a", "b", "c"]
    seqs = [
        list(p)
        for k in range(0, 6)
        for p in itertools.product(alphabet, repeat=k)
    ]
    checked = 0
    for a in seqs:
        for b in seqs:
            if len(a) + len(b) > 7:
                continue
            assert edit_distance(a, b) == dp_oracle(a, b)
            checked += 1
    assert checked > 10_000


tokens = st.lists(st.sampled_from(["a", "b", "c", "d"]), min_size=1, max_size=8)


@settings(max_examples=300)
@given(tokens, tokens)
def test_shifted_edits_never_exceed_shiftless(a, b):
    assert ter_edits(a, b, shifts=True) <= ter_edits(a, b, shifts=False)


@given(st.lists(st.sampled_from(["you", "feel", "stuck", "now", "."]), min_size=1, max_size=10))
def test_self_ter_is_zero(words):
    text = " ".join(words)
    assert ter(text, text) == 0.0
    assert ter(text, text, shifts=False) == 0.0
