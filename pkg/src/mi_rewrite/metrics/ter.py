"""Translation edit rate between an original response and its rewrite.

Edits are word-level insertions, deletions, substitutions, and greedy
block shifts (a contiguous hypothesis block moved elsewhere for cost 1),
normalized by the original's length. Shifts are only attempted for
blocks that literally occur in the original, and each accepted shift
must strictly reduce the remaining edit distance. A shiftless mode
exposes the plain dynamic-programming distance for oracle testing.
"""

from __future__ import annotations

from ..text import tokenize_words

MAX_SHIFT_BLOCK = 10


def edit_distance(a: list[str], b: list[str]) -> int:
    """Unit-cost insert/delete/substitute distance."""
    if a == b:
        return 0
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, tok_a in enumerate(a, start=1):
        cur = [i] + [0] * len(b)
        for j, tok_b in enumerate(b, start=1):
            cost = 0 if tok_a == tok_b else 1
            cur[j] = min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost)
        prev = cur
    return prev[-1]


def _reference_grams(ref: list[str]) -> set[tuple[str, ...]]:
    grams = set()
    for n in range(1, min(len(ref), MAX_SHIFT_BLOCK) + 1):
        for i in range(len(ref) - n + 1):
            grams.add(tuple(ref[i : i + n]))
    return grams


def _best_shift(hyp: list[str], ref: list[str], base: int):
    """The single block move that reduces edit distance the most."""
    grams = _reference_grams(ref)
    best_gain = 0
    best_hyp = None
    max_len = min(len(hyp), MAX_SHIFT_BLOCK)
    for length in range(1, max_len + 1):
        for start in range(len(hyp) - length + 1):
            block = tuple(hyp[start : start + length])
            if block not in grams:
                continue
            rest = hyp[:start] + hyp[start + length :]
            for dest in range(len(rest) + 1):
                if dest == start:
                    continue
                moved = rest[:dest] + list(block) + rest[dest:]
                gain = base - edit_distance(moved, ref)
                if gain > best_gain:
                    best_gain = gain
                    best_hyp = moved
    return best_gain, best_hyp


def ter_edits(original_tokens: list[str], rewrite_tokens: list[str],
              shifts: bool = True) -> int:
    """Number of edits turning the rewrite into the original."""
    ref = list(original_tokens)
    hyp = list(rewrite_tokens)
    if not shifts:
        return edit_distance(hyp, ref)
    n_shifts = 0
    base = edit_distance(hyp, ref)
    while base > 0:
        gain, shifted = _best_shift(hyp, ref, base)
        if gain < 1 or shifted is None:
            break
        hyp = shifted
        base -= gain
        n_shifts += 1
    return n_shifts + base


def ter(original: str, rewrite: str, shifts: bool = True,
        lowercase: bool = True) -> float:
    """Edits normalized by original length; can exceed 1."""
    ref = tokenize_words(original)
    if not ref:
        raise ValueError("original must contain at least one token")
    hyp = tokenize_words(rewrite)
    if lowercase:
        ref = [t.lower() for t in ref]
        hyp = [t.lower() for t in hyp]
    return ter_edits(ref, hyp, shifts=shifts) / len(ref)
