"""Paraphrase candidates for generator training, and the
maximum-edit-distance selection rule.

The selection contract: among candidates, pick the one with the highest
word-level Levenshtein distance from the original, breaking ties toward
the lowest index. Candidate generation sits behind a small interface; the
bundled RuleParaphraser applies seeded lexical and structural edits so the
pipeline works without any pretrained paraphrase model. When no generator
is configured at all, offline-fallback mode returns the original text as
the sole candidate.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass

import numpy as np

from .text import normalize_space, tokenize_words


class ParaphraseModelUnavailable(RuntimeError):
    pass


def levenshtein(a: list[str], b: list[str]) -> int:
    """Unit-cost insert/delete/substitute distance over token sequences."""
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


def word_distance(a: str, b: str) -> int:
    return levenshtein(tokenize_words(a), tokenize_words(b))


@dataclass(frozen=True)
class ParaphraseSet:
    original: str
    candidates: tuple[str, ...]
    selected_index: int

    def __post_init__(self):
        if not self.candidates:
            raise ValueError("candidates must be non-empty")
        if not 0 <= self.selected_index < len(self.candidates):
            raise ValueError("selected_index out of range")

    @property
    def selected(self) -> str:
        return self.candidates[self.selected_index]


def build_paraphrase_set(original: str, candidates: list[str]) -> ParaphraseSet:
    if not candidates:
        raise ValueError("candidates must be non-empty")
    orig_toks = tokenize_words(original)
    best_idx = 0
    best_dist = -1
    for i, cand in enumerate(candidates):
        d = levenshtein(orig_toks, tokenize_words(cand))
        if d > best_dist:
            best_idx, best_dist = i, d
    return ParaphraseSet(
        original=original, candidates=tuple(candidates), selected_index=best_idx
    )


def select_paraphrase(original: str, candidates: list[str]) -> str:
    """Candidate with maximal word-level distance; ties go to the first."""
    return build_paraphrase_set(original, candidates).selected


def generate_paraphrases(
    response: str,
    n: int = 5,
    paraphraser=None,
    offline_fallback: bool = False,
) -> list[str]:
    """Up to n distinct candidates from the configured paraphraser.

    Without a paraphraser this raises unless offline_fallback is set, in
    which case the original is returned as the sole candidate.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if paraphraser is None:
        if offline_fallback:
            return [normalize_space(response)]
        raise ParaphraseModelUnavailable(
            "no paraphrase model configured; set offline_fallback=True to "
            "train without augmentation (candidates = [original])"
        )
    seen = set()
    out = []
    for cand in paraphraser.generate(response, n):
        norm = normalize_space(cand)
        if norm and norm not in seen:
            seen.add(norm)
            out.append(norm)
        if len(out) == n:
            break
    if not out:
        out = [normalize_space(response)]
    return out


# ---------------------------------------------------------------------------
# Rule-based paraphraser.

# Both directions of each pair are applied; keep entries lowercase.
DEFAULT_SYNONYMS = {
    "feel": "sense",
    "feeling": "sensing",
    "stuck": "trapped",
    "worried": "concerned",
    "anxious": "uneasy",
    "ashamed": "embarrassed",
    "overwhelmed": "swamped",
    "hopeless": "defeated",
    "frustrated": "exasperated",
    "exhausted": "drained",
    "discouraged": "disheartened",
    "guilty": "remorseful",
    "angry": "upset",
    "lonely": "isolated",
    "restless": "unsettled",
    "sounds": "seems",
    "wants": "hopes",
    "want": "hope",
    "change": "shift",
    "searching": "looking",
    "struggling": "wrestling",
    "bigger": "larger",
    "hard": "tough",
    "difficult": "tough",
    "worn": "burned",
    "keeps": "continues",
    "matters": "counts",
    "part": "piece",
    "underneath": "beneath",
    "because": "since",
    "about": "regarding",
}

_FILLERS = {"really", "just", "quite", "all", "simply"}
_CONNECTIVES = ("and", "but", "because", "so")
_LEADINS = (
    ("it", "sounds", "like"),
    ("it", "seems", "like"),
    ("i", "hear", "that"),
)

# Stance frames rewritten to plainer wording; longest match wins at each
# position. Keeps the meaning while flattening the framing, which is the
# kind of surface drift the selection rule rewards.
_SOFTENERS = (
    (("part", "of", "you", "is", "worried"), ("you", "might", "be", "worried")),
    (("part", "of", "you", "wants"), ("maybe", "you", "want")),
    (("part", "of", "you", "is"), ("you", "might", "be")),
    (("underneath", "it", "all", "you", "are"), ("you", "may", "be")),
    (("deep", "down", "you", "are"), ("you", "could", "be")),
    (("you", "are", "worried", "that"), ("you", "worry", "that")),
    (("it", "sounds", "like", "you", "feel"), ("so", "you", "feel")),
    (("it", "sounds", "like"), ("so",)),
    (("you", "are", "saying", "that"), ("so",)),
    (("i", "hear", "that"), ("so",)),
)


def _swap_synonyms(tokens, rng, lexicon):
    both_ways = dict(lexicon)
    both_ways.update({v: k for k, v in lexicon.items()})
    idxs = [i for i, t in enumerate(tokens) if t.lower() in both_ways]
    if not idxs:
        return None
    out = list(tokens)
    for i in idxs:
        if rng.rand() < 0.8:
            repl = both_ways[out[i].lower()]
            out[i] = repl.capitalize() if out[i][0].isupper() else repl
    return out


def _toggle_leadin(tokens, rng, lexicon):
    low = [t.lower() for t in tokens]
    for lead in _LEADINS:
        k = len(lead)
        if tuple(low[:k]) == lead:
            rest = list(tokens[k:])
            if not rest:
                return None
            rest[0] = rest[0].capitalize()
            return rest
    lead = list(_LEADINS[rng.randint(len(_LEADINS))])
    out = [lead[0].capitalize(), *lead[1:]]
    first = tokens[0]
    out.append(first.lower() if first.istitle() else first)
    out.extend(tokens[1:])
    return out


def _reorder_clauses(tokens, rng, lexicon):
    low = [t.lower() for t in tokens]
    for i in range(1, len(tokens) - 1):
        if low[i] in _CONNECTIVES:
            left = list(tokens[:i])
            right = list(tokens[i + 1 :])
            if left and left[-1] == ",":
                left = left[:-1]
            if not left or not right:
                return None
            trailing = []
            if right and right[-1] in {".", "!", "?"}:
                trailing = [right[-1]]
                right = right[:-1]
            if not right:
                return None
            right[0] = right[0].capitalize()
            left[0] = left[0].lower()
            return right + [",", tokens[i]] + left + trailing
    return None


def _drop_fillers(tokens, rng, lexicon):
    kept = [t for t in tokens if t.lower() not in _FILLERS]
    if len(kept) == len(tokens) or not kept:
        return None
    return kept


def _soften_markers(tokens, rng, lexicon):
    low = [t.lower() for t in tokens]
    out: list[str] = []
    i = 0
    hit = False
    while i < len(tokens):
        for frame, repl in _SOFTENERS:
            if tuple(low[i : i + len(frame)]) == frame:
                out.extend(repl)
                i += len(frame)
                hit = True
                break
        else:
            out.append(tokens[i])
            i += 1
    if not hit or not out:
        return None
    out[0] = out[0][0].upper() + out[0][1:] if out[0][0].isalpha() else out[0]
    return out


_OPS = (_soften_markers, _swap_synonyms, _toggle_leadin, _reorder_clauses, _drop_fillers)


class RuleParaphraser:
    """Deterministic seeded paraphraser built from lexical and clause edits.

    Each candidate applies a growing number of edits, so later candidates
    tend to drift further from the input; generation for a given text is
    independent of call order.
    """

    def __init__(self, seed: int = 0, synonyms: dict[str, str] | None = None):
        self.seed = seed
        self.synonyms = dict(DEFAULT_SYNONYMS if synonyms is None else synonyms)

    def generate(self, text: str, n: int) -> list[str]:
        base = tokenize_words(normalize_space(text))
        if not base:
            return []
        rng = np.random.RandomState(
            (zlib.crc32(text.encode("utf-8")) ^ (self.seed * 0x9E3779B1)) & 0x7FFFFFFF
        )
        out = []
        for k in range(n):
            tokens = list(base)
            n_ops = 1 + k % len(_OPS)
            order = rng.permutation(len(_OPS))
            applied = 0
            for op_idx in order:
                if applied >= n_ops:
                    break
                result = _OPS[op_idx](tokens, rng, self.synonyms)
                if result:
                    tokens = result
                    applied += 1
            out.append(" ".join(tokens))
        return out
