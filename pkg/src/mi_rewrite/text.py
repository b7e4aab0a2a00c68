"""Word-level text utilities: tokenization, whitespace normalization,
stopwords, and a suffix-stripping stemmer.

Everything here is pure and dependency-free; the rest of the package
builds on these primitives for templates, metrics, and corpus handling.
"""

from __future__ import annotations

import re

# Words keep internal apostrophes ("don't"); every other non-space,
# non-alphanumeric character becomes its own token.
_TOKEN_RE = re.compile(r"[A-Za-z0-9]+(?:'[A-Za-z0-9]+)*|[^\sA-Za-z0-9]")

# Punctuation that attaches to the preceding word when detokenizing.
_CLOSERS = {".", ",", "!", "?", ";", ":", ")", "]", "}", "'", "%"}
_OPENERS = {"(", "[", "{"}


def tokenize_words(text: str) -> list[str]:
    """Split text into word and punctuation tokens, preserving case."""
    return _TOKEN_RE.findall(text)


def detokenize(tokens: list[str]) -> str:
    """Inverse of tokenize_words up to spacing conventions."""
    parts: list[str] = []
    for tok in tokens:
        if parts and tok in _CLOSERS:
            parts[-1] += tok
        elif parts and parts[-1] and parts[-1][-1] in _OPENERS:
            parts[-1] += tok
        else:
            parts.append(tok)
    return " ".join(parts)


def normalize_space(text: str) -> str:
    return " ".join(text.split())


STOPWORDS = frozenset(
    """
    a about above after again against all am an and any are aren't as at be
    because been before being below between both but by can cannot could
    couldn't did didn't do does doesn't doing don't down during each few for
    from further had hadn't has hasn't have haven't having he he'd he'll he's
    her here here's hers herself him himself his how how's i i'd i'll i'm
    i've if in into is isn't it it's its itself let's me more most mustn't my
    myself no nor not of off on once only or other ought our ours ourselves
    out over own same shan't she she'd she'll she's should shouldn't so some
    such than that that's the their theirs them themselves then there there's
    these they they'd they'll they're they've this those through to too under
    until up very was wasn't we we'd we'll we're we've were weren't what
    what's when when's where where's which while who who's whom why why's
    with won't would wouldn't you you'd you'll you're you've your yours
    yourself yourselves
    """.split()
)


def content_words(text: str) -> list[str]:
    """Lowercased alphabetic tokens that are not stopwords."""
    out = []
    for tok in tokenize_words(text):
        low = tok.lower()
        if low.replace("'", "").isalpha() and low not in STOPWORDS:
            out.append(low)
    return out


# ---------------------------------------------------------------------------
# Suffix-stripping stemmer (Porter's algorithm, original rule set).


def _is_cons(word: str, i: int) -> bool:
    ch = word[i]
    if ch in "aeiou":
        return False
    if ch == "y":
        return i == 0 or not _is_cons(word, i - 1)
    return True


def _measure(stem_part: str) -> int:
    # number of VC blocks in the [C](VC)^m[V] decomposition
    n = len(stem_part)
    i = 0
    while i < n and _is_cons(stem_part, i):
        i += 1
    m = 0
    while i < n:
        while i < n and not _is_cons(stem_part, i):
            i += 1
        if i >= n:
            break
        m += 1
        while i < n and _is_cons(stem_part, i):
            i += 1
    return m


def _has_vowel(stem_part: str) -> bool:
    return any(not _is_cons(stem_part, i) for i in range(len(stem_part)))


def _ends_double_cons(word: str) -> bool:
    return len(word) >= 2 and word[-1] == word[-2] and _is_cons(word, len(word) - 1)


def _ends_cvc(word: str) -> bool:
    if len(word) < 3:
        return False
    n = len(word)
    return (
        _is_cons(word, n - 3)
        and not _is_cons(word, n - 2)
        and _is_cons(word, n - 1)
        and word[-1] not in "wxy"
    )


# (suffix, replacement) pairs; within a step the longest matching suffix is
# tried once and shorter ones are not consulted afterwards.
_STEP2 = [
    ("ational", "ate"), ("tional", "tion"), ("enci", "ence"), ("anci", "ance"),
    ("izer", "ize"), ("abli", "able"), ("alli", "al"), ("entli", "ent"),
    ("eli", "e"), ("ousli", "ous"), ("ization", "ize"), ("ation", "ate"),
    ("ator", "ate"), ("alism", "al"), ("iveness", "ive"), ("fulness", "ful"),
    ("ousness", "ous"), ("aliti", "al"), ("iviti", "ive"), ("biliti", "ble"),
]
_STEP3 = [
    ("icate", "ic"), ("ative", ""), ("alize", "al"), ("iciti", "ic"),
    ("ical", "ic"), ("ful", ""), ("ness", ""),
]
_STEP4 = [
    "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement", "ment",
    "ent", "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
]


def _longest_match(word: str, suffixes: list[str]) -> str | None:
    best = None
    for suf in suffixes:
        if word.endswith(suf) and (best is None or len(suf) > len(best)):
            best = suf
    return best


def stem(word: str) -> str:
    """Strip common English suffixes; words of length <= 2 pass through."""
    w = word.lower()
    if len(w) <= 2 or not w.isalpha():
        return w

    # step 1a
    if w.endswith("sses"):
        w = w[:-2]
    elif w.endswith("ies"):
        w = w[:-2]
    elif w.endswith("ss"):
        pass
    elif w.endswith("s"):
        w = w[:-1]

    # step 1b
    stripped = False
    if w.endswith("eed"):
        if _measure(w[:-3]) > 0:
            w = w[:-1]
    elif w.endswith("ed"):
        if _has_vowel(w[:-2]):
            w = w[:-2]
            stripped = True
    elif w.endswith("ing"):
        if _has_vowel(w[:-3]):
            w = w[:-3]
            stripped = True
    if stripped:
        if w.endswith(("at", "bl", "iz")):
            w += "e"
        elif _ends_double_cons(w) and not w.endswith(("l", "s", "z")):
            w = w[:-1]
        elif _measure(w) == 1 and _ends_cvc(w):
            w += "e"

    # step 1c
    if w.endswith("y") and _has_vowel(w[:-1]):
        w = w[:-1] + "i"

    # step 2
    suf = _longest_match(w, [s for s, _ in _STEP2])
    if suf is not None:
        repl = dict(_STEP2)[suf]
        if _measure(w[: -len(suf)]) > 0:
            w = w[: -len(suf)] + repl

    # step 3
    suf = _longest_match(w, [s for s, _ in _STEP3])
    if suf is not None:
        repl = dict(_STEP3)[suf]
        if _measure(w[: -len(suf)]) > 0:
            w = w[: -len(suf)] + repl

    # step 4
    suf = _longest_match(w, _STEP4)
    if suf is not None:
        base = w[: -len(suf)]
        if _measure(base) > 1 and (suf != "ion" or base.endswith(("s", "t"))):
            w = base

    # step 5a
    if w.endswith("e"):
        base = w[:-1]
        m = _measure(base)
        if m > 1 or (m == 1 and not _ends_cvc(base)):
            w = base

    # step 5b
    if _measure(w) > 1 and _ends_double_cons(w) and w.endswith("l"):
        w = w[:-1]

    return w


def stem_tokens(tokens: list[str]) -> list[str]:
    return [stem(t) for t in tokens]
