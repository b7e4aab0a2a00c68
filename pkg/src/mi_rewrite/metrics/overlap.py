"""Reference-similarity metrics: smoothed sentence BLEU and METEOR."""

from __future__ import annotations

import math
from collections import Counter

from mi_rewrite.text import stem, tokenize_words

BLEU_MAX_ORDER = 4
BLEU_FLOOR = 0.1

METEOR_ALPHA = 0.9
METEOR_BETA = 3.0
METEOR_GAMMA = 0.5


def _tokens(text: str) -> list[str]:
    return [t.lower() for t in tokenize_words(text)]


def _ngram_counts(tokens: list[str], order: int) -> Counter:
    return Counter(
        tuple(tokens[i : i + order]) for i in range(len(tokens) - order + 1)
    )


def sentence_bleu(
    hypothesis: str,
    reference: str,
    max_order: int = BLEU_MAX_ORDER,
    floor: float = BLEU_FLOOR,
) -> float:
    """Sentence BLEU on a 0-100 scale with floor-smoothed precisions.

    Orders with zero hypothesis n-grams are dropped rather than smoothed,
    so short hypotheses are scored over the orders they can express.
    """
    hyp = _tokens(hypothesis)
    ref = _tokens(reference)
    if not ref:
        raise ValueError("reference must be non-empty")
    if not hyp:
        return 0.0

    log_sum = 0.0
    used = 0
    for order in range(1, max_order + 1):
        hyp_grams = _ngram_counts(hyp, order)
        total = sum(hyp_grams.values())
        if total == 0:
            continue
        ref_grams = _ngram_counts(ref, order)
        matched = sum(min(c, ref_grams[g]) for g, c in hyp_grams.items())
        precision = matched / total if matched > 0 else floor / total
        log_sum += math.log(precision)
        used += 1
    if used == 0:
        return 0.0

    brevity = 1.0 if len(hyp) >= len(ref) else math.exp(1.0 - len(ref) / len(hyp))
    return 100.0 * brevity * math.exp(log_sum / used)


def _align(hyp: list[str], ref: list[str]) -> list[tuple[int, int]]:
    """Stage-wise unigram alignment: exact match first, stems second.

    Each hypothesis token takes the first still-free reference slot,
    scanned left to right. Returns (hyp_index, ref_index) pairs.
    """
    pairs: list[tuple[int, int]] = []
    hyp_free = [True] * len(hyp)
    ref_free = [True] * len(ref)
    for keyed in (hyp, [stem(t) for t in hyp]):
        ref_keys = ref if keyed is hyp else [stem(t) for t in ref]
        for i, key in enumerate(keyed):
            if not hyp_free[i]:
                continue
            for j, ref_key in enumerate(ref_keys):
                if ref_free[j] and ref_key == key:
                    pairs.append((i, j))
                    hyp_free[i] = False
                    ref_free[j] = False
                    break
    return sorted(pairs)


def _chunk_count(pairs: list[tuple[int, int]]) -> int:
    chunks = 0
    prev = None
    for i, j in pairs:
        if prev is None or (i, j) != (prev[0] + 1, prev[1] + 1):
            chunks += 1
        prev = (i, j)
    return chunks


def meteor(hypothesis: str, reference: str) -> float:
    """METEOR with exact and stem matching stages, on a 0-1 scale.

    The fragmentation penalty is rescaled so a single contiguous match
    carries none: frag = (chunks - 1) / (matches - 1). Identity therefore
    scores exactly 1.0; fully scattered matches still halve the score.
    """
    hyp = _tokens(hypothesis)
    ref = _tokens(reference)
    if not ref:
        raise ValueError("reference must be non-empty")
    if not hyp:
        return 0.0

    pairs = _align(hyp, ref)
    matches = len(pairs)
    if matches == 0:
        return 0.0

    precision = matches / len(hyp)
    recall = matches / len(ref)
    f_mean = (precision * recall) / (
        METEOR_ALPHA * precision + (1.0 - METEOR_ALPHA) * recall
    )
    if matches == 1:
        frag = 0.0
    else:
        frag = (_chunk_count(pairs) - 1) / (matches - 1)
    penalty = METEOR_GAMMA * frag**METEOR_BETA
    return f_mean * (1.0 - penalty)


def reference_similarity(rewrite: str, reference: str) -> dict[str, float]:
    """Both similarity scores against a single reference."""
    return {
        "bleu": sentence_bleu(rewrite, reference),
        "meteor": meteor(rewrite, reference),
    }
