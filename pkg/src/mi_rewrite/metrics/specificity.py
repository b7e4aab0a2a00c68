"""IDF-backed specificity scoring.

Raw score: mean inverse document frequency of a response's content
words, computed against training-split statistics. Reports min-max
normalize raw scores over the evaluated set, so the values only mean
something relative to the batch they were normalized with.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from mi_rewrite.text import content_words


@dataclass(frozen=True)
class IdfTable:
    n_docs: int
    doc_freq: dict[str, int] = field(default_factory=dict)

    def idf(self, word: str) -> float:
        # unseen words get the table maximum (df = 0)
        df = self.doc_freq.get(word.lower(), 0)
        return math.log((1 + self.n_docs) / (1 + df)) + 1.0


def fit_idf(texts: list[str]) -> IdfTable:
    if not texts:
        raise ValueError("at least one training text required")
    doc_freq: dict[str, int] = {}
    for text in texts:
        for word in set(content_words(text)):
            doc_freq[word] = doc_freq.get(word, 0) + 1
    return IdfTable(n_docs=len(texts), doc_freq=doc_freq)


def raw_specificity(table: IdfTable, response: str) -> float:
    """Mean IDF of content words; 0.0 when none survive stopword removal."""
    words = content_words(response)
    if not words:
        return 0.0
    return sum(table.idf(w) for w in words) / len(words)


def normalize_scores(values: list[float]) -> list[float]:
    """Min-max normalize over the evaluated set; constant sets map to 0."""
    if not values:
        return []
    lo = min(values)
    hi = max(values)
    if hi == lo:
        return [0.0] * len(values)
    return [(v - lo) / (hi - lo) for v in values]


def specificity_scores(table: IdfTable, responses: list[str]) -> list[float]:
    return normalize_scores([raw_specificity(table, r) for r in responses])
