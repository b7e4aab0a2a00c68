"""Token-level attention maps over (prompt, response) pairs.

The encoder emits per-head attention rows; this module turns them into a
single importance score per token: normalize each head's row to sum to 1,
max-pool across heads, zero out everything that is not part of the
response, and record the mean score over response tokens.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np


class Segment(Enum):
    SPECIAL = "special"
    PROMPT = "prompt"
    RESPONSE = "response"


@dataclass(frozen=True)
class TokenizedPair:
    """Exact token sequence fed to the encoder, with per-token roles.

    response_words holds the word tokens of the raw response; word_index
    maps each RESPONSE token to the word it belongs to, so subword-level
    scores can be lifted back to words. spans are character offsets into
    the raw response.
    """

    tokens: tuple[str, ...]
    segments: tuple[Segment, ...]
    response_words: tuple[str, ...]
    word_index: tuple[int | None, ...]
    spans: tuple[tuple[int, int] | None, ...]

    def __post_init__(self):
        n = len(self.tokens)
        if not (len(self.segments) == len(self.word_index) == len(self.spans) == n):
            raise ValueError("per-token fields must have equal length")
        for i, seg in enumerate(self.segments):
            if seg is Segment.RESPONSE:
                wi = self.word_index[i]
                if wi is None or not 0 <= wi < len(self.response_words):
                    raise ValueError(f"response token {i} lacks a valid word index")
                if self.spans[i] is None:
                    raise ValueError(f"response token {i} lacks a span")
            elif self.word_index[i] is not None:
                raise ValueError(f"non-response token {i} must not map to a word")

    def response_positions(self) -> list[int]:
        return [i for i, s in enumerate(self.segments) if s is Segment.RESPONSE]


@dataclass(frozen=True)
class AttentionMap:
    """Per-token importance scores A_i plus their response-mean."""

    scores: np.ndarray
    mean_response_score: float
    source: TokenizedPair

    def __post_init__(self):
        if len(self.scores) != len(self.source.tokens):
            raise ValueError("scores must align with source tokens")
        for i, seg in enumerate(self.source.segments):
            if seg is not Segment.RESPONSE and self.scores[i] != 0.0:
                raise ValueError("non-response positions must carry zero score")
        pos = self.source.response_positions()
        expected = float(np.mean(self.scores[pos])) if pos else 0.0
        if abs(expected - self.mean_response_score) > 1e-9:
            raise ValueError("mean_response_score does not match scores")


def pool_heads(head_rows: np.ndarray) -> np.ndarray:
    """Normalize each head's row to sum to 1, then max-pool across heads.

    head_rows has shape (heads, tokens). Rows summing to zero are left
    as zeros rather than dividing by zero.
    """
    rows = np.asarray(head_rows, dtype=np.float64)
    if rows.ndim != 2:
        raise ValueError("expected (heads, tokens) array")
    sums = rows.sum(axis=1, keepdims=True)
    safe = np.where(sums > 0, sums, 1.0)
    return (rows / safe).max(axis=0)


def build_attention_map(pair: TokenizedPair, head_rows: np.ndarray) -> AttentionMap:
    """Pool per-head rows and zero every non-response position."""
    pos = pair.response_positions()
    if not pos:
        raise ValueError("pair has no response tokens")
    pooled = pool_heads(head_rows)
    if len(pooled) != len(pair.tokens):
        raise ValueError("head rows do not align with tokens")
    scores = np.zeros_like(pooled)
    scores[pos] = pooled[pos]
    mean = float(np.mean(scores[pos]))
    return AttentionMap(scores=scores, mean_response_score=mean, source=pair)
