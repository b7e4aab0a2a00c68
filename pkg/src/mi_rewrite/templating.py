"""Masked-template extraction from counselor responses.

Three extractors produce the same Template shape: the attention-threshold
rule (mask a word when any of its tokens scores at least C times the
response mean), and two n-gram salience baselines that mask words covered
by grams whose corpus-frequency ratio crosses a threshold.
"""

from __future__ import annotations

from dataclasses import dataclass

from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .attention import AttentionMap
from .text import tokenize_words

MASK_SENTINEL = "<mask>"

ATTENTION = "ATTENTION"
DRG = "DRG"
TG = "TG"

_EXTRACTORS = (ATTENTION, DRG, TG)


@dataclass(frozen=True)
class Template:
    """A response's words plus per-word mask flags."""

    words: tuple[str, ...]
    masked: tuple[bool, ...]
    content_weight: float
    extractor: str

    def __post_init__(self):
        if len(self.words) != len(self.masked):
            raise ValueError("words and masked must align")
        if self.content_weight <= 0:
            raise ValueError("content_weight must be positive")
        if self.extractor not in _EXTRACTORS:
            raise ValueError(f"unknown extractor {self.extractor!r}")

    @property
    def noop(self) -> bool:
        """True when nothing is masked; the rewriter returns the original."""
        return not any(self.masked)

    def to_json(self) -> dict:
        return {
            "words": list(self.words),
            "masked": list(self.masked),
            "content_weight": self.content_weight,
            "extractor": self.extractor,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "Template":
        return cls(
            words=tuple(obj["words"]),
            masked=tuple(bool(b) for b in obj["masked"]),
            content_weight=float(obj["content_weight"]),
            extractor=str(obj["extractor"]),
        )


def make_template(attn: AttentionMap, content_weight: float) -> Template:
    """Mask word w iff any of its tokens satisfies A_i >= C * mean.

    Prompt and special positions carry zero score and no word index, so
    they can never contribute a mask.
    """
    if content_weight <= 0:
        raise ValueError("content_weight must be positive")
    pair = attn.source
    if not pair.response_positions():
        raise ValueError("attention map covers no response tokens")
    threshold = content_weight * attn.mean_response_score
    masked = [False] * len(pair.response_words)
    for i in pair.response_positions():
        if attn.scores[i] >= threshold:
            masked[pair.word_index[i]] = True
    return Template(
        words=tuple(pair.response_words),
        masked=tuple(masked),
        content_weight=content_weight,
        extractor=ATTENTION,
    )


def render_template(t: Template, sentinel: str = MASK_SENTINEL) -> str:
    """Collapse each run of masked words to a single sentinel."""
    parts: list[str] = []
    for word, is_masked in zip(t.words, t.masked):
        if is_masked:
            if not parts or parts[-1] != sentinel:
                parts.append(sentinel)
        else:
            parts.append(word)
    return " ".join(parts)


# ---------------------------------------------------------------------------
# N-gram salience baselines.


def _iter_ngrams(tokens: list[str], orders: tuple[int, ...]):
    for n in orders:
        for i in range(len(tokens) - n + 1):
            yield i, n, tuple(tokens[i : i + n])


class SalienceTable:
    """N-gram counts over a reflection corpus and a non-reflection corpus."""

    def __init__(self, orders: tuple[int, ...] = (1, 2, 3), smoothing: float = 1.0):
        if smoothing <= 0:
            raise ValueError("smoothing must be positive")
        self.orders = tuple(orders)
        self.smoothing = float(smoothing)
        self.refl_counts: dict[tuple[str, ...], int] = {}
        self.nonrefl_counts: dict[tuple[str, ...], int] = {}

    def add(self, text: str, is_reflection: bool):
        counts = self.refl_counts if is_reflection else self.nonrefl_counts
        tokens = [t.lower() for t in tokenize_words(text)]
        for _, _, gram in _iter_ngrams(tokens, self.orders):
            counts[gram] = counts.get(gram, 0) + 1

    @classmethod
    def build(
        cls,
        reflection_texts: list[str],
        nonreflection_texts: list[str],
        orders: tuple[int, ...] = (1, 2, 3),
        smoothing: float = 1.0,
    ) -> "SalienceTable":
        table = cls(orders=orders, smoothing=smoothing)
        for text in reflection_texts:
            table.add(text, is_reflection=True)
        for text in nonreflection_texts:
            table.add(text, is_reflection=False)
        return table


def ngram_salience(gram: tuple[str, ...], table: SalienceTable) -> float:
    """Smoothed share of the gram's occurrences that are non-reflective."""
    lam = table.smoothing
    c_non = table.nonrefl_counts.get(gram, 0)
    c_ref = table.refl_counts.get(gram, 0)
    return (c_non + lam) / (c_non + c_ref + 2 * lam)


def _powered_salience(gram: tuple[str, ...], table: SalienceTable, gamma: float) -> float:
    lam = table.smoothing
    c_non = table.nonrefl_counts.get(gram, 0) ** gamma
    c_ref = table.refl_counts.get(gram, 0) ** gamma
    return (c_non + lam) / (c_non + c_ref + 2 * lam)


def drg_extract(response: str, table: SalienceTable, threshold: float = 0.3) -> Template:
    """Mask every word covered by a gram whose salience crosses threshold."""
    if not 0 < threshold < 1:
        raise ValueError("threshold must lie in (0, 1)")
    words = tokenize_words(response)
    lowered = [w.lower() for w in words]
    masked = [False] * len(words)
    for start, n, gram in _iter_ngrams(lowered, table.orders):
        if ngram_salience(gram, table) >= threshold:
            for k in range(start, start + n):
                masked[k] = True
    return Template(
        words=tuple(words), masked=tuple(masked), content_weight=1.0, extractor=DRG
    )


def tg_extract(
    response: str,
    table: SalienceTable,
    gamma: float = 0.75,
    threshold: float = 0.5,
) -> Template:
    """Like drg_extract, but only grams seen in BOTH corpora are candidates
    and counts are raised to gamma before smoothing."""
    if not 0 < gamma <= 1:
        raise ValueError("gamma must lie in (0, 1]")
    if not 0 < threshold < 1:
        raise ValueError("threshold must lie in (0, 1)")
    words = tokenize_words(response)
    lowered = [w.lower() for w in words]
    masked = [False] * len(words)
    for start, n, gram in _iter_ngrams(lowered, table.orders):
        if table.refl_counts.get(gram, 0) == 0 or table.nonrefl_counts.get(gram, 0) == 0:
            continue
        if _powered_salience(gram, table, gamma) >= threshold:
            for k in range(start, start + n):
                masked[k] = True
    return Template(
        words=tuple(words), masked=tuple(masked), content_weight=1.0, extractor=TG
    )


# ---------------------------------------------------------------------------
# Estimator wrappers so the salience extractors compose with pipelines.


class _SalienceExtractorBase(BaseEstimator, TransformerMixin):
    def fit(self, X, y):
        """X: list of response texts; y: per-text booleans, True = reflection."""
        X = list(X)
        y = list(y)
        if len(X) != len(y):
            raise ValueError("X and y must have equal length")
        table = SalienceTable(orders=self.ngram_orders, smoothing=self.smoothing)
        for text, is_refl in zip(X, y):
            table.add(text, is_reflection=bool(is_refl))
        self.table_ = table
        return self

    def transform(self, X) -> list[Template]:
        check_is_fitted(self, "table_")
        return [self._extract(text) for text in X]


class DrgTemplateExtractor(_SalienceExtractorBase):
    """Fit salience counts, then mask high-salience grams in new responses."""

    def __init__(self, threshold: float = 0.3, ngram_orders: tuple[int, ...] = (1, 2, 3),
                 smoothing: float = 1.0):
        self.threshold = threshold
        self.ngram_orders = ngram_orders
        self.smoothing = smoothing

    def _extract(self, text: str) -> Template:
        return drg_extract(text, self.table_, threshold=self.threshold)


class TgTemplateExtractor(_SalienceExtractorBase):
    """Salience masking restricted to grams attested in both corpora."""

    def __init__(self, gamma: float = 0.75, threshold: float = 0.5,
                 ngram_orders: tuple[int, ...] = (1, 2, 3), smoothing: float = 1.0):
        self.gamma = gamma
        self.threshold = threshold
        self.ngram_orders = ngram_orders
        self.smoothing = smoothing

    def _extract(self, text: str) -> Template:
        return tg_extract(text, self.table_, gamma=self.gamma, threshold=self.threshold)
