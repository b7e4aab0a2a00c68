"""Keyphrase extraction: noun/adjective candidates, stem-overlap topic
clustering, and a random-walk ranking over the topic graph.

Topics are clustered bottom-up with average linkage until no pair of
clusters reaches the similarity threshold. The topic graph is complete,
weighted by reciprocal word-offset distances between candidate
occurrences, and ranked with a damped stationary random walk. Each
topic contributes its first-occurring candidate.
"""

from __future__ import annotations

from dataclasses import dataclass

import networkx as nx
import numpy as np

from ..postag import ADJ, DEFAULT_TAGGER, NOUN
from ..text import stem, tokenize_words

SIMILARITY_THRESHOLD = 0.25
DAMPING = 0.85


@dataclass(frozen=True)
class KeyphraseSet:
    """Ranked keyphrases: stemmed phrase strings plus surface forms."""

    phrases: tuple[str, ...]
    surfaces: tuple[str, ...]

    def __post_init__(self):
        if len(self.phrases) != len(self.surfaces):
            raise ValueError("phrases and surfaces must align")

    @property
    def empty(self) -> bool:
        return not self.phrases


@dataclass(frozen=True)
class _Candidate:
    stems: tuple[str, ...]
    surface: str
    positions: tuple[int, ...]  # word offsets of each occurrence start

    @property
    def first_position(self) -> int:
        return self.positions[0]


def extract_candidates(text: str, tagger=DEFAULT_TAGGER) -> list[_Candidate]:
    """Maximal noun/adjective runs, merged by identical stem sequences."""
    tokens = tokenize_words(text)
    tags = tagger(tokens)
    runs: list[tuple[int, list[str]]] = []
    current: list[str] = []
    start = 0
    for i, (tok, tag) in enumerate(zip(tokens, tags)):
        if tag in (NOUN, ADJ):
            if not current:
                start = i
            current.append(tok)
        elif current:
            runs.append((start, current))
            current = []
    if current:
        runs.append((start, current))

    by_stems: dict[tuple[str, ...], dict] = {}
    for pos, words in runs:
        stems = tuple(stem(w) for w in words)
        entry = by_stems.setdefault(
            stems, {"surface": " ".join(w.lower() for w in words), "positions": []}
        )
        entry["positions"].append(pos)
    out = [
        _Candidate(stems=stems, surface=e["surface"], positions=tuple(sorted(e["positions"])))
        for stems, e in by_stems.items()
    ]
    out.sort(key=lambda c: c.first_position)
    return out


def stem_overlap(a: tuple[str, ...], b: tuple[str, ...]) -> float:
    sa, sb = set(a), set(b)
    union = sa | sb
    if not union:
        return 0.0
    return len(sa & sb) / len(union)


def cluster_topics(
    candidates: list[_Candidate], threshold: float = SIMILARITY_THRESHOLD
) -> list[list[int]]:
    """Average-linkage agglomeration over candidate indices."""
    clusters = [[i] for i in range(len(candidates))]
    sim = [
        [stem_overlap(a.stems, b.stems) for b in candidates] for a in candidates
    ]

    def linkage(c1: list[int], c2: list[int]) -> float:
        return sum(sim[i][j] for i in c1 for j in c2) / (len(c1) * len(c2))

    while len(clusters) > 1:
        best = None
        best_val = threshold
        for i in range(len(clusters)):
            for j in range(i + 1, len(clusters)):
                val = linkage(clusters[i], clusters[j])
                if val >= best_val and (best is None or val > best_val):
                    best, best_val = (i, j), val
        if best is None:
            break
        i, j = best
        clusters[i] = clusters[i] + clusters[j]
        del clusters[j]
    return clusters


def pagerank_scores(weights: np.ndarray, damping: float = DAMPING) -> np.ndarray:
    """Stationary scores of the damped walk on an undirected weighted graph."""
    weights = np.asarray(weights, dtype=np.float64)
    n = weights.shape[0]
    if weights.shape != (n, n):
        raise ValueError("weights must be square")
    if n == 1:
        return np.array([1.0])
    graph = nx.from_numpy_array(weights)
    ranked = nx.pagerank(graph, alpha=damping, weight="weight", tol=1e-12, max_iter=5000)
    return np.array([ranked[i] for i in range(n)])


def topic_graph_weights(
    candidates: list[_Candidate], topics: list[list[int]]
) -> np.ndarray:
    """Reciprocal-distance weights between every pair of topics."""
    n = len(topics)
    weights = np.zeros((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            total = 0.0
            for i in topics[a]:
                for j in topics[b]:
                    for pi in candidates[i].positions:
                        for pj in candidates[j].positions:
                            total += 1.0 / max(1, abs(pi - pj))
            weights[a, b] = weights[b, a] = total
    return weights


def extract_keyphrases(text: str, tagger=DEFAULT_TAGGER) -> KeyphraseSet:
    """Ranked, deduplicated keyphrases of the text; empty when no
    noun/adjective candidate exists."""
    candidates = extract_candidates(text, tagger=tagger)
    if not candidates:
        return KeyphraseSet(phrases=(), surfaces=())
    topics = cluster_topics(candidates)
    weights = topic_graph_weights(candidates, topics)
    scores = pagerank_scores(weights)

    def topic_first_position(topic: list[int]) -> int:
        return min(candidates[i].first_position for i in topic)

    order = sorted(
        range(len(topics)),
        key=lambda t: (-scores[t], topic_first_position(topics[t])),
    )
    phrases = []
    surfaces = []
    for t in order:
        rep = min(topics[t], key=lambda i: candidates[i].first_position)
        phrases.append(" ".join(candidates[rep].stems))
        surfaces.append(candidates[rep].surface)
    return KeyphraseSet(phrases=tuple(phrases), surfaces=tuple(surfaces))


def _contains_contiguous(haystack: list[str], needle: list[str]) -> bool:
    if not needle or len(needle) > len(haystack):
        return False
    for i in range(len(haystack) - len(needle) + 1):
        if haystack[i : i + len(needle)] == needle:
            return True
    return False


def keyphrase_coverage(original: str, rewrite: str, tagger=DEFAULT_TAGGER) -> float:
    """Fraction of the original's keyphrases whose stems appear
    contiguously in the rewrite; degenerate originals score 1.0."""
    keys = extract_keyphrases(original, tagger=tagger)
    if keys.empty:
        return 1.0
    rewrite_stems = [stem(t) for t in tokenize_words(rewrite)]
    hit = sum(
        1 for p in keys.phrases if _contains_contiguous(rewrite_stems, p.split())
    )
    return hit / len(keys.phrases)
