"""Dataset records, loaders, filters, and the stratified split."""

from __future__ import annotations

import json
import logging
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

log = logging.getLogger(__name__)

REFLECTION_LABELS = ("NR", "SR", "CR")
DATASETS = ("PAIR", "ANNOMI")

# configurable stand-in; real deployments load their own list from config
DEFAULT_DISFLUENCIES = ("um", "uh", "mm", "mm-hmm", "i mean--")

MIN_CLIENT_WORDS = 16
MIN_COUNSELOR_WORDS = 5


@dataclass(frozen=True)
class Exchange:
    id: str
    dataset: str
    prompt: str
    response: str
    reflection_label: str | None = None
    behavior_label: str | None = None

    def __post_init__(self):
        if self.dataset not in DATASETS:
            raise ValueError(f"unknown dataset {self.dataset!r}")
        if not self.prompt.strip() or not self.response.strip():
            raise ValueError(f"exchange {self.id}: empty prompt or response")
        if self.reflection_label is not None and self.reflection_label not in REFLECTION_LABELS:
            raise ValueError(f"unknown reflection label {self.reflection_label!r}")

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "dataset": self.dataset,
            "prompt": self.prompt,
            "response": self.response,
            "reflection_label": self.reflection_label,
            "behavior_label": self.behavior_label,
        }


@dataclass(frozen=True)
class DataSplit:
    train: tuple[Exchange, ...]
    dev: tuple[Exchange, ...]
    test: tuple[Exchange, ...]
    seed: int

    def all_exchanges(self) -> tuple[Exchange, ...]:
        return self.train + self.dev + self.test


def label_counts(exchanges: list[Exchange]) -> dict[str, int]:
    return dict(Counter(str(e.reflection_label) for e in exchanges))


def load_pair(path: str | Path) -> list[Exchange]:
    """Read labeled exchanges from JSONL; every record must carry a label."""
    out: list[Exchange] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise ValueError(f"{path}: malformed JSON on line {lineno}: {exc}") from exc
            try:
                label = obj["reflection_label"]
                if label is None:
                    raise ValueError(f"{path}: line {lineno}: missing reflection_label")
                if label not in REFLECTION_LABELS:
                    raise ValueError(
                        f"{path}: line {lineno}: unknown reflection label {label!r}"
                    )
                out.append(
                    Exchange(
                        id=str(obj["id"]),
                        dataset=str(obj.get("dataset", "PAIR")),
                        prompt=str(obj["prompt"]),
                        response=str(obj["response"]),
                        reflection_label=label,
                        behavior_label=obj.get("behavior_label"),
                    )
                )
            except KeyError as exc:
                raise ValueError(f"{path}: line {lineno}: missing key {exc}") from exc
    log.info("loaded %d exchanges from %s: %s", len(out), path, label_counts(out))
    return out


def write_jsonl(exchanges: list[Exchange] | tuple[Exchange, ...], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ex in exchanges:
            fh.write(json.dumps(ex.to_json(), ensure_ascii=False) + "\n")


def load_jsonl(path: str | Path) -> list[Exchange]:
    """Like load_pair but tolerates null labels (rewrite-time inputs)."""
    out: list[Exchange] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                out.append(
                    Exchange(
                        id=str(obj["id"]),
                        dataset=str(obj.get("dataset", "PAIR")),
                        prompt=str(obj["prompt"]),
                        response=str(obj["response"]),
                        reflection_label=obj.get("reflection_label"),
                        behavior_label=obj.get("behavior_label"),
                    )
                )
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise ValueError(f"{path}: line {lineno}: {exc}") from exc
    return out


def strip_disfluencies(text: str, disfluencies: tuple[str, ...] = DEFAULT_DISFLUENCIES) -> str:
    """Remove standalone disfluency tokens (case-insensitive, phrase-aware)."""
    phrases = [tuple(d.lower().split()) for d in disfluencies]
    tokens = text.split()
    lowered = [t.lower() for t in tokens]
    kept: list[str] = []
    i = 0
    while i < len(tokens):
        hit = None
        for phrase in phrases:
            if tuple(lowered[i : i + len(phrase)]) == phrase:
                hit = len(phrase)
                break
        if hit:
            i += hit
        else:
            kept.append(tokens[i])
            i += 1
    return " ".join(kept)


def filter_annomi(
    turn_pairs: list[tuple[str, str, str]],
    disfluencies: tuple[str, ...] = DEFAULT_DISFLUENCIES,
    reflection_behavior: str = "reflection",
) -> list[Exchange]:
    """Keep non-reflection counselor turns that survive the length rules.

    turn_pairs holds (client text, counselor text, behavior label) for
    consecutive client-counselor utterances.
    """
    out: list[Exchange] = []
    for client, counselor, behavior in turn_pairs:
        if behavior.strip().lower() == reflection_behavior:
            continue
        client = client.strip()
        counselor = counselor.strip()
        if client.startswith("-") or client.endswith("-"):
            continue
        client = strip_disfluencies(client, disfluencies)
        counselor = strip_disfluencies(counselor, disfluencies)
        if len(client.split()) < MIN_CLIENT_WORDS:
            continue
        if len(counselor.split()) < MIN_COUNSELOR_WORDS:
            continue
        out.append(
            Exchange(
                id=f"annomi-{len(out):04d}",
                dataset="ANNOMI",
                prompt=client,
                response=counselor,
                reflection_label="NR",
                behavior_label=behavior.strip().lower(),
            )
        )
    return out


def _largest_remainder(n: int, ratios: tuple[float, float, float]) -> list[int]:
    exact = [n * r for r in ratios]
    sizes = [int(x) for x in exact]
    leftover = n - sum(sizes)
    # hand leftovers to the largest fractional parts; ties go left to right
    order = sorted(range(3), key=lambda i: (-(exact[i] - sizes[i]), i))
    for i in order[:leftover]:
        sizes[i] += 1
    return sizes


def split(
    data: list[Exchange],
    ratios: tuple[float, float, float] = (0.75, 0.05, 0.20),
    seed: int = 0,
) -> DataSplit:
    """Stratify by reflection label so small classes stay represented."""
    import random as _random

    if abs(sum(ratios) - 1.0) > 1e-9:
        raise ValueError(f"split ratios must sum to 1, got {ratios}")
    rng = _random.Random(seed)
    strata: dict[str, list[Exchange]] = {}
    for ex in data:
        strata.setdefault(str(ex.reflection_label), []).append(ex)

    parts: tuple[list[Exchange], list[Exchange], list[Exchange]] = ([], [], [])
    for key in sorted(strata):
        bucket = list(strata[key])
        rng.shuffle(bucket)
        n_train, n_dev, _ = _largest_remainder(len(bucket), ratios)
        parts[0].extend(bucket[:n_train])
        parts[1].extend(bucket[n_train : n_train + n_dev])
        parts[2].extend(bucket[n_train + n_dev :])
    for part in parts:
        rng.shuffle(part)
    return DataSplit(train=tuple(parts[0]), dev=tuple(parts[1]), test=tuple(parts[2]), seed=seed)
