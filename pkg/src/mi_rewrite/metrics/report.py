"""Run every system over a dataset and aggregate the automatic metrics."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from mi_rewrite.corpus import Exchange
from mi_rewrite.metrics.overlap import reference_similarity
from mi_rewrite.metrics.specificity import fit_idf, normalize_scores, raw_specificity
from mi_rewrite.metrics.ter import ter
from mi_rewrite.metrics.topicrank import keyphrase_coverage

# bounded [0,1]-scale metrics that tables show as percentages
PERCENT_METRICS = ("change_in_reflection", "keyphrase_coverage", "coherence", "specificity")
METRIC_COLUMNS = (
    "change_in_reflection",
    "keyphrase_coverage",
    "edit_rate",
    "perplexity",
    "coherence",
    "specificity",
    "bleu",
    "meteor",
)

CSV_COLUMNS = (
    "id", "system", "seed", "dataset", "reflection_label", "behavior_label",
    "original_score", "rewrite_score", "stopped_reason", "attempts",
) + METRIC_COLUMNS + ("original", "rewrite")


def change_in_reflection(scorer, prompt: str, original: str, rewrite: str) -> float:
    """Scorer delta between the rewrite and the original response."""
    after = float(scorer.score_pair(prompt, rewrite))
    before = float(scorer.score_pair(prompt, original))
    return after - before


def bootstrap_ci(
    values, n_resamples: int = 1000, seed: int = 0, alpha: float = 0.05
) -> tuple[float, float]:
    """Percentile bootstrap interval for the mean."""
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        return (math.nan, math.nan)
    if arr.size == 1:
        return (float(arr[0]), float(arr[0]))
    rng = np.random.default_rng(seed)
    idx = rng.integers(0, arr.size, size=(n_resamples, arr.size))
    means = arr[idx].mean(axis=1)
    lo, hi = np.percentile(means, [100 * alpha / 2, 100 * (1 - alpha / 2)])
    return float(lo), float(hi)


@dataclass(frozen=True)
class MetricReport:
    records: tuple[dict, ...]
    aggregates: dict
    groups: dict
    omitted: tuple[str, ...]
    seeds: tuple[int, ...]

    def to_json(self) -> dict:
        return {
            "seeds": list(self.seeds),
            "omitted": list(self.omitted),
            "aggregates": self.aggregates,
            "groups": self.groups,
            "records": list(self.records),
        }


def evaluate(
    systems,
    dataset: list[Exchange],
    scorer,
    idf_texts: list[str] | None = None,
    lm=None,
    coherence_model=None,
    references: dict[str, str] | None = None,
    seeds: tuple[int, ...] = (0,),
    n_resamples: int = 1000,
) -> MetricReport:
    """Rewrite each exchange under each system and score the outputs.

    systems is either {name: system} or a callable seed -> {name: system}
    for multi-seed runs; each system exposes rewrite(prompt, response).
    Missing lm/coherence models drop those columns and are flagged in
    `omitted` rather than failing the run.
    """
    omitted = tuple(
        name
        for name, model in (("perplexity", lm), ("coherence", coherence_model))
        if model is None
    )
    if not dataset:
        return MetricReport((), {}, {}, omitted, tuple(seeds))

    idf = fit_idf(idf_texts if idf_texts is not None else [ex.response for ex in dataset])
    original_scores: dict[str, float] = {}
    records: list[dict] = []
    for seed in seeds:
        world = systems(seed) if callable(systems) else systems
        for name, system in world.items():
            for ex in dataset:
                if ex.id not in original_scores:
                    original_scores[ex.id] = float(scorer.score_pair(ex.prompt, ex.response))
                result = system.rewrite(ex.prompt, ex.response)
                rewrite = result.final
                rec = {
                    "id": ex.id,
                    "system": name,
                    "seed": seed,
                    "dataset": ex.dataset,
                    "reflection_label": ex.reflection_label,
                    "behavior_label": ex.behavior_label,
                    "original": ex.response,
                    "rewrite": rewrite,
                    "original_score": original_scores[ex.id],
                    "rewrite_score": float(scorer.score_pair(ex.prompt, rewrite)),
                    "stopped_reason": result.stopped_reason,
                    "attempts": len(result.attempts),
                    "keyphrase_coverage": keyphrase_coverage(ex.response, rewrite),
                    "edit_rate": ter(ex.response, rewrite),
                    "perplexity": lm.perplexity(rewrite) if lm else None,
                    "coherence": (
                        coherence_model.coherence(ex.prompt, rewrite)
                        if coherence_model
                        else None
                    ),
                    "specificity": raw_specificity(idf, rewrite),
                }
                rec["change_in_reflection"] = rec["rewrite_score"] - rec["original_score"]
                if references and ex.id in references:
                    rec.update(reference_similarity(rewrite, references[ex.id]))
                else:
                    rec["bleu"] = None
                    rec["meteor"] = None
                records.append(rec)

    # specificity is min-max scaled over every rewrite in this run so the
    # systems stay comparable on one scale
    scaled = normalize_scores([r["specificity"] for r in records])
    for rec, value in zip(records, scaled):
        rec["specificity"] = value

    aggregates = _aggregate(records, n_resamples)
    groups = _grouped(records)
    return MetricReport(tuple(records), aggregates, groups, omitted, tuple(seeds))


def _values(records, metric):
    return [r[metric] for r in records if r.get(metric) is not None]


def _aggregate(records: list[dict], n_resamples: int) -> dict:
    out: dict = {}
    for name in sorted({r["system"] for r in records}):
        mine = [r for r in records if r["system"] == name]
        entry: dict = {"n": len(mine), "metrics": {}, "percent": {}}
        for metric in METRIC_COLUMNS:
            values = _values(mine, metric)
            if not values:
                continue
            mean = float(np.mean(values))
            lo, hi = bootstrap_ci(values, n_resamples=n_resamples)
            entry["metrics"][metric] = {"mean": mean, "ci_low": lo, "ci_high": hi}
            if metric in PERCENT_METRICS:
                entry["percent"][metric] = 100.0 * mean
        out[name] = entry
    return out


def _grouped(records: list[dict]) -> dict:
    out: dict = {}
    for key in ("dataset", "reflection_label", "behavior_label"):
        by_value: dict = {}
        for rec in records:
            value = rec[key] if rec[key] is not None else "unlabeled"
            slot = by_value.setdefault(str(value), {}).setdefault(
                rec["system"], {"n": 0}
            )
            slot["n"] += 1
        for value, by_system in by_value.items():
            for system, slot in by_system.items():
                mine = [
                    r
                    for r in records
                    if r["system"] == system
                    and str(r[key] if r[key] is not None else "unlabeled") == value
                ]
                for metric in METRIC_COLUMNS:
                    values = _values(mine, metric)
                    if values:
                        slot[metric] = float(np.mean(values))
        out[key] = by_value
    return out


def save_report(report: MetricReport, out_dir: str | Path) -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / "report.json"
    json_path.write_text(json.dumps(report.to_json(), indent=2))
    csv_path = out_dir / "records.csv"
    with csv_path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS, extrasaction="ignore")
        writer.writeheader()
        for rec in report.records:
            writer.writerow({k: ("" if rec.get(k) is None else rec.get(k)) for k in CSV_COLUMNS})
    return json_path, csv_path
