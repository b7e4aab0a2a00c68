"""Command-line workflow: preprocess, train, rewrite, evaluate, serve."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from mi_rewrite.checkpoint import (
    ARCH_GENERATOR,
    load_checkpoint,
    save_checkpoint,
)
from mi_rewrite.config import PORT_ENV, PipelineConfig
from mi_rewrite.corpus import Exchange, label_counts, load_jsonl, load_pair, split, write_jsonl
from mi_rewrite.models.discriminator import ReflectionDiscriminator
from mi_rewrite.models.generator import FillGenerator, build_training_example
from mi_rewrite.models.scorer import ReflectionScorer
from mi_rewrite.paraphrase import RuleParaphraser
from mi_rewrite.pipeline import SYSTEMS, RewritePipeline, SingleShotBaseline
from mi_rewrite.templating import DrgTemplateExtractor, TgTemplateExtractor, make_template

TRAINABLE = ("discriminator", "scorer", "generator")
MIXES = ("1:1", "augmented-only", "plain-only")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mi-rewrite")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="validate, filter, and split raw corpora")
    p.add_argument("--pair", type=Path, help="labeled exchange JSONL")
    p.add_argument("--annomi", type=Path, help="raw turn JSONL with client/counselor/behavior keys")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("train", help="fit one model and write a checkpoint")
    p.add_argument("model", choices=TRAINABLE)
    p.add_argument("--data", type=Path, required=True, help="directory produced by preprocess")
    p.add_argument("--config", type=Path, required=True, help="JSON with trainer settings")
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--paraphrase", choices=("on", "off"), default="off",
                   help="generator only: add paraphrase-templated examples")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("rewrite", help="rewrite one response and print the result JSON")
    p.add_argument("--prompt", required=True)
    p.add_argument("--response", required=True)
    p.add_argument("--config", type=Path, default=Path("pipeline.json"))
    p.set_defaults(func=cmd_rewrite)

    p = sub.add_parser("evaluate", help="run systems over a test set and write a report")
    p.add_argument("--systems", default="verve", help=f"comma list from {SYSTEMS}")
    p.add_argument("--data", type=Path, required=True)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--seeds", type=int, default=1)
    p.add_argument("--config", type=Path, default=None,
                   help="pipeline config JSON; defaults to <data>/pipeline.json")
    p.add_argument("--base-generator", type=Path, default=None,
                   help="checkpoint for the 'base' system's generator")
    p.add_argument("--references", type=Path, default=None,
                   help="JSONL of {id, reference} for BLEU/METEOR")
    p.add_argument("--limit", type=int, default=None, help="evaluate only the first N exchanges")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--port", type=int, default=None)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--config", type=Path, default=Path("pipeline.json"))
    p.set_defaults(func=cmd_serve)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse prints usage; 2 for unknown flags
        return int(exc.code or 0)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


# -------------------------------------------------- helpers


def _read_config_file(path: Path) -> dict:
    if not path.exists():
        raise FileNotFoundError(f"config file not found: {path}")
    return json.loads(path.read_text())


def _load_split_file(data_dir: Path, name: str) -> list[Exchange]:
    path = data_dir / f"{name}.jsonl"
    if not path.exists():
        raise FileNotFoundError(f"missing {path}; run preprocess first")
    return load_jsonl(path)


def _read_annomi_turns(path: Path) -> list[tuple[str, str, str]]:
    turns = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                row = json.loads(line)
                turns.append((row["client"], row["counselor"], row["behavior"]))
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise ValueError(f"{path}:{lineno}: bad turn record ({exc})") from exc
    return turns


# -------------------------------------------------- commands


def cmd_preprocess(args) -> int:
    if args.pair is None and args.annomi is None:
        raise ValueError("provide --pair and/or --annomi")
    args.out.mkdir(parents=True, exist_ok=True)
    summary: dict = {"out": str(args.out)}
    if args.pair is not None:
        exchanges = load_pair(args.pair)
        ds = split(exchanges, seed=args.seed)
        for name in ("train", "dev", "test"):
            part = getattr(ds, name)
            write_jsonl(part, args.out / f"{name}.jsonl")
            summary[name] = {"n": len(part), "labels": label_counts(list(part))}
    if args.annomi is not None:
        from mi_rewrite.corpus import filter_annomi

        kept = filter_annomi(_read_annomi_turns(args.annomi))
        write_jsonl(kept, args.out / "annomi.jsonl")
        summary["annomi"] = {"n": len(kept), "labels": label_counts(kept)}
    print(json.dumps(summary))
    return 0


def _generator_examples(exchanges, disc, use_paraphrase: bool, mix: str, seed: int):
    def extractor(prompt, source, content_weight):
        return make_template(disc.extract_attention(prompt, source), content_weight)

    paraphraser = RuleParaphraser(seed=seed)
    out = []
    for ex in exchanges:
        if ex.reflection_label not in ("SR", "CR"):
            continue
        plain = build_training_example(ex, use_paraphrase=False, extractor=extractor)
        if not use_paraphrase:
            out.append(plain)
            continue
        augmented = build_training_example(
            ex, use_paraphrase=True, extractor=extractor, paraphraser=paraphraser
        )
        if mix == "augmented-only":
            out.append(augmented)
        elif mix == "plain-only":
            out.append(plain)
        else:  # 1:1
            out.extend((plain, augmented))
    return out


def cmd_train(args) -> int:
    config = _read_config_file(args.config)
    train = _load_split_file(args.data, "train")
    dev = _load_split_file(args.data, "dev")

    if args.model in ("discriminator", "scorer"):
        pairs = [(ex.prompt, ex.response) for ex in train]
        labels = [ex.reflection_label for ex in train]
        dev_pairs = [(ex.prompt, ex.response) for ex in dev]
        dev_labels = [ex.reflection_label for ex in dev]
        cls = ReflectionDiscriminator if args.model == "discriminator" else ReflectionScorer
        model = cls(**config)
        model.fit(pairs, labels, dev=(dev_pairs, dev_labels))
        metrics = model.history_[-1] if model.history_ else {}
        if args.model == "discriminator":
            best = max((r.get("dev_accuracy", 0.0) for r in model.history_), default=0.0)
            metrics = {"best_dev_accuracy": best}
        path = save_checkpoint(model, args.out, metrics=metrics)
    else:
        disc_path = config.pop("discriminator", None)
        if disc_path is None:
            raise ValueError("generator config needs a 'discriminator' checkpoint path")
        mix = config.pop("mix", "1:1")
        if mix not in MIXES:
            raise ValueError(f"mix must be one of {MIXES}")
        disc = load_checkpoint(disc_path)
        use_paraphrase = args.paraphrase == "on"
        model = FillGenerator(**config)
        examples = _generator_examples(train, disc, use_paraphrase, mix, model.seed)
        dev_examples = _generator_examples(dev, disc, False, "plain-only", model.seed)
        if not dev_examples:
            dev_examples = None
        model.fit(examples, dev=dev_examples)
        best_dev = min((r["dev_loss"] for r in model.history_ if "dev_loss" in r), default=None)
        path = save_checkpoint(
            model, args.out,
            metrics={"best_dev_loss": best_dev, "paraphrase": use_paraphrase, "mix": mix},
        )
    print(json.dumps({"checkpoint": str(path)}))
    return 0


def cmd_rewrite(args) -> int:
    cfg = PipelineConfig.load(args.config)
    pipe = RewritePipeline.from_config(cfg)
    result = pipe.rewrite(args.prompt, args.response)
    print(result.to_json_str())
    return 0


def _fit_salience(cls, train):
    texts = [ex.response for ex in train]
    flags = [ex.reflection_label in ("SR", "CR") for ex in train]
    return cls().fit(texts, flags)


def cmd_evaluate(args) -> int:
    from mi_rewrite.metrics.report import evaluate, save_report

    wanted = tuple(s.strip() for s in args.systems.split(",") if s.strip())
    unknown = [s for s in wanted if s not in SYSTEMS]
    if unknown:
        raise ValueError(f"unknown systems: {', '.join(unknown)}; choose from {SYSTEMS}")

    config_path = args.config if args.config is not None else args.data / "pipeline.json"
    cfg = PipelineConfig.load(config_path)
    pipe = RewritePipeline.from_config(cfg)
    train = _load_split_file(args.data, "train")
    test = _load_split_file(args.data, "test")
    if args.limit is not None:
        test = test[: args.limit]

    systems: dict = {}
    for name in wanted:
        if name == "verve":
            systems[name] = pipe
        elif name == "base":
            if args.base_generator is None:
                raise ValueError("system 'base' needs --base-generator <checkpoint>")
            base_gen = load_checkpoint(args.base_generator, ARCH_GENERATOR)
            systems[name] = RewritePipeline(
                pipe.discriminator, pipe.scorer, base_gen,
                base_content_weight=cfg.base_content_weight,
                step=cfg.content_weight_step,
                max_attempts=cfg.max_attempts,
                improvement_threshold=cfg.improvement_threshold,
                stopping_rule=cfg.stopping_rule,
            )
        elif name == "drg":
            systems[name] = SingleShotBaseline(
                _fit_salience(DrgTemplateExtractor, train), pipe.generator, pipe.scorer
            )
        else:  # tg
            systems[name] = SingleShotBaseline(
                _fit_salience(TgTemplateExtractor, train), pipe.generator, pipe.scorer
            )

    references = None
    if args.references is not None:
        references = {}
        with open(args.references, encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    row = json.loads(line)
                    references[row["id"]] = row["reference"]

    lm = coherence = None
    paths = cfg.checkpoint_paths()
    if "lm" in paths:
        lm = load_checkpoint(paths["lm"])
    if "coherence" in paths:
        coherence = load_checkpoint(paths["coherence"])

    report = evaluate(
        systems,
        test,
        pipe.scorer,
        idf_texts=[ex.response for ex in train],
        lm=lm,
        coherence_model=coherence,
        references=references,
        seeds=tuple(range(args.seeds)),
    )
    json_path, csv_path = save_report(report, args.out)
    means = {
        name: {m: round(v["mean"], 4) for m, v in entry["metrics"].items()}
        for name, entry in report.aggregates.items()
    }
    print(json.dumps({"report": str(json_path), "records": str(csv_path), "means": means}))
    return 0


def cmd_serve(args) -> int:
    import os

    import uvicorn

    from mi_rewrite.service import create_app

    port = args.port
    if port is None:
        port = int(os.environ.get(PORT_ENV, "8080"))
    app = create_app(args.config)
    uvicorn.run(app, host=args.host, port=port)
    return 0
