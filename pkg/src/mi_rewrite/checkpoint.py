"""Versioned checkpoint directories with manifests for the trained models."""

from __future__ import annotations

import datetime
import hashlib
import json
import re
from pathlib import Path

import numpy as np
import torch
from torch import nn

from mi_rewrite.models.coherence import CoherenceClassifier
from mi_rewrite.models.discriminator import CLASS_ORDER, ReflectionDiscriminator
from mi_rewrite.models.encoder import TextEncoder
from mi_rewrite.models.generator import FillGenerator, Seq2Seq
from mi_rewrite.models.lm import CausalLM, LMNet
from mi_rewrite.models.scorer import ReflectionScorer
from mi_rewrite.subword import SubwordVocab

MANIFEST_NAME = "manifest.json"
WEIGHTS_NAME = "weights.pt"
VOCAB_NAME = "vocab.json"

ARCH_DISCRIMINATOR = "reflection-discriminator-v1"
ARCH_SCORER = "reflection-scorer-v1"
ARCH_GENERATOR = "fill-generator-v1"
ARCH_LM = "causal-lm-v1"
ARCH_COHERENCE = "coherence-classifier-v1"

_VERSION_RE = re.compile(r"^v(\d{3,})$")


def architecture_of(model) -> str:
    if isinstance(model, ReflectionDiscriminator):
        return ARCH_DISCRIMINATOR
    if isinstance(model, ReflectionScorer):
        return ARCH_SCORER
    if isinstance(model, FillGenerator):
        return ARCH_GENERATOR
    if isinstance(model, CausalLM):
        return ARCH_LM
    if isinstance(model, CoherenceClassifier):
        return ARCH_COHERENCE
    raise TypeError(f"no checkpoint format for {type(model).__name__}")


def config_hash(params: dict) -> str:
    blob = json.dumps(params, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _modules(model) -> dict[str, nn.Module]:
    if isinstance(model, (ReflectionDiscriminator, ReflectionScorer, CoherenceClassifier)):
        return {"encoder": model.encoder_, "head": model.head_}
    return {"net": model.net_}


def save_checkpoint(model, root: str | Path, metrics: dict | None = None) -> Path:
    """Write the next vNNN directory under root; returns its path."""
    arch = architecture_of(model)
    root = Path(root)
    root.mkdir(parents=True, exist_ok=True)
    existing = [
        int(m.group(1))
        for d in root.iterdir()
        if d.is_dir() and (m := _VERSION_RE.match(d.name))
    ]
    out = root / f"v{max(existing, default=0) + 1:03d}"
    out.mkdir()
    params = model.get_params()
    manifest = {
        "architecture": arch,
        "params": params,
        "config_hash": config_hash(params),
        "metrics": metrics or {},
        "created": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    (out / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2, default=str))
    model.vocab_.save(out / VOCAB_NAME)
    torch.save(
        {name: mod.state_dict() for name, mod in _modules(model).items()},
        out / WEIGHTS_NAME,
    )
    return out


def read_manifest(path: str | Path) -> dict:
    manifest_path = Path(path) / MANIFEST_NAME
    if not manifest_path.exists():
        raise FileNotFoundError(f"no manifest at {manifest_path}")
    return json.loads(manifest_path.read_text())


def latest_checkpoint(root: str | Path) -> Path:
    root = Path(root)
    if (root / MANIFEST_NAME).exists():
        return root  # already a version directory
    candidates = sorted(
        (d for d in root.iterdir() if d.is_dir() and _VERSION_RE.match(d.name))
        if root.exists()
        else [],
        key=lambda d: d.name,
    )
    if not candidates:
        raise FileNotFoundError(f"no checkpoint versions under {root}")
    return candidates[-1]


def verify_checkpoint(path: str | Path, expected_architecture: str) -> dict:
    """Existence + architecture-id check used by config validation."""
    manifest = read_manifest(path)
    found = manifest.get("architecture")
    if found != expected_architecture:
        raise ValueError(
            f"checkpoint {path} holds {found!r}, expected {expected_architecture!r}"
        )
    return manifest


def load_checkpoint(path: str | Path, expected_architecture: str | None = None):
    path = latest_checkpoint(path)
    manifest = read_manifest(path)
    arch = manifest["architecture"]
    if expected_architecture and arch != expected_architecture:
        raise ValueError(
            f"checkpoint {path} holds {arch!r}, expected {expected_architecture!r}"
        )
    params = manifest["params"]
    vocab = SubwordVocab.load(Path(path) / VOCAB_NAME)
    weights = torch.load(Path(path) / WEIGHTS_NAME, weights_only=True)

    if arch == ARCH_DISCRIMINATOR:
        model = ReflectionDiscriminator(**params)
        model.vocab_ = vocab
        model.encoder_ = _build_encoder(model, len(vocab))
        model.head_ = nn.Linear(model.d_model, len(CLASS_ORDER))
        model.classes_ = np.array(CLASS_ORDER)
    elif arch == ARCH_SCORER:
        model = ReflectionScorer(**params)
        model.vocab_ = vocab
        model.encoder_ = _build_encoder(model, len(vocab))
        model.head_ = nn.Linear(model.d_model, 1)
    elif arch == ARCH_COHERENCE:
        model = CoherenceClassifier(**params)
        model.vocab_ = vocab
        model.encoder_ = _build_encoder(model, len(vocab))
        model.head_ = nn.Linear(model.d_model, 1)
    elif arch == ARCH_GENERATOR:
        model = FillGenerator(**params)
        model.vocab_ = vocab
        model.net_ = Seq2Seq(
            len(vocab), model.d_model, model.n_heads, model.n_layers,
            model.d_ff, model.max_src_len, model.max_tgt_len,
        )
    elif arch == ARCH_LM:
        model = CausalLM(**params)
        model.vocab_ = vocab
        model.net_ = LMNet(
            len(vocab), model.d_model, model.n_heads, model.n_layers,
            model.d_ff, model.max_len,
        )
    else:
        raise ValueError(f"unknown architecture {arch!r}")

    for name, mod in _modules(model).items():
        mod.load_state_dict(weights[name])
        mod.eval()
    return model


def _build_encoder(model, vocab_size: int) -> TextEncoder:
    return TextEncoder(
        vocab_size, model.d_model, model.n_heads, model.n_layers,
        model.d_ff, max_len=model.max_len,
    )
