"""Run configuration shared by the CLI and the HTTP service."""

from __future__ import annotations

import dataclasses
import json
import os
from dataclasses import dataclass
from pathlib import Path

from mi_rewrite.checkpoint import (
    ARCH_COHERENCE,
    ARCH_DISCRIMINATOR,
    ARCH_GENERATOR,
    ARCH_LM,
    ARCH_SCORER,
    latest_checkpoint,
    verify_checkpoint,
)
from mi_rewrite.rewriter import (
    BASE_CONTENT_WEIGHT,
    CONTENT_WEIGHT_STEP,
    IMPROVEMENT_THRESHOLD,
    MAX_ATTEMPTS,
    STOPPING_RULES,
)
from mi_rewrite.templating import MASK_SENTINEL

PORT_ENV = "MI_REWRITE_PORT"
CHECKPOINT_ROOT_ENV = "MI_REWRITE_CHECKPOINT_ROOT"

_ARCH_BY_FIELD = {
    "discriminator": ARCH_DISCRIMINATOR,
    "scorer": ARCH_SCORER,
    "generator": ARCH_GENERATOR,
    "lm": ARCH_LM,
    "coherence": ARCH_COHERENCE,
}


@dataclass(frozen=True)
class PipelineConfig:
    """Checkpoint locations plus loop and decoding parameters."""

    discriminator: str | None = None
    scorer: str | None = None
    generator: str | None = None
    lm: str | None = None
    coherence: str | None = None
    base_content_weight: float = BASE_CONTENT_WEIGHT
    content_weight_step: float = CONTENT_WEIGHT_STEP
    max_attempts: int = MAX_ATTEMPTS
    improvement_threshold: float = IMPROVEMENT_THRESHOLD
    stopping_rule: str = "improvement"
    beams: int = 5
    max_length: int = 128
    mask_sentinel: str = MASK_SENTINEL
    seed: int = 0

    def __post_init__(self):
        if self.stopping_rule not in STOPPING_RULES:
            raise ValueError(f"stopping_rule must be one of {STOPPING_RULES}")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be positive")
        if self.beams < 1:
            raise ValueError("beams must be positive")
        if self.base_content_weight <= 0 or self.content_weight_step < 0:
            raise ValueError("content weight grid must be positive")
        if not self.mask_sentinel.strip():
            raise ValueError("mask_sentinel must be non-blank")

    @classmethod
    def load(cls, path: str | Path) -> "PipelineConfig":
        path = Path(path)
        if not path.exists():
            raise FileNotFoundError(f"config file not found: {path}")
        data = json.loads(path.read_text())
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"unknown config keys: {', '.join(unknown)}")
        return cls(**data)

    def dump(self, path: str | Path) -> None:
        Path(path).write_text(json.dumps(dataclasses.asdict(self), indent=2))

    def checkpoint_paths(self, root: str | Path | None = None) -> dict[str, Path]:
        """Configured model dirs, resolved against root (or the env override)."""
        base = root if root is not None else os.environ.get(CHECKPOINT_ROOT_ENV)
        out = {}
        for field in _ARCH_BY_FIELD:
            value = getattr(self, field)
            if value is None:
                continue
            p = Path(value)
            if base is not None and not p.is_absolute():
                p = Path(base) / p
            out[field] = p
        return out

    def validate_checkpoints(self, root: str | Path | None = None) -> dict[str, dict]:
        """Every referenced checkpoint must exist with a matching architecture id."""
        manifests = {}
        for field, path in self.checkpoint_paths(root).items():
            resolved = latest_checkpoint(path)
            manifests[field] = verify_checkpoint(resolved, _ARCH_BY_FIELD[field])
        return manifests
