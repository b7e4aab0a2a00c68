"""Wire trained models into the rewrite loop and the single-shot baselines."""

from __future__ import annotations

from pathlib import Path

from mi_rewrite.attention import AttentionMap
from mi_rewrite.checkpoint import (
    ARCH_DISCRIMINATOR,
    ARCH_GENERATOR,
    ARCH_SCORER,
    load_checkpoint,
)
from mi_rewrite.config import PipelineConfig
from mi_rewrite.rewriter import (
    BUDGET_EXHAUSTED,
    IMPROVED,
    NOOP_TEMPLATE,
    RewriteAttempt,
    RewriteResult,
    Rewriter,
)
from mi_rewrite.templating import Template

SYSTEMS = ("verve", "base", "drg", "tg")


class RewritePipeline:
    """Discriminator + scorer + generator behind the adaptive loop."""

    def __init__(
        self,
        discriminator,
        scorer,
        generator,
        base_content_weight: float = 1.0,
        step: float = 0.1,
        max_attempts: int = 5,
        improvement_threshold: float = 0.2,
        stopping_rule: str = "improvement",
    ):
        self.discriminator = discriminator
        self.scorer = scorer
        self.generator = generator
        self._rewriter = Rewriter(
            self,
            base_content_weight=base_content_weight,
            step=step,
            max_attempts=max_attempts,
            improvement_threshold=improvement_threshold,
            stopping_rule=stopping_rule,
        )

    # ---- RewriteBackend surface

    def attention_map(self, prompt: str, response: str) -> AttentionMap:
        return self.discriminator.extract_attention(prompt, response)

    def fill(self, prompt: str, template: Template) -> str:
        return self.generator.fill(prompt, template)

    def score(self, prompt: str, text: str) -> float:
        return float(self.scorer.score_pair(prompt, text))

    # ---- public operations

    def rewrite(self, prompt: str, response: str) -> RewriteResult:
        return self._rewriter.rewrite(prompt, response)

    def classify(self, prompt: str, response: str):
        return self.discriminator.classify(prompt, response)

    @classmethod
    def from_config(cls, cfg: PipelineConfig, root: str | Path | None = None) -> "RewritePipeline":
        paths = cfg.checkpoint_paths(root)
        missing = [k for k in ("discriminator", "scorer", "generator") if k not in paths]
        if missing:
            raise ValueError(f"config missing checkpoints for: {', '.join(missing)}")
        return cls(
            discriminator=load_checkpoint(paths["discriminator"], ARCH_DISCRIMINATOR),
            scorer=load_checkpoint(paths["scorer"], ARCH_SCORER),
            generator=load_checkpoint(paths["generator"], ARCH_GENERATOR),
            base_content_weight=cfg.base_content_weight,
            step=cfg.content_weight_step,
            max_attempts=cfg.max_attempts,
            improvement_threshold=cfg.improvement_threshold,
            stopping_rule=cfg.stopping_rule,
        )


class SingleShotBaseline:
    """One fixed-template rewrite; keeps the candidate even when it scores worse."""

    def __init__(self, extractor, generator, scorer, improvement_threshold: float = 0.2):
        self.extractor = extractor
        self.generator = generator
        self.scorer = scorer
        self.improvement_threshold = improvement_threshold

    def rewrite(self, prompt: str, response: str) -> RewriteResult:
        template = self.extractor.transform([response])[0]
        original_score = float(self.scorer.score_pair(prompt, response))
        if template.noop:
            attempt = RewriteAttempt(
                content_weight=template.content_weight,
                template=template,
                candidate=response,
                score=original_score,
            )
            return RewriteResult(
                original_score=original_score,
                attempts=(attempt,),
                final=response,
                final_score=original_score,
                improvement=0.0,
                stopped_reason=NOOP_TEMPLATE,
            )
        candidate = self.generator.fill(prompt, template)
        score = float(self.scorer.score_pair(prompt, candidate))
        improvement = score - original_score
        reason = IMPROVED if improvement > self.improvement_threshold else BUDGET_EXHAUSTED
        attempt = RewriteAttempt(
            content_weight=template.content_weight,
            template=template,
            candidate=candidate,
            score=score,
        )
        return RewriteResult(
            original_score=original_score,
            attempts=(attempt,),
            final=candidate,
            final_score=score,
            improvement=improvement,
            stopped_reason=reason,
        )
