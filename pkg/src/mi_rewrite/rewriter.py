"""Adaptive rewriting loop: lower the content weight until the rewrite improves enough."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Protocol

from mi_rewrite.attention import AttentionMap
from mi_rewrite.templating import Template, make_template

BASE_CONTENT_WEIGHT = 1.0
CONTENT_WEIGHT_STEP = 0.1
MAX_ATTEMPTS = 5
IMPROVEMENT_THRESHOLD = 0.2

STOPPING_RULES = ("improvement", "distance_to_max", "inter_attempt")

IMPROVED = "IMPROVED"
BUDGET_EXHAUSTED = "BUDGET_EXHAUSTED"
NOOP_TEMPLATE = "NOOP_TEMPLATE"


class RewriteBackend(Protocol):
    """Model surface the loop needs; the pipeline adapts real models to this."""

    def attention_map(self, prompt: str, response: str) -> AttentionMap: ...

    def fill(self, prompt: str, template: Template) -> str: ...

    def score(self, prompt: str, text: str) -> float: ...


@dataclass(frozen=True)
class RewriteAttempt:
    content_weight: float
    template: Template
    candidate: str
    score: float

    def __post_init__(self):
        if not 0.0 <= self.score <= 1.0:
            raise ValueError("attempt score must lie in [0, 1]")

    def to_json(self) -> dict:
        return {
            "content_weight": self.content_weight,
            "template": self.template.to_json(),
            "candidate": self.candidate,
            "score": self.score,
        }


@dataclass(frozen=True)
class RewriteResult:
    original_score: float
    attempts: tuple[RewriteAttempt, ...]
    final: str
    final_score: float
    improvement: float
    stopped_reason: str

    def __post_init__(self):
        if not 1 <= len(self.attempts) <= MAX_ATTEMPTS:
            raise ValueError("attempt trace must hold 1 to 5 entries")
        if self.stopped_reason not in (IMPROVED, BUDGET_EXHAUSTED, NOOP_TEMPLATE):
            raise ValueError(f"unknown stopped_reason {self.stopped_reason!r}")

    def to_json(self) -> dict:
        return {
            "original_score": self.original_score,
            "attempts": [a.to_json() for a in self.attempts],
            "final": self.final,
            "final_score": self.final_score,
            "improvement": self.improvement,
            "stopped_reason": self.stopped_reason,
        }

    def to_json_str(self) -> str:
        return json.dumps(self.to_json(), indent=2)


class Rewriter:
    """Runs fill-in attempts at decreasing content weights.

    Each attempt masks more of the response (masking is monotone in the
    weight), so the loop trades content preservation for reflection
    strength one step at a time.
    """

    def __init__(
        self,
        backend: RewriteBackend,
        base_content_weight: float = BASE_CONTENT_WEIGHT,
        step: float = CONTENT_WEIGHT_STEP,
        max_attempts: int = MAX_ATTEMPTS,
        improvement_threshold: float = IMPROVEMENT_THRESHOLD,
        stopping_rule: str = "improvement",
    ):
        if stopping_rule not in STOPPING_RULES:
            raise ValueError(f"stopping_rule must be one of {STOPPING_RULES}")
        if max_attempts < 1:
            raise ValueError("max_attempts must be positive")
        self.backend = backend
        self.base_content_weight = base_content_weight
        self.step = step
        self.max_attempts = max_attempts
        self.improvement_threshold = improvement_threshold
        self.stopping_rule = stopping_rule

    def rewrite_once(self, prompt: str, response: str, content_weight: float) -> RewriteAttempt:
        attn = self.backend.attention_map(prompt, response)
        template = make_template(attn, content_weight)
        return self._attempt_from_template(prompt, response, content_weight, template, {})

    def _attempt_from_template(
        self,
        prompt: str,
        response: str,
        content_weight: float,
        template: Template,
        cache: dict,
    ) -> RewriteAttempt:
        key = template.masked
        if key in cache:
            candidate, score = cache[key]
        elif template.noop:
            # nothing masked: the generator would only echo, skip it
            candidate = response
            score = self.backend.score(prompt, response)
            cache[key] = (candidate, score)
        else:
            candidate = self.backend.fill(prompt, template)
            score = self.backend.score(prompt, candidate)
            cache[key] = (candidate, score)
        return RewriteAttempt(
            content_weight=content_weight,
            template=template,
            candidate=candidate,
            score=score,
        )

    def _should_stop(self, attempt: RewriteAttempt, original_score: float, previous_score: float) -> bool:
        if self.stopping_rule == "improvement":
            return attempt.score - original_score > self.improvement_threshold
        if self.stopping_rule == "distance_to_max":
            return 1.0 - attempt.score <= self.improvement_threshold
        return attempt.score - previous_score > self.improvement_threshold

    def rewrite(self, prompt: str, response: str) -> RewriteResult:
        attn = self.backend.attention_map(prompt, response)
        original_score = self.backend.score(prompt, response)

        attempts: list[RewriteAttempt] = []
        cache: dict = {}
        stopped_reason = BUDGET_EXHAUSTED
        previous_score = original_score
        for k in range(self.max_attempts):
            # keep the weight grid on clean decimals (1.0, 0.9, ...)
            weight = round(self.base_content_weight - k * self.step, 10)
            template = make_template(attn, weight)
            attempt = self._attempt_from_template(prompt, response, weight, template, cache)
            attempts.append(attempt)
            if not template.noop and self._should_stop(attempt, original_score, previous_score):
                stopped_reason = IMPROVED
                break
            previous_score = attempt.score

        if all(a.template.noop for a in attempts):
            return RewriteResult(
                original_score=original_score,
                attempts=tuple(attempts),
                final=response,
                final_score=original_score,
                improvement=0.0,
                stopped_reason=NOOP_TEMPLATE,
            )

        best = max(attempts, key=lambda a: a.score)  # max keeps the earliest on ties
        if best.score <= original_score:
            # never hand back something the scorer likes less than the input
            return RewriteResult(
                original_score=original_score,
                attempts=tuple(attempts),
                final=response,
                final_score=original_score,
                improvement=0.0,
                stopped_reason=BUDGET_EXHAUSTED,
            )
        return RewriteResult(
            original_score=original_score,
            attempts=tuple(attempts),
            final=best.candidate,
            final_score=best.score,
            improvement=best.score - original_score,
            stopped_reason=stopped_reason,
        )
