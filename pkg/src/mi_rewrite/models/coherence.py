"""Prompt-response relatedness classifier behind the coherence metric."""

from __future__ import annotations

import logging
import random

import torch
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted
from torch import nn

from mi_rewrite.models.encoder import TextEncoder
from mi_rewrite.models.train_utils import minibatches, pad_batch, seed_all, snapshot
from mi_rewrite.subword import SubwordVocab

log = logging.getLogger(__name__)


class CoherenceClassifier(BaseEstimator):
    """Binary classifier: is this response the true continuation of the prompt?

    Trains on gold pairs as positives and in-batch rotated responses as
    negatives, so every batch supplies its own mismatched examples.
    """

    def __init__(
        self,
        epochs: int = 15,
        lr: float = 2e-3,
        batch_size: int = 32,
        seed: int = 0,
        d_model: int = 64,
        n_heads: int = 4,
        n_layers: int = 2,
        d_ff: int = 128,
        max_len: int = 128,
    ):
        self.epochs = epochs
        self.lr = lr
        self.batch_size = batch_size
        self.seed = seed
        self.d_model = d_model
        self.n_heads = n_heads
        self.n_layers = n_layers
        self.d_ff = d_ff
        self.max_len = max_len

    def fit(self, pairs: list[tuple[str, str]], dev: list[tuple[str, str]] | None = None):
        pairs = [(p, r) for p, r in pairs if p.strip() and r.strip()]
        if len(pairs) < 2:
            raise ValueError("need at least two prompt/response pairs")
        seed_all(self.seed)
        texts = [p for p, _ in pairs] + [r for _, r in pairs]
        self.vocab_ = SubwordVocab.build(texts)
        self.encoder_ = TextEncoder(
            len(self.vocab_), self.d_model, self.n_heads, self.n_layers,
            self.d_ff, max_len=self.max_len,
        )
        self.head_ = nn.Linear(self.d_model, 1)
        params = list(self.encoder_.parameters()) + list(self.head_.parameters())
        opt = torch.optim.Adam(params, lr=self.lr)
        loss_fn = nn.BCEWithLogitsLoss()
        rng = random.Random(self.seed)

        best = None
        self.history_ = []
        for epoch in range(self.epochs):
            self.encoder_.train()
            total, seen = 0.0, 0
            for batch in minibatches(len(pairs), self.batch_size, rng):
                if len(batch) < 2:
                    continue  # no in-batch negative available
                pos = [pairs[i] for i in batch]
                neg = [
                    (pos[j][0], pos[(j + 1) % len(pos)][1])
                    for j in range(len(pos))
                ]
                opt.zero_grad()
                logits = self._logits(pos + neg)
                labels = torch.tensor(
                    [1.0] * len(pos) + [0.0] * len(neg)
                )
                loss = loss_fn(logits, labels)
                loss.backward()
                opt.step()
                total += float(loss.detach()) * len(batch)
                seen += len(batch)
            record = {"epoch": epoch, "train_loss": total / max(seen, 1)}
            if dev:
                record["dev_gap"] = self._dev_gap(dev)
                if best is None or record["dev_gap"] > best[0]:
                    best = (record["dev_gap"], snapshot(self.encoder_), snapshot(self.head_))
            self.history_.append(record)
            log.info("coherence %s", record)
        if best is not None:
            self.encoder_.load_state_dict(best[1])
            self.head_.load_state_dict(best[2])
        self.encoder_.eval()
        return self

    def _logits(self, items: list[tuple[str, str]]) -> torch.Tensor:
        encoded = [
            self.vocab_.encode_pair(p, r, self.max_len) for p, r in items
        ]
        ids, mask = pad_batch([list(e.ids) for e in encoded], self.vocab_.pad_id)
        segs, _ = pad_batch([list(e.segment_ids) for e in encoded], 0)
        hidden, _ = self.encoder_(ids, segs, mask)
        return self.head_(hidden[:, 0]).squeeze(-1)

    def _dev_gap(self, dev: list[tuple[str, str]]) -> float:
        """Matched-minus-rotated mean probability on held-out pairs."""
        matched = [self.coherence(p, r) for p, r in dev]
        rotated = [
            self.coherence(dev[j][0], dev[(j + 1) % len(dev)][1])
            for j in range(len(dev))
        ]
        return sum(matched) / len(matched) - sum(rotated) / len(rotated)

    def coherence(self, prompt: str, response: str) -> float:
        check_is_fitted(self, "encoder_")
        if not prompt.strip() or not response.strip():
            raise ValueError("prompt and response must be non-empty")
        self.encoder_.eval()
        with torch.no_grad():
            logit = self._logits([(prompt, response)])[0]
            return float(torch.sigmoid(logit))
