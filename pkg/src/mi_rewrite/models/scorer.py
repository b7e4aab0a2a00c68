"""Scalar reflection-quality scorer used by the loop and the metrics."""

from __future__ import annotations

import logging
import random

import numpy as np
import torch
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted
from torch import nn

from mi_rewrite.models.encoder import TextEncoder
from mi_rewrite.models.train_utils import minibatches, pad_batch, seed_all, snapshot
from mi_rewrite.subword import SubwordVocab

log = logging.getLogger(__name__)

LABEL_TARGETS = {"NR": 0.0, "SR": 0.5, "CR": 1.0}


class ReflectionScorer(BaseEstimator, RegressorMixin):
    """Regression head over the pair encoding, clamped to [0, 1] at inference."""

    def __init__(
        self,
        epochs: int = 30,
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

    def fit(self, X, y, dev=None):
        y = list(y)
        bad = [label for label in y if label not in LABEL_TARGETS]
        if bad or len(y) != len(X):
            raise ValueError(f"labels must be in {tuple(LABEL_TARGETS)}; got {bad[:3]!r}")

        seed_all(self.seed)
        self.vocab_ = SubwordVocab.build([p for p, _ in X] + [r for _, r in X])
        self.encoder_ = TextEncoder(
            vocab_size=len(self.vocab_),
            d_model=self.d_model,
            n_heads=self.n_heads,
            n_layers=self.n_layers,
            d_ff=self.d_ff,
            max_len=self.max_len,
        )
        self.head_ = nn.Linear(self.d_model, 1)
        params = list(self.encoder_.parameters()) + list(self.head_.parameters())
        opt = torch.optim.Adam(params, lr=self.lr)
        targets = [LABEL_TARGETS[label] for label in y]
        rng = random.Random(self.seed)

        best = None
        self.history_ = []
        for epoch in range(self.epochs):
            self.encoder_.train()
            total = 0.0
            for batch in minibatches(len(X), self.batch_size, rng):
                opt.zero_grad()
                raw = self._raw([X[i] for i in batch])
                want = torch.tensor([targets[i] for i in batch])
                loss = ((raw - want) ** 2).mean()
                loss.backward()
                opt.step()
                total += float(loss.detach()) * len(batch)
            record = {"epoch": epoch, "train_loss": total / len(X)}
            if dev is not None:
                dev_X, dev_y = dev
                preds = self.predict(dev_X)
                want = np.array([LABEL_TARGETS[label] for label in dev_y])
                mse = float(np.mean((preds - want) ** 2))
                record["dev_mse"] = mse
                if best is None or mse < best[0]:
                    best = (mse, snapshot(self.encoder_), snapshot(self.head_))
            self.history_.append(record)
            log.info("scorer %s", record)
        if best is not None:
            self.encoder_.load_state_dict(best[1])
            self.head_.load_state_dict(best[2])
        self.encoder_.eval()
        return self

    def _raw(self, pairs):
        encs = [self.vocab_.encode_pair(p, r, self.max_len) for p, r in pairs]
        ids, mask = pad_batch([list(e.ids) for e in encs], self.vocab_.pad_id)
        segs, _ = pad_batch([list(e.segment_ids) for e in encs], 0)
        hidden, _ = self.encoder_(ids, segs, mask)
        return self.head_(hidden[:, 0]).squeeze(-1)

    def predict(self, X):
        check_is_fitted(self, "encoder_")
        self.encoder_.eval()
        out = []
        with torch.no_grad():
            for i in range(0, len(X), self.batch_size):
                out.append(self._raw(X[i : i + self.batch_size]).numpy())
        raw = np.concatenate(out) if out else np.zeros(0)
        return np.clip(raw, 0.0, 1.0)

    def score_pair(self, prompt: str, response: str) -> float:
        check_is_fitted(self, "encoder_")
        if not response.strip():
            raise ValueError("response must be non-empty")
        if not prompt.strip():
            raise ValueError("prompt must be non-empty")
        return float(self.predict([(prompt, response)])[0])
