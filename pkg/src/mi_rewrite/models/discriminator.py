"""Three-class reflection discriminator; its attention drives masking."""

from __future__ import annotations

import logging
import random
import warnings
from dataclasses import dataclass

import numpy as np
import torch
from sklearn.base import BaseEstimator, ClassifierMixin
from sklearn.utils.validation import check_is_fitted
from torch import nn

from mi_rewrite.attention import AttentionMap, build_attention_map
from mi_rewrite.models.encoder import TextEncoder
from mi_rewrite.models.train_utils import minibatches, pad_batch, seed_all, snapshot
from mi_rewrite.subword import SubwordVocab

log = logging.getLogger(__name__)

CLASS_ORDER = ("NR", "SR", "CR")
QUERY_ROWS = ("cls", "mean")


@dataclass(frozen=True)
class ReflectionPrediction:
    label: str
    probabilities: tuple[float, float, float]  # NR, SR, CR
    truncated: bool = False

    def __post_init__(self):
        if abs(sum(self.probabilities) - 1.0) > 1e-6:
            raise ValueError("probabilities must sum to 1")
        if self.label != CLASS_ORDER[int(np.argmax(self.probabilities))]:
            raise ValueError("label must be the argmax class")

    def to_json(self) -> dict:
        return {
            "label": self.label,
            "probabilities": dict(zip(CLASS_ORDER, self.probabilities)),
            "truncated": self.truncated,
        }


class ReflectionDiscriminator(BaseEstimator, ClassifierMixin):
    """Encoder classifier over "[CLS] prompt [SEP] response [SEP]" input."""

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
        query_row: str = "cls",
        degenerate_labels: str = "error",
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
        self.query_row = query_row
        self.degenerate_labels = degenerate_labels

    # -------------------------------------------------- training

    def fit(self, X, y, dev=None):
        if self.query_row not in QUERY_ROWS:
            raise ValueError(f"query_row must be one of {QUERY_ROWS}")
        y = list(y)
        bad = [label for label in y if label not in CLASS_ORDER]
        if bad or len(y) != len(X):
            raise ValueError(f"every example needs a label in {CLASS_ORDER}; got {bad[:3]!r}")
        if len(set(y)) < 2:
            msg = f"training labels collapsed to {set(y)}"
            if self.degenerate_labels == "error":
                raise ValueError(msg)
            warnings.warn(msg)

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
        self.head_ = nn.Linear(self.d_model, len(CLASS_ORDER))
        self.classes_ = np.array(CLASS_ORDER)

        params = list(self.encoder_.parameters()) + list(self.head_.parameters())
        opt = torch.optim.Adam(params, lr=self.lr)
        loss_fn = nn.CrossEntropyLoss()
        targets = [CLASS_ORDER.index(label) for label in y]
        rng = random.Random(self.seed)

        best = None
        self.history_ = []
        for epoch in range(self.epochs):
            self.encoder_.train()
            total = 0.0
            for batch in minibatches(len(X), self.batch_size, rng):
                opt.zero_grad()
                logits = self._logits([X[i] for i in batch])
                loss = loss_fn(logits, torch.tensor([targets[i] for i in batch]))
                loss.backward()
                opt.step()
                total += float(loss.detach()) * len(batch)
            record = {"epoch": epoch, "train_loss": total / len(X)}
            if dev is not None:
                dev_X, dev_y = dev
                acc = float(np.mean(np.asarray(self.predict(dev_X)) == np.asarray(dev_y)))
                record["dev_accuracy"] = acc
                if best is None or acc > best[0]:
                    best = (acc, snapshot(self.encoder_), snapshot(self.head_))
            self.history_.append(record)
            log.info("discriminator %s", record)
        if best is not None:
            self.encoder_.load_state_dict(best[1])
            self.head_.load_state_dict(best[2])
        self.encoder_.eval()
        return self

    def _logits(self, pairs):
        encs = [self.vocab_.encode_pair(p, r, self.max_len) for p, r in pairs]
        ids, mask = pad_batch([list(e.ids) for e in encs], self.vocab_.pad_id)
        segs, _ = pad_batch([list(e.segment_ids) for e in encs], 0)
        hidden, _ = self.encoder_(ids, segs, mask)
        return self.head_(hidden[:, 0])

    # -------------------------------------------------- inference

    def predict_proba(self, X):
        check_is_fitted(self, "encoder_")
        self.encoder_.eval()
        out = []
        with torch.no_grad():
            for i in range(0, len(X), self.batch_size):
                logits = self._logits(X[i : i + self.batch_size])
                out.append(logits.softmax(dim=-1).numpy())
        return np.concatenate(out) if out else np.zeros((0, len(CLASS_ORDER)))

    def predict(self, X):
        probs = self.predict_proba(X)
        return [CLASS_ORDER[i] for i in probs.argmax(axis=1)]

    def classify(self, prompt: str, response: str) -> ReflectionPrediction:
        check_is_fitted(self, "encoder_")
        if not prompt.strip() or not response.strip():
            raise ValueError("prompt and response must be non-empty")
        enc = self.vocab_.encode_pair(prompt, response, self.max_len)
        with torch.no_grad():
            probs = self._logits([(prompt, response)]).softmax(dim=-1)[0].numpy()
        probs = probs / probs.sum()
        return ReflectionPrediction(
            label=CLASS_ORDER[int(probs.argmax())],
            probabilities=tuple(float(p) for p in probs),
            truncated=enc.truncated,
        )

    def extract_attention(self, prompt: str, response: str) -> AttentionMap:
        """Penultimate-layer rows for the chosen query, pooled over heads."""
        check_is_fitted(self, "encoder_")
        enc = self.vocab_.encode_pair(prompt, response, self.max_len)
        ids = torch.tensor([list(enc.ids)])
        segs = torch.tensor([list(enc.segment_ids)])
        self.encoder_.eval()
        with torch.no_grad():
            _, attentions = self.encoder_(ids, segs)
        layer = attentions[-2] if len(attentions) >= 2 else attentions[-1]
        if self.query_row == "cls":
            rows = layer[0, :, 0, :]
        else:
            rows = layer[0].mean(dim=1)
        return build_attention_map(enc.pair, rows.numpy())
