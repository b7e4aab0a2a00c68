"""Small causal language model used for the fluency metric."""

from __future__ import annotations

import logging
import math
import random

import torch
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted
from torch import nn

from mi_rewrite.models.encoder import FeedForward, SelfAttention
from mi_rewrite.models.train_utils import minibatches, pad_batch, seed_all, snapshot
from mi_rewrite.subword import SubwordVocab

log = logging.getLogger(__name__)


class CausalBlock(nn.Module):
    def __init__(self, d_model: int, n_heads: int, d_ff: int):
        super().__init__()
        self.attn = SelfAttention(d_model, n_heads)
        self.ff = FeedForward(d_model, d_ff)
        self.ln1 = nn.LayerNorm(d_model)
        self.ln2 = nn.LayerNorm(d_model)

    def forward(self, x, pad_mask=None):
        a, _ = self.attn(x, pad_mask=pad_mask, causal=True)
        x = self.ln1(x + a)
        return self.ln2(x + self.ff(x))


class LMNet(nn.Module):
    def __init__(self, vocab_size, d_model, n_heads, n_layers, d_ff, max_len):
        super().__init__()
        self.tok = nn.Embedding(vocab_size, d_model)
        self.pos = nn.Embedding(max_len, d_model)
        self.ln = nn.LayerNorm(d_model)
        self.blocks = nn.ModuleList(
            CausalBlock(d_model, n_heads, d_ff) for _ in range(n_layers)
        )
        self.head = nn.Linear(d_model, vocab_size)

    def forward(self, ids, pad_mask=None):
        b, t = ids.shape
        pos = torch.arange(t, device=ids.device).expand(b, t)
        x = self.ln(self.tok(ids) + self.pos(pos))
        for block in self.blocks:
            x = block(x, pad_mask)
        return self.head(x)


class CausalLM(BaseEstimator):
    """Next-token model over counselor responses; exposes perplexity."""

    def __init__(
        self,
        epochs: int = 20,
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

    def fit(self, texts: list[str], dev: list[str] | None = None):
        texts = [t for t in texts if t.strip()]
        if not texts:
            raise ValueError("no training texts")
        seed_all(self.seed)
        self.vocab_ = SubwordVocab.build(texts)
        self.net_ = LMNet(
            len(self.vocab_), self.d_model, self.n_heads, self.n_layers,
            self.d_ff, self.max_len,
        )
        opt = torch.optim.Adam(self.net_.parameters(), lr=self.lr)
        loss_fn = nn.CrossEntropyLoss(ignore_index=self.vocab_.pad_id)
        rng = random.Random(self.seed)
        enc = [self.vocab_.encode_target(t, self.max_len) for t in texts]
        dev_enc = [self.vocab_.encode_target(t, self.max_len) for t in dev] if dev else None

        best = None
        self.history_ = []
        for epoch in range(self.epochs):
            self.net_.train()
            total = 0.0
            for batch in minibatches(len(enc), self.batch_size, rng):
                opt.zero_grad()
                loss = self._batch_loss([enc[i] for i in batch], loss_fn)
                loss.backward()
                opt.step()
                total += float(loss.detach()) * len(batch)
            record = {"epoch": epoch, "train_loss": total / len(enc)}
            if dev_enc:
                record["dev_loss"] = self._dataset_loss(dev_enc, loss_fn)
                if best is None or record["dev_loss"] < best[0]:
                    best = (record["dev_loss"], snapshot(self.net_))
            self.history_.append(record)
            log.info("lm %s", record)
        if best is not None:
            self.net_.load_state_dict(best[1])
        self.net_.eval()
        return self

    def _batch_loss(self, id_lists, loss_fn):
        ids, mask = pad_batch(id_lists, self.vocab_.pad_id)
        logits = self.net_(ids[:, :-1], mask[:, :-1])
        return loss_fn(logits.reshape(-1, logits.shape[-1]), ids[:, 1:].reshape(-1))

    def _dataset_loss(self, enc, loss_fn) -> float:
        self.net_.eval()
        total, count = 0.0, 0
        with torch.no_grad():
            for i in range(0, len(enc), self.batch_size):
                chunk = enc[i : i + self.batch_size]
                total += float(self._batch_loss(chunk, loss_fn)) * len(chunk)
                count += len(chunk)
        return total / count

    def mean_nll(self, text: str) -> float:
        """Mean negative log-likelihood of the text's own tokens given [BOS]."""
        check_is_fitted(self, "net_")
        ids = self.vocab_.encode_target(text, self.max_len)
        # drop the EOS target so a one-token text scores exactly that token
        ids = ids[:-1]
        if len(ids) < 2:
            raise ValueError("perplexity needs at least one token")
        with torch.no_grad():
            row = torch.tensor([ids], dtype=torch.long)
            logits = self.net_(row[:, :-1])
            logprobs = logits.log_softmax(dim=-1)
            targets = row[:, 1:]
            picked = logprobs.gather(-1, targets[..., None]).squeeze(-1)
            return float(-picked.mean())

    def perplexity(self, text: str) -> float:
        if not text or not text.strip():
            raise ValueError("perplexity of empty text is undefined")
        return math.exp(self.mean_nll(text))
