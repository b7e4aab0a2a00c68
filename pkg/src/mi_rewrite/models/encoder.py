"""Small transformer encoder that hands back per-head attention maps."""

from __future__ import annotations

import math

import torch
from torch import nn


class SelfAttention(nn.Module):
    """Multi-head self-attention returning softmax probabilities per head."""

    def __init__(self, d_model: int, n_heads: int):
        super().__init__()
        if d_model % n_heads:
            raise ValueError("d_model must divide evenly into heads")
        self.n_heads = n_heads
        self.d_head = d_model // n_heads
        self.qkv = nn.Linear(d_model, 3 * d_model)
        self.out = nn.Linear(d_model, d_model)

    def forward(self, x, pad_mask=None, causal=False):
        b, t, d = x.shape
        q, k, v = self.qkv(x).chunk(3, dim=-1)

        def heads(z):
            return z.view(b, t, self.n_heads, self.d_head).transpose(1, 2)

        q, k, v = heads(q), heads(k), heads(v)
        scores = q @ k.transpose(-2, -1) / math.sqrt(self.d_head)
        if pad_mask is not None:
            # pad_mask: (b, t) True at real tokens
            scores = scores.masked_fill(~pad_mask[:, None, None, :], float("-inf"))
        if causal:
            tri = torch.ones(t, t, dtype=torch.bool, device=x.device).tril()
            scores = scores.masked_fill(~tri, float("-inf"))
        probs = scores.softmax(dim=-1)
        ctx = (probs @ v).transpose(1, 2).reshape(b, t, d)
        return self.out(ctx), probs


class CrossAttention(nn.Module):
    def __init__(self, d_model: int, n_heads: int):
        super().__init__()
        self.n_heads = n_heads
        self.d_head = d_model // n_heads
        self.q = nn.Linear(d_model, d_model)
        self.kv = nn.Linear(d_model, 2 * d_model)
        self.out = nn.Linear(d_model, d_model)

    def forward(self, x, memory, memory_mask=None):
        b, t, d = x.shape
        s = memory.shape[1]
        q = self.q(x).view(b, t, self.n_heads, self.d_head).transpose(1, 2)
        k, v = self.kv(memory).chunk(2, dim=-1)
        k = k.view(b, s, self.n_heads, self.d_head).transpose(1, 2)
        v = v.view(b, s, self.n_heads, self.d_head).transpose(1, 2)
        scores = q @ k.transpose(-2, -1) / math.sqrt(self.d_head)
        if memory_mask is not None:
            scores = scores.masked_fill(~memory_mask[:, None, None, :], float("-inf"))
        probs = scores.softmax(dim=-1)
        ctx = (probs @ v).transpose(1, 2).reshape(b, t, d)
        return self.out(ctx)


class FeedForward(nn.Module):
    def __init__(self, d_model: int, d_ff: int):
        super().__init__()
        self.net = nn.Sequential(
            nn.Linear(d_model, d_ff), nn.GELU(), nn.Linear(d_ff, d_model)
        )

    def forward(self, x):
        return self.net(x)


class EncoderLayer(nn.Module):
    def __init__(self, d_model: int, n_heads: int, d_ff: int):
        super().__init__()
        self.attn = SelfAttention(d_model, n_heads)
        self.ff = FeedForward(d_model, d_ff)
        self.ln1 = nn.LayerNorm(d_model)
        self.ln2 = nn.LayerNorm(d_model)

    def forward(self, x, pad_mask=None):
        a, probs = self.attn(x, pad_mask=pad_mask)
        x = self.ln1(x + a)
        x = self.ln2(x + self.ff(x))
        return x, probs


class TextEncoder(nn.Module):
    """Token + position + segment embeddings over post-norm layers.

    forward returns the hidden states and every layer's attention
    probabilities, so callers can read the penultimate layer directly.
    """

    def __init__(
        self,
        vocab_size: int,
        d_model: int = 64,
        n_heads: int = 4,
        n_layers: int = 2,
        d_ff: int = 128,
        max_len: int = 256,
        n_segments: int = 3,
    ):
        super().__init__()
        self.tok = nn.Embedding(vocab_size, d_model)
        self.pos = nn.Embedding(max_len, d_model)
        self.seg = nn.Embedding(n_segments, d_model)
        self.ln = nn.LayerNorm(d_model)
        self.layers = nn.ModuleList(
            EncoderLayer(d_model, n_heads, d_ff) for _ in range(n_layers)
        )
        self.max_len = max_len

    def forward(self, ids, segment_ids=None, pad_mask=None):
        b, t = ids.shape
        if t > self.max_len:
            raise ValueError(f"sequence length {t} exceeds max_len {self.max_len}")
        positions = torch.arange(t, device=ids.device).expand(b, t)
        x = self.tok(ids) + self.pos(positions)
        if segment_ids is not None:
            x = x + self.seg(segment_ids)
        x = self.ln(x)
        attentions = []
        for layer in self.layers:
            x, probs = layer(x, pad_mask=pad_mask)
            attentions.append(probs)
        return x, attentions
