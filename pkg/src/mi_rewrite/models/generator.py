"""Encoder-decoder fill-in model: rebuild a full response from a masked template."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass
from typing import Callable

import torch
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted
from torch import nn

from mi_rewrite.corpus import Exchange
from mi_rewrite.models.encoder import (
    CrossAttention,
    FeedForward,
    SelfAttention,
    TextEncoder,
)
from mi_rewrite.models.train_utils import minibatches, pad_batch, seed_all, snapshot
from mi_rewrite.paraphrase import build_paraphrase_set, generate_paraphrases
from mi_rewrite.subword import CTX_TOKEN, SubwordVocab
from mi_rewrite.templating import Template, render_template
from mi_rewrite.text import normalize_space

log = logging.getLogger(__name__)

REFLECTION_TARGETS = ("SR", "CR")

# extractor: (prompt, source_text, content_weight) -> Template
TemplateFn = Callable[[str, str, float], Template]


@dataclass(frozen=True)
class TrainingExample:
    input_text: str
    target_text: str
    augmented: bool

    def __post_init__(self):
        if self.input_text.split().count(CTX_TOKEN) != 1:
            raise ValueError("input must contain exactly one separator token")
        if not self.target_text.strip():
            raise ValueError("target must be non-empty")


def build_training_example(
    ex: Exchange,
    use_paraphrase: bool,
    extractor: TemplateFn,
    content_weight: float = 1.0,
    paraphraser=None,
    n_candidates: int = 5,
    offline_fallback: bool = True,
) -> TrainingExample:
    """Masked-template input with the original reflection as target."""
    if ex.reflection_label not in REFLECTION_TARGETS:
        raise ValueError(
            f"generator training needs SR/CR targets, got {ex.reflection_label!r} ({ex.id})"
        )
    source = ex.response
    augmented = False
    if use_paraphrase:
        candidates = generate_paraphrases(
            ex.response, n=n_candidates, paraphraser=paraphraser,
            offline_fallback=offline_fallback,
        )
        source = build_paraphrase_set(ex.response, candidates).selected
        augmented = normalize_space(source) != normalize_space(ex.response)
    template = extractor(ex.prompt, source, content_weight)
    rendered = render_template(template)
    return TrainingExample(
        input_text=f"{ex.prompt} {CTX_TOKEN} {rendered}",
        target_text=ex.response,
        augmented=augmented,
    )


class DecoderLayer(nn.Module):
    def __init__(self, d_model: int, n_heads: int, d_ff: int):
        super().__init__()
        self.self_attn = SelfAttention(d_model, n_heads)
        self.cross = CrossAttention(d_model, n_heads)
        self.ff = FeedForward(d_model, d_ff)
        self.ln1 = nn.LayerNorm(d_model)
        self.ln2 = nn.LayerNorm(d_model)
        self.ln3 = nn.LayerNorm(d_model)

    def forward(self, x, memory, memory_mask=None):
        a, _ = self.self_attn(x, causal=True)
        x = self.ln1(x + a)
        x = self.ln2(x + self.cross(x, memory, memory_mask))
        return self.ln3(x + self.ff(x))


class Seq2Seq(nn.Module):
    def __init__(self, vocab_size, d_model, n_heads, n_layers, d_ff, max_src, max_tgt):
        super().__init__()
        self.encoder = TextEncoder(
            vocab_size, d_model, n_heads, n_layers, d_ff, max_len=max_src
        )
        self.dec_tok = nn.Embedding(vocab_size, d_model)
        self.dec_pos = nn.Embedding(max_tgt, d_model)
        self.dec_ln = nn.LayerNorm(d_model)
        self.dec_layers = nn.ModuleList(
            DecoderLayer(d_model, n_heads, d_ff) for _ in range(n_layers)
        )
        self.out = nn.Linear(d_model, vocab_size)
        self.max_tgt = max_tgt

    def encode(self, src_ids, src_mask):
        memory, _ = self.encoder(src_ids, None, src_mask)
        return memory

    def decode(self, tgt_in, memory, memory_mask):
        b, t = tgt_in.shape
        pos = torch.arange(t, device=tgt_in.device).expand(b, t)
        x = self.dec_ln(self.dec_tok(tgt_in) + self.dec_pos(pos))
        for layer in self.dec_layers:
            x = layer(x, memory, memory_mask)
        return self.out(x)

    def forward(self, src_ids, src_mask, tgt_in):
        memory = self.encode(src_ids, src_mask)
        return self.decode(tgt_in, memory, src_mask)


class FillGenerator(BaseEstimator):
    """Beam-decoding fill model behind a fit/fill interface."""

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
        max_src_len: int = 192,
        max_tgt_len: int = 128,
        beams: int = 5,
        max_length: int = 128,
    ):
        self.epochs = epochs
        self.lr = lr
        self.batch_size = batch_size
        self.seed = seed
        self.d_model = d_model
        self.n_heads = n_heads
        self.n_layers = n_layers
        self.d_ff = d_ff
        self.max_src_len = max_src_len
        self.max_tgt_len = max_tgt_len
        self.beams = beams
        self.max_length = max_length

    # -------------------------------------------------- training

    def fit(self, examples: list[TrainingExample], dev: list[TrainingExample] | None = None):
        if not examples:
            raise ValueError("no training examples")
        if self.beams < 1:
            raise ValueError("beam count must be >= 1")
        seed_all(self.seed)
        texts = [e.input_text for e in examples] + [e.target_text for e in examples]
        self.vocab_ = SubwordVocab.build(texts)
        self.net_ = Seq2Seq(
            len(self.vocab_),
            self.d_model,
            self.n_heads,
            self.n_layers,
            self.d_ff,
            self.max_src_len,
            self.max_tgt_len,
        )
        opt = torch.optim.Adam(self.net_.parameters(), lr=self.lr)
        loss_fn = nn.CrossEntropyLoss(ignore_index=self.vocab_.pad_id)
        rng = random.Random(self.seed)

        src = [self.vocab_.encode_source(e.input_text, self.max_src_len) for e in examples]
        tgt = [self.vocab_.encode_target(e.target_text, self.max_tgt_len) for e in examples]
        dev_enc = None
        if dev:
            dev_enc = (
                [self.vocab_.encode_source(e.input_text, self.max_src_len) for e in dev],
                [self.vocab_.encode_target(e.target_text, self.max_tgt_len) for e in dev],
            )

        self.initial_dev_loss_ = self._dataset_loss(dev_enc, loss_fn) if dev_enc else None
        best = None
        self.history_ = []
        for epoch in range(self.epochs):
            self.net_.train()
            total = 0.0
            for batch in minibatches(len(examples), self.batch_size, rng):
                opt.zero_grad()
                loss = self._batch_loss(
                    [src[i] for i in batch], [tgt[i] for i in batch], loss_fn
                )
                loss.backward()
                opt.step()
                total += float(loss.detach()) * len(batch)
            record = {"epoch": epoch, "train_loss": total / len(examples)}
            if dev_enc:
                dev_loss = self._dataset_loss(dev_enc, loss_fn)
                record["dev_loss"] = dev_loss
                if best is None or dev_loss < best[0]:
                    best = (dev_loss, snapshot(self.net_))
            self.history_.append(record)
            log.info("generator %s", record)
        if best is not None:
            self.net_.load_state_dict(best[1])
        self.net_.eval()
        return self

    def _batch_loss(self, src, tgt, loss_fn):
        src_ids, src_mask = pad_batch(src, self.vocab_.pad_id)
        tgt_ids, _ = pad_batch(tgt, self.vocab_.pad_id)
        logits = self.net_(src_ids, src_mask, tgt_ids[:, :-1])
        return loss_fn(
            logits.reshape(-1, logits.shape[-1]), tgt_ids[:, 1:].reshape(-1)
        )

    def _dataset_loss(self, enc, loss_fn) -> float:
        src, tgt = enc
        self.net_.eval()
        total, count = 0.0, 0
        with torch.no_grad():
            for i in range(0, len(src), self.batch_size):
                loss = self._batch_loss(src[i : i + self.batch_size], tgt[i : i + self.batch_size], loss_fn)
                total += float(loss) * len(src[i : i + self.batch_size])
                count += len(src[i : i + self.batch_size])
        return total / count

    # -------------------------------------------------- decoding

    def fill(self, prompt: str, template: Template, seed: int | None = None) -> str:
        return self.fill_batch([(prompt, template)])[0]

    def fill_batch(self, items: list[tuple[str, Template]]) -> list[str]:
        check_is_fitted(self, "net_")
        sources = [
            f"{prompt} {CTX_TOKEN} {render_template(t)}" for prompt, t in items
        ]
        ids = [self.vocab_.encode_source(s, self.max_src_len) for s in sources]
        raw = self._beam_decode(ids, self.beams)
        out = []
        for k, row in enumerate(raw):
            text = self.vocab_.decode_to_text(row).strip()
            if not text:
                text = self.vocab_.decode_to_text(
                    self._beam_decode([ids[k]], 1)[0]
                ).strip()
            if not text:
                raise RuntimeError(f"decoder produced empty output for {sources[k]!r}")
            out.append(text)
        return out

    def _beam_decode(self, src_id_lists: list[list[int]], beams: int) -> list[list[int]]:
        """Batched beam search; ties resolve to the lowest token id."""
        self.net_.eval()
        bos, eos, pad = self.vocab_.bos_id, self.vocab_.eos_id, self.vocab_.pad_id
        b = len(src_id_lists)
        k = beams
        max_steps = min(self.max_length, self.max_tgt_len) - 1
        with torch.no_grad():
            src_ids, src_mask = pad_batch(src_id_lists, pad)
            memory = self.net_.encode(src_ids, src_mask)
            d = memory.shape[-1]
            s = memory.shape[1]
            memory = (
                memory[:, None].expand(b, k, s, d).reshape(b * k, s, d)
            )
            mem_mask = src_mask[:, None].expand(b, k, s).reshape(b * k, s)

            seqs = torch.full((b, k, 1), bos, dtype=torch.long)
            scores = torch.full((b, k), float("-inf"))
            scores[:, 0] = 0.0  # only one live beam at the start
            done = torch.zeros((b, k), dtype=torch.bool)

            for _ in range(max_steps):
                logits = self.net_.decode(
                    seqs.reshape(b * k, -1), memory, mem_mask
                )[:, -1]
                logprobs = logits.log_softmax(dim=-1).reshape(b, k, -1)
                v = logprobs.shape[-1]
                # finished beams may only emit PAD at no cost
                pad_only = torch.full((v,), float("-inf"))
                pad_only[pad] = 0.0
                logprobs = torch.where(done[..., None], pad_only, logprobs)
                combined = scores[..., None] + logprobs
                flat = combined.reshape(b, k * v)
                top_scores, top_idx = flat.topk(k, dim=-1)
                beam_idx = top_idx // v
                tok_idx = top_idx % v
                seqs = torch.cat(
                    [
                        torch.gather(
                            seqs, 1, beam_idx[..., None].expand(-1, -1, seqs.shape[-1])
                        ),
                        tok_idx[..., None],
                    ],
                    dim=-1,
                )
                done = torch.gather(done, 1, beam_idx) | (tok_idx == eos)
                scores = top_scores
                if bool(done.all()):
                    break

            # length-normalized pick over the k finished candidates
            out = []
            for row in range(b):
                best, best_key = None, None
                for beam in range(k):
                    toks = [t for t in seqs[row, beam].tolist() if t != pad]
                    length = max(len(toks) - 1, 1)  # exclude BOS
                    key = float(scores[row, beam]) / length
                    if best_key is None or key > best_key:
                        best, best_key = toks, key
                out.append(best)
        return out
