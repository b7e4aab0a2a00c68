"""Deterministic subword vocabulary shared by every trained model.

Words of up to 8 characters stay whole; longer words split into chunks
of at most 6 characters, continuation chunks prefixed with "##". That
keeps the vocabulary small while still exercising the subword-to-word
lift in attention masking.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path

from mi_rewrite.attention import Segment, TokenizedPair
from mi_rewrite.text import _TOKEN_RE, detokenize

PAD, UNK, CLS, SEP, BOS, EOS = "[PAD]", "[UNK]", "[CLS]", "[SEP]", "[BOS]", "[EOS]"
MASK_TOKEN = "<mask>"
CTX_TOKEN = "<ctx>"
SPECIAL_TOKENS = (PAD, UNK, CLS, SEP, BOS, EOS, MASK_TOKEN, CTX_TOKEN)

WHOLE_WORD_MAX = 8
PIECE_LEN = 6

SEGMENT_IDS = {Segment.SPECIAL: 0, Segment.PROMPT: 1, Segment.RESPONSE: 2}


def split_word(word: str) -> list[str]:
    w = word.lower()
    if len(w) <= WHOLE_WORD_MAX:
        return [w]
    pieces = [w[:PIECE_LEN]]
    for i in range(PIECE_LEN, len(w), PIECE_LEN):
        pieces.append("##" + w[i : i + PIECE_LEN])
    return pieces


def join_pieces(pieces: list[str]) -> list[str]:
    """Inverse of split_word applied over a stream of pieces."""
    words: list[str] = []
    for p in pieces:
        if p.startswith("##") and words:
            words[-1] += p[2:]
        else:
            words.append(p)
    return words


@dataclass(frozen=True)
class EncodedPair:
    pair: TokenizedPair
    ids: tuple[int, ...]
    segment_ids: tuple[int, ...]
    truncated: bool


class SubwordVocab:
    def __init__(self, pieces: list[str]):
        for tok in SPECIAL_TOKENS:
            if tok in pieces:
                raise ValueError(f"reserved token {tok!r} in piece list")
        self.itos = list(SPECIAL_TOKENS) + list(pieces)
        self.stoi = {p: i for i, p in enumerate(self.itos)}
        self.pad_id = self.stoi[PAD]
        self.unk_id = self.stoi[UNK]
        self.cls_id = self.stoi[CLS]
        self.sep_id = self.stoi[SEP]
        self.bos_id = self.stoi[BOS]
        self.eos_id = self.stoi[EOS]
        self.mask_id = self.stoi[MASK_TOKEN]
        self.ctx_id = self.stoi[CTX_TOKEN]

    def __len__(self):
        return len(self.itos)

    @classmethod
    def build(cls, texts: list[str], min_count: int = 1) -> "SubwordVocab":
        counts: Counter = Counter()
        for text in texts:
            for word in _TOKEN_RE.findall(text):
                counts.update(split_word(word))
        kept = sorted(
            (p for p, c in counts.items() if c >= min_count),
            key=lambda p: (-counts[p], p),
        )
        return cls(kept)

    def save(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.itos[len(SPECIAL_TOKENS) :], ensure_ascii=False)
        )

    @classmethod
    def load(cls, path: str | Path) -> "SubwordVocab":
        return cls(json.loads(Path(path).read_text()))

    def piece_ids(self, pieces: list[str]) -> list[int]:
        return [self.stoi.get(p, self.unk_id) for p in pieces]

    # -------------------------------------------------- pair encoding

    def encode_pair(
        self, prompt: str, response: str, max_len: int = 128
    ) -> EncodedPair:
        """[CLS] prompt [SEP] response [SEP] with word alignment for the response."""
        prompt_pieces = [
            p for m in _TOKEN_RE.finditer(prompt) for p in split_word(m.group())
        ]
        words: list[str] = []
        resp: list[tuple[str, int, tuple[int, int]]] = []
        for m in _TOKEN_RE.finditer(response):
            wi = len(words)
            words.append(m.group())
            for p in split_word(m.group()):
                resp.append((p, wi, (m.start(), m.end())))
        if not resp:
            raise ValueError("response tokenizes to zero tokens")

        truncated = False
        # budget: CLS + prompt + SEP + response + SEP
        room = max_len - len(prompt_pieces) - 3
        if room < 1:
            # degenerate prompt: keep at least 8 response tokens
            prompt_pieces = prompt_pieces[: max_len - 3 - 8]
            room = max_len - len(prompt_pieces) - 3
            truncated = True
        if len(resp) > room:
            resp = resp[:room]
            truncated = True

        tokens = [CLS] + prompt_pieces + [SEP] + [r[0] for r in resp] + [SEP]
        segments = (
            [Segment.SPECIAL]
            + [Segment.PROMPT] * len(prompt_pieces)
            + [Segment.SPECIAL]
            + [Segment.RESPONSE] * len(resp)
            + [Segment.SPECIAL]
        )
        word_index = (
            [None] * (len(prompt_pieces) + 2) + [r[1] for r in resp] + [None]
        )
        spans = [None] * (len(prompt_pieces) + 2) + [r[2] for r in resp] + [None]
        pair = TokenizedPair(
            tokens=tuple(tokens),
            segments=tuple(segments),
            response_words=tuple(words),
            word_index=tuple(word_index),
            spans=tuple(spans),
        )
        return EncodedPair(
            pair=pair,
            ids=tuple(self.piece_ids(tokens)),
            segment_ids=tuple(SEGMENT_IDS[s] for s in segments),
            truncated=truncated,
        )

    # -------------------------------------------------- seq2seq encoding

    def encode_source(self, text: str, max_len: int = 256) -> list[int]:
        """Whitespace chunks may be reserved sentinels; words get split."""
        pieces: list[str] = []
        for chunk in text.split():
            if chunk in (MASK_TOKEN, CTX_TOKEN):
                pieces.append(chunk)
            else:
                for m in _TOKEN_RE.finditer(chunk):
                    pieces.extend(split_word(m.group()))
        return self.piece_ids(pieces)[:max_len]

    def encode_target(self, text: str, max_len: int = 128) -> list[int]:
        pieces: list[str] = []
        for m in _TOKEN_RE.finditer(text):
            pieces.extend(split_word(m.group()))
        ids = self.piece_ids(pieces)[: max_len - 2]
        return [self.bos_id] + ids + [self.eos_id]

    def decode_to_text(self, ids: list[int]) -> str:
        pieces = [
            self.itos[i]
            for i in ids
            if i not in (self.pad_id, self.bos_id, self.eos_id)
        ]
        words = join_pieces([p for p in pieces if not p.startswith("[")])
        return recapitalize(detokenize(words))


def recapitalize(text: str) -> str:
    """Sentence-initial capitals plus the standalone pronoun i."""
    chars = list(text)
    start = True
    for k, ch in enumerate(chars):
        if start and ch.isalpha():
            chars[k] = ch.upper()
            start = False
        elif ch in ".!?":
            start = True
    out = "".join(chars)
    words = out.split(" ")
    fixed = [
        "I" + w[1:] if w == "i" or w.startswith("i'") else w for w in words
    ]
    return " ".join(fixed)
