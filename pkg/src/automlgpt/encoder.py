"""Card text encoding and similarity.

The built-in embedder ("hash-v1") is a 256-bucket hashed bag of tokens
using 64-bit FNV-1a: integer hashing plus fixed-order accumulation makes
it bit-exact across platforms. A CLIP-style external encoder can be
plugged in through the same interface but is never required.
"""

from __future__ import annotations

import math
import os
import re
from dataclasses import dataclass
from typing import Protocol

import httpx

from .cards import DataCard, render_number
from .errors import DimensionMismatch

DIM = 256

_FNV_OFFSET = 0xCBF29CE484222325
_FNV_PRIME = 0x100000001B3
_TOKEN_RE = re.compile(r"[a-z0-9]+")


def fnv1a64(data: bytes) -> int:
    h = _FNV_OFFSET
    for b in data:
        h ^= b
        h = (h * _FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


@dataclass(frozen=True)
class Embedding:
    values: tuple[float, ...]

    @property
    def is_zero(self) -> bool:
        return all(v == 0.0 for v in self.values)

    def norm(self) -> float:
        return math.sqrt(sum(v * v for v in self.values))


class Embedder(Protocol):
    id: str

    def embed(self, text: str) -> Embedding: ...


def card_text(card: DataCard) -> str:
    """Encoder input: scale, task description, sorted labels, input type."""
    parts: list[str] = []
    if card.scale is not None:
        parts.append(render_number(card.scale))
    if card.task_description:
        parts.append(card.task_description)
    if card.has_class_list:
        parts.extend(sorted(card.label_space))
    elif card.label_space:
        parts.append(card.label_space)
    parts.append(card.input_type)
    return " ".join(parts)


def tokenize(text: str) -> list[str]:
    return _TOKEN_RE.findall(text.lower())


def embed_hash_v1(text: str) -> Embedding:
    counts = [0] * DIM
    for token in tokenize(text):
        counts[fnv1a64(token.encode("utf-8")) % DIM] += 1
    total = math.sqrt(sum(c * c for c in counts))
    if total == 0.0:
        return Embedding(values=(0.0,) * DIM)
    return Embedding(values=tuple(c / total for c in counts))


class HashEmbedder:
    """Deterministic built-in embedder."""

    id = "hash-v1"

    def embed(self, text: str) -> Embedding:
        return embed_hash_v1(text)


class HttpEmbedder:
    """Client for an external embedding endpoint (POST {"input": text})."""

    def __init__(self, url: str | None = None, timeout: float = 30.0):
        self.url = url or os.environ.get("AUTOMLGPT_EMBED_URL", "")
        self.id = self.url
        self._timeout = timeout

    def embed(self, text: str) -> Embedding:
        response = httpx.post(self.url, json={"input": text}, timeout=self._timeout)
        response.raise_for_status()
        values = [float(v) for v in response.json()["embedding"]]
        norm = math.sqrt(sum(v * v for v in values))
        if norm == 0.0:
            return Embedding(values=tuple(values))
        return Embedding(values=tuple(v / norm for v in values))


def similarity(a: Embedding, b: Embedding) -> float:
    """Cosine similarity clamped to [0, 1]; zero vectors score 0."""
    if len(a.values) != len(b.values):
        raise DimensionMismatch(
            f"embedding dimensions differ: {len(a.values)} vs {len(b.values)}")
    if a.is_zero or b.is_zero:
        return 0.0
    dot = sum(x * y for x, y in zip(a.values, b.values))
    cos = dot / (a.norm() * b.norm())
    return max(0.0, cos)
