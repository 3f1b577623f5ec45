"""Three-way cosine matching between a title and a companion text (image
caption or audio transcript)."""

from __future__ import annotations

import sys
import unicodedata
from collections import Counter
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np


class EmbeddingTableError(ValueError):
    pass


@dataclass
class DisparityTriplet:
    cos_plain: float
    cos_preprocessed: float
    cos_embedding: float

    def as_row(self) -> list[float]:
        return [self.cos_plain, self.cos_preprocessed, self.cos_embedding]


class WordEmbeddingTable:
    """Word → dense vector map with case-insensitive lookup."""

    def __init__(self, vectors: dict[str, np.ndarray], dim: int):
        self.vectors = vectors
        self.dim = dim

    def __len__(self) -> int:
        return len(self.vectors)

    def __contains__(self, word: str) -> bool:
        return word.lower() in self.vectors

    def get(self, word: str) -> np.ndarray | None:
        return self.vectors.get(word.lower())


def load_embedding_table(path: str | Path) -> WordEmbeddingTable:
    """Load a text table of "word v1 v2 ... vd" lines; the first line fixes d."""
    vectors: dict[str, np.ndarray] = {}
    dim = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            parts = line.split()
            if len(parts) < 2:
                raise EmbeddingTableError(f"line {lineno}: expected word followed by values")
            word = parts[0].lower()
            try:
                vec = np.asarray([float(p) for p in parts[1:]], dtype=np.float64)
            except ValueError as exc:
                raise EmbeddingTableError(f"line {lineno}: non-numeric value") from exc
            if dim == 0:
                dim = vec.size
            elif vec.size != dim:
                raise EmbeddingTableError(
                    f"line {lineno}: dimension {vec.size} != {dim} from first line"
                )
            vectors[word] = vec
    if not vectors:
        raise EmbeddingTableError(f"{path}: empty embedding table")
    return WordEmbeddingTable(vectors, dim)


def cosine_similarity(u: np.ndarray, v: np.ndarray) -> float:
    """u.v / (|u||v|), with either zero vector mapping to 0."""
    u = np.asarray(u, dtype=np.float64)
    v = np.asarray(v, dtype=np.float64)
    if u.shape != v.shape:
        raise ValueError(f"dimension mismatch: {u.shape} vs {v.shape}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.dot(u, v) / (nu * nv))


@lru_cache(maxsize=1)
def _punct_table() -> dict[int, None]:
    # Unicode punctuation (category P*) mapped to deletion.
    return {
        cp: None
        for cp in range(sys.maxunicode + 1)
        if unicodedata.category(chr(cp)).startswith("P")
    }


def strip_punctuation(text: str) -> str:
    return text.translate(_punct_table())


def preprocess(text: str, stopwords: set[str] | frozenset[str]) -> list[str]:
    """Lowercase, strip punctuation, split on whitespace, drop stopwords."""
    cleaned = strip_punctuation(text.lower())
    return [t for t in cleaned.split() if t not in stopwords]


def tf_cosine(tokens_a: list[str], tokens_b: list[str]) -> float:
    """Cosine of term-frequency vectors over the union vocabulary."""
    ca = Counter(tokens_a)
    cb = Counter(tokens_b)
    if not ca or not cb:
        return 0.0
    dot = sum(n * cb[t] for t, n in ca.items())
    nu = sum(n * n for n in ca.values()) ** 0.5
    nv = sum(n * n for n in cb.values()) ** 0.5
    return dot / (nu * nv)


def embed_mean(tokens: list[str], table: WordEmbeddingTable) -> np.ndarray:
    """Mean vector of in-vocabulary tokens; zero vector when none are known."""
    hits = [table.get(t) for t in tokens]
    hits = [h for h in hits if h is not None]
    if not hits:
        return np.zeros(table.dim, dtype=np.float64)
    return np.mean(hits, axis=0)


def disparity_triplet(
    text_a: str,
    text_b: str,
    stopwords: set[str] | frozenset[str],
    table: WordEmbeddingTable,
) -> DisparityTriplet:
    """Three similarity views of the same pair: raw-token TF cosine,
    preprocessed TF cosine, and cosine of mean word vectors."""
    pre_a = preprocess(text_a, stopwords)
    pre_b = preprocess(text_b, stopwords)
    return DisparityTriplet(
        cos_plain=tf_cosine(text_a.split(), text_b.split()),
        cos_preprocessed=tf_cosine(pre_a, pre_b),
        cos_embedding=cosine_similarity(embed_mean(pre_a, table), embed_mean(pre_b, table)),
    )
