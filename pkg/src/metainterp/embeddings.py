"""Word vectors in the whitespace text format (``word v1 v2 ... vd``)."""

from __future__ import annotations

import gzip
import logging
import math
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

log = logging.getLogger(__name__)


@dataclass
class LoadStats:
    loaded: int = 0
    bad_arity: int = 0
    non_finite: int = 0
    duplicates: int = 0


@dataclass(frozen=True)
class EmbeddingStore:
    """Read-only word -> vector map with cached norms.

    Vectors are kept exactly as read; cosine divides by the cached norms.
    """

    words: tuple
    matrix: np.ndarray
    stats: LoadStats = field(default_factory=LoadStats, compare=False)

    def __post_init__(self):
        if self.matrix.ndim != 2 or self.matrix.shape[0] != len(self.words):
            raise ValueError("matrix shape does not match the vocabulary")
        if not np.all(np.isfinite(self.matrix)):
            raise ValueError("non-finite vector entries")
        self.matrix.setflags(write=False)
        object.__setattr__(self, "_row", {w: i for i, w in enumerate(self.words)})
        # norms of rows rescaled by their max |entry|, so tiny or huge vectors don't under/overflow
        scale = np.abs(self.matrix).max(axis=1, initial=0.0)
        safe = np.where(scale > 0, scale, 1.0)
        unit_norms = np.empty(len(self.words))
        for start in range(0, len(self.words), 65536):  # bounded temporaries on 400k-row files
            block = slice(start, start + 65536)
            unit_norms[block] = np.linalg.norm(self.matrix[block] / safe[block, None], axis=1)
        norms = scale * unit_norms
        for arr in (safe, unit_norms, norms):
            arr.setflags(write=False)
        object.__setattr__(self, "_scale", safe)
        object.__setattr__(self, "_unit_norms", unit_norms)
        object.__setattr__(self, "norms", norms)

    @classmethod
    def from_dict(cls, vectors: Mapping[str, object]) -> "EmbeddingStore":
        words = tuple(vectors)
        if not words:
            raise ValueError("no vectors")
        matrix = np.array([np.asarray(vectors[w], dtype=float) for w in words])
        return cls(words, matrix)

    @property
    def dims(self) -> int:
        return self.matrix.shape[1]

    def __contains__(self, word) -> bool:
        return word in self._row

    def __len__(self) -> int:
        return len(self.words)

    def get(self, word: str) -> Optional[np.ndarray]:
        i = self._row.get(word)
        return None if i is None else self.matrix[i]

    def row(self, word: str) -> Optional[int]:
        return self._row.get(word)


def load_embeddings(path, expected_dims: Optional[int] = None, dtype=np.float64) -> EmbeddingStore:
    """Load a text embedding file, optionally gzip-compressed.

    The dimensionality comes from the first line unless ``expected_dims`` is
    given, in which case a first line of a different arity is an error.
    Later lines with the wrong arity or non-finite values are skipped and
    tallied; repeated words keep their first vector.
    """
    path = str(path)
    opener = gzip.open if path.endswith(".gz") else open
    stats = LoadStats()
    words: list = []
    rows: list = []
    seen: set = set()
    dims = expected_dims
    first = True
    with opener(path, "rt", encoding="utf-8", errors="replace") as fh:
        for line in fh:
            parts = line.rstrip().split()
            if not parts:
                continue
            if first:
                first = False
                if dims is None:
                    dims = len(parts) - 1
                    if dims < 1:
                        raise ValueError(f"{path}: first line has no vector values")
                elif len(parts) - 1 != dims:
                    raise ValueError(f"{path}: expected {dims} dims, first line has {len(parts) - 1}")
            if len(parts) - 1 != dims:
                stats.bad_arity += 1
                continue
            try:
                values = [float(x) for x in parts[1:]]
            except ValueError:
                stats.bad_arity += 1
                continue
            if not all(math.isfinite(x) for x in values):
                stats.non_finite += 1
                continue
            word = parts[0]
            if word in seen:
                stats.duplicates += 1
                continue
            seen.add(word)
            words.append(word)
            rows.append(values)
    if not words:
        raise ValueError(f"{path}: no usable vectors")
    stats.loaded = len(words)
    if stats.bad_arity or stats.non_finite:
        log.info("%s: skipped %d malformed and %d non-finite lines", path, stats.bad_arity, stats.non_finite)
    return EmbeddingStore(tuple(words), np.array(rows, dtype=dtype), stats)


def cosine(store: EmbeddingStore, a: str, b: str) -> Optional[float]:
    """Cosine similarity, or ``None`` if a word is missing or has a zero vector."""
    i, j = store.row(a), store.row(b)
    if i is None or j is None:
        return None
    if store.norms[i] == 0.0 or store.norms[j] == 0.0:
        return None
    a = store.matrix[i] / store._scale[i]
    b = store.matrix[j] / store._scale[j]
    value = float(np.dot(a, b) / (store._unit_norms[i] * store._unit_norms[j]))
    return min(1.0, max(-1.0, value))
