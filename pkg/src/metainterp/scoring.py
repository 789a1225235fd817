"""Per-candidate scores and their weighted log-linear combination."""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass
from typing import Optional, Sequence

import numpy as np

from .candidates import Candidate, Metaphor
from .corpus import CorpusIndex, collocations_of, npmi, rel_freq
from .embeddings import EmbeddingStore, cosine

FLOOR = 1e-6
SCORE_NAMES = ("sem_topic", "sem_vehicle", "npmi_topic", "npmi_vehicle", "freq")


@dataclass(frozen=True)
class ScoreVector:
    sem_topic: Optional[float]
    sem_vehicle: Optional[float]
    npmi_topic: Optional[float]
    npmi_vehicle: Optional[float]
    freq: float

    def __post_init__(self):
        for name in SCORE_NAMES[:4]:
            value = getattr(self, name)
            if value is not None and not -1.0 <= value <= 1.0:
                raise ValueError(f"{name}={value} outside [-1, 1]")
        if not 0.0 <= self.freq <= 1.0:
            raise ValueError(f"freq={self.freq} outside [0, 1]")

    def transformed(self) -> tuple:
        """Map every component into (0, 1] so its log is finite.

        Bounded scores go through ``(s + 1) / 2``; everything is clamped
        below at ``FLOOR``, and undefined entries sit on the floor.
        """
        out = []
        for s in astuple(self)[:4]:
            out.append(FLOOR if s is None else max((s + 1.0) / 2.0, FLOOR))
        out.append(max(self.freq, FLOOR))
        return tuple(out)


@dataclass(frozen=True)
class Weights:
    sem_topic: float = 0.6
    sem_vehicle: float = 1.1
    npmi_topic: float = 0.1
    npmi_vehicle: float = 0.1
    freq: float = 3.0

    def __post_init__(self):
        for value in astuple(self):
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"weights must be finite and non-negative, got {astuple(self)}")

    def as_array(self) -> np.ndarray:
        return np.array(astuple(self), dtype=float)

    def scaled(self, factor: float) -> "Weights":
        return Weights(*(w * factor for w in astuple(self)))


@dataclass(frozen=True)
class ScoredCandidate:
    candidate: Candidate
    scores: ScoreVector
    final: float

    @property
    def word(self) -> str:
        return self.candidate.word


def significant_collocations(index: CorpusIndex, noun: str, k: int) -> list:
    """The ``k`` dependents of ``noun`` with the highest NPMI.

    Ties fall back to the higher pair count, then to alphabetical order.
    """
    if k < 1:
        raise ValueError("k must be positive")
    ranked = sorted(
        ((npmi(index, dep, noun), count, dep) for dep, count in collocations_of(index, noun)),
        key=lambda item: (-item[0], -item[1], item[2]),
    )
    return [dep for _, _, dep in ranked[:k]]


def semantic_score(store: EmbeddingStore, candidate: str, anchors: Sequence[str]) -> Optional[float]:
    """Mean cosine between ``candidate`` and the anchors that have vectors."""
    if not anchors:
        raise ValueError("semantic_score needs at least one anchor")
    sims = [s for s in (cosine(store, candidate, a) for a in anchors) if s is not None]
    if not sims:
        return None
    return min(1.0, max(-1.0, math.fsum(sims) / len(sims)))


def final_score(scores: ScoreVector, weights: Weights) -> float:
    return combine(log_scores(scores), astuple(weights))


def log_scores(scores: ScoreVector) -> tuple:
    return tuple(math.log(t) for t in scores.transformed())


def combine(logs: Sequence[float], weights: Sequence[float]) -> float:
    # fixed left-to-right order so the tuner's column-wise numpy sum matches exactly
    total = 0.0
    for w, lg in zip(weights, logs):
        total += w * lg
    return total


def score_vector(
    word: str,
    metaphor: Metaphor,
    index: CorpusIndex,
    store: EmbeddingStore,
    topic_anchors: Sequence[str],
    vehicle_anchors: Sequence[str],
) -> ScoreVector:
    # no anchors at all (noun unseen in the corpus) scores like an OOV anchor set
    sem_t = semantic_score(store, word, topic_anchors) if topic_anchors else None
    sem_v = semantic_score(store, word, vehicle_anchors) if vehicle_anchors else None
    has_pairs = index.pair_total > 0
    return ScoreVector(
        sem_topic=sem_t,
        sem_vehicle=sem_v,
        npmi_topic=npmi(index, word, metaphor.topic) if has_pairs else None,
        npmi_vehicle=npmi(index, word, metaphor.vehicle) if has_pairs else None,
        freq=rel_freq(index, word) if index.token_total else 0.0,
    )


def rank_key(sc: ScoredCandidate):
    return (-sc.final, sc.word)


def score_all(
    candidates: Sequence[Candidate],
    metaphor: Metaphor,
    index: CorpusIndex,
    store: EmbeddingStore,
    k: int,
    weights: Weights,
) -> list:
    """Score and rank candidates, best first, ties alphabetical.

    Candidates without an embedding (or with a zero vector) are dropped.
    """
    topic_anchors = significant_collocations(index, metaphor.topic, k)
    vehicle_anchors = significant_collocations(index, metaphor.vehicle, k)
    scored = []
    for cand in candidates:
        row = store.row(cand.word)
        if row is None or store.norms[row] == 0.0:
            continue
        scores = score_vector(cand.word, metaphor, index, store, topic_anchors, vehicle_anchors)
        scored.append(ScoredCandidate(cand, scores, final_score(scores, weights)))
    scored.sort(key=rank_key)
    return scored
