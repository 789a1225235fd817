"""End-to-end interpretation: preprocess, generate, score, deduplicate, truncate."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional

from .candidates import AssociationNorms, Metaphor, NoCandidatesError, generate
from .clustering import ClusterParams, dedup
from .corpus import CorpusIndex
from .embeddings import EmbeddingStore
from .scoring import Weights, score_all

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class PipelineConfig:
    k: int = 10
    weights: Weights = field(default_factory=Weights)
    cluster: Optional[ClusterParams] = field(default_factory=ClusterParams)  # None skips dedup
    use_associations: bool = True
    top_n_output: int = 100

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("k must be positive")
        if self.top_n_output < 1:
            raise ValueError("top_n_output must be positive")


@dataclass(frozen=True)
class Resources:
    index: CorpusIndex
    store: EmbeddingStore
    lexicon: frozenset
    norms: Optional[AssociationNorms] = None


@dataclass(frozen=True)
class Diagnostic:
    stage: str
    reason: str

    def __str__(self):
        return f"{self.stage}: {self.reason}"


@dataclass
class Interpretation:
    metaphor: Metaphor
    results: list  # [(word, final score)], best first
    scored: list = field(default_factory=list, repr=False)  # full ranking before dedup/truncation
    diagnostic: Optional[Diagnostic] = None

    @property
    def words(self) -> list:
        return [w for w, _ in self.results]


def preprocess_metaphor(topic: str, vehicle: str) -> Metaphor:
    """Lowercase and squeeze out whitespace (``"sleeping pill"`` -> ``"sleepingpill"``)."""
    t = "".join(topic.split()).lower()
    v = "".join(vehicle.split()).lower()
    if not t or not v:
        raise ValueError(f"empty topic or vehicle: {topic!r}, {vehicle!r}")
    return Metaphor(t, v)


def interpret(metaphor: Metaphor, resources: Resources, config: PipelineConfig = PipelineConfig()) -> Interpretation:
    try:
        candidates = generate(
            metaphor, resources.index, resources.lexicon, resources.norms, config.use_associations
        )
    except NoCandidatesError:
        return Interpretation(metaphor, [], diagnostic=Diagnostic("generate", "no candidates"))

    scored = score_all(candidates, metaphor, resources.index, resources.store, config.k, config.weights)
    if not scored:
        return Interpretation(
            metaphor, [], diagnostic=Diagnostic("score", "no candidate has an embedding")
        )

    kept = dedup(scored, resources.store, config.cluster) if config.cluster else scored
    top = kept[: config.top_n_output]
    return Interpretation(metaphor, [(sc.word, sc.final) for sc in top], scored=scored)


def format_tsv(results) -> str:
    """``rank<TAB>word<TAB>final_score`` rows, ranks from 1."""
    return "".join(f"{rank}\t{word}\t{score:.6f}\n" for rank, (word, score) in enumerate(results, 1))
