"""Interpretation candidates from dependency collocations and association norms."""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, replace
from typing import Iterable, Mapping, Optional

from .corpus import CorpusIndex, collocations_of

log = logging.getLogger(__name__)


class NoCandidatesError(ValueError):
    """Raised when neither source yields a single candidate."""


@dataclass(frozen=True)
class Metaphor:
    topic: str
    vehicle: str

    def __post_init__(self):
        for word in (self.topic, self.vehicle):
            if not word or word != word.lower() or any(ch.isspace() for ch in word):
                raise ValueError(f"metaphor words must be lowercase single tokens, got {word!r}")

    def __str__(self):
        return f"{self.topic} is {self.vehicle}"


@dataclass(frozen=True)
class Candidate:
    word: str
    from_topic_colloc: bool = False
    from_vehicle_colloc: bool = False
    from_topic_assoc: bool = False
    from_vehicle_assoc: bool = False

    def __post_init__(self):
        if not self.word:
            raise ValueError("empty candidate word")
        if not (self.from_topic_colloc or self.from_vehicle_colloc or self.from_topic_assoc or self.from_vehicle_assoc):
            raise ValueError(f"candidate {self.word!r} has no source")

    def merged(self, other: "Candidate") -> "Candidate":
        return replace(
            self,
            from_topic_colloc=self.from_topic_colloc or other.from_topic_colloc,
            from_vehicle_colloc=self.from_vehicle_colloc or other.from_vehicle_colloc,
            from_topic_assoc=self.from_topic_assoc or other.from_topic_assoc,
            from_vehicle_assoc=self.from_vehicle_assoc or other.from_vehicle_assoc,
        )


# cue -> [(response, strength), ...]
AssociationNorms = Mapping[str, list]


def load_lexicon(path) -> frozenset:
    """One word per line; blank lines and ``#`` comments ignored."""
    with open(path, encoding="utf-8") as fh:
        return frozenset(
            line.strip().lower() for line in fh if line.strip() and not line.startswith("#")
        )


def load_norms(path, cue_col: str = "cue", response_col: str = "response", strength_col: str = "strength") -> dict:
    """Read a comma-separated norms export with a header row.

    Rows with an unparseable strength are skipped. Column names are
    configurable because published exports differ.
    """
    norms: dict = {}
    skipped = 0
    with open(path, encoding="utf-8", newline="") as fh:
        for row in csv.DictReader(fh, skipinitialspace=True):
            try:
                cue = row[cue_col].strip().lower()
                response = row[response_col].strip().lower()
                strength = float(row[strength_col]) if row.get(strength_col) not in (None, "") else 0.0
            except (KeyError, ValueError, AttributeError):
                skipped += 1
                continue
            if not cue or not response or strength != strength or strength < 0:
                skipped += 1
                continue
            norms.setdefault(cue, []).append((response, strength))
    if skipped:
        log.info("%s: skipped %d norm rows", path, skipped)
    return norms


def _collect(pool: dict, cand: Candidate) -> None:
    pool[cand.word] = pool[cand.word].merged(cand) if cand.word in pool else cand


def collocation_candidates(metaphor: Metaphor, index: CorpusIndex, lexicon) -> list:
    pool: dict = {}
    for word, _ in collocations_of(index, metaphor.topic):
        if word in lexicon:
            _collect(pool, Candidate(word, from_topic_colloc=True))
    for word, _ in collocations_of(index, metaphor.vehicle):
        if word in lexicon:
            _collect(pool, Candidate(word, from_vehicle_colloc=True))
    return sorted(pool.values(), key=lambda c: c.word)


def association_candidates(metaphor: Metaphor, norms: Optional[AssociationNorms]) -> list:
    """All single-token responses to the topic and vehicle cues, any POS."""
    pool: dict = {}
    if not norms:
        return []
    for response, _ in norms.get(metaphor.topic, ()):
        if response and not any(ch.isspace() for ch in response):
            _collect(pool, Candidate(response, from_topic_assoc=True))
    for response, _ in norms.get(metaphor.vehicle, ()):
        if response and not any(ch.isspace() for ch in response):
            _collect(pool, Candidate(response, from_vehicle_assoc=True))
    return sorted(pool.values(), key=lambda c: c.word)


def generate(
    metaphor: Metaphor,
    index: CorpusIndex,
    lexicon,
    norms: Optional[AssociationNorms] = None,
    use_associations: bool = True,
) -> list:
    """Union of both candidate sources, sorted by word.

    The metaphor's own topic and vehicle never become candidates.
    """
    sources: Iterable = collocation_candidates(metaphor, index, lexicon)
    if use_associations:
        sources = [*sources, *association_candidates(metaphor, norms)]
    pool: dict = {}
    for cand in sources:
        if cand.word not in (metaphor.topic, metaphor.vehicle):
            _collect(pool, cand)
    if not pool:
        raise NoCandidatesError(f"no candidates for '{metaphor}'")
    return sorted(pool.values(), key=lambda c: c.word)
