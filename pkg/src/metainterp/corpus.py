"""Dependency-corpus statistics.

Streams a CoNLL-style parsed corpus into count tables over (dependent, head)
arcs and answers collocation, frequency and normalized-PMI queries.

Only arcs whose head is a noun and whose dependent is an adjective or gerund
are counted as pairs; those arcs form the whole event space for NPMI, so the
marginals are taken over the same filtered arcs. Token frequencies are kept
over every token.
"""

from __future__ import annotations

import gzip
import logging
import math
import zlib
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Iterator, Optional, Sequence

log = logging.getLogger(__name__)

SNAPSHOT_VERSION = "metainterp-index 1"

NOUN_TAGS = frozenset({"NN", "NNS", "NNP", "NNPS"})
CANDIDATE_TAGS = frozenset({"JJ", "JJR", "JJS", "VBG"})


def is_noun_tag(pos: str) -> bool:
    return pos in NOUN_TAGS


def is_candidate_tag(pos: str) -> bool:
    """Adjectives (JJ, JJR, JJS) and gerunds (VBG)."""
    return pos in CANDIDATE_TAGS


@dataclass(frozen=True)
class TokenRow:
    surface: str
    lemma: str
    pos: str
    head_index: int  # 1-based position in the sentence, 0 = root
    relation: str

    def __post_init__(self):
        if self.head_index < 0:
            raise ValueError(f"negative head index: {self.head_index}")
        if not self.pos:
            raise ValueError("empty POS tag")
        if not self.surface:
            raise ValueError("empty surface form")


@dataclass(frozen=True)
class ConllColumns:
    """0-based column positions inside a tab-separated CoNLL line.

    Defaults follow the 10-column CoNLL layout with the Penn tag in the
    fifth (XPOS) column, which is how DepCC ships.
    """

    id: Optional[int] = 0
    token: int = 1
    lemma: int = 2
    pos: int = 4
    head: int = 6
    deprel: int = 7


@dataclass
class IngestStats:
    sentences: int = 0
    tokens: int = 0
    arcs_kept: int = 0
    rows_skipped: int = 0
    heads_out_of_range: int = 0
    files_read: int = 0
    files_skipped: int = 0

    def merge(self, other: "IngestStats") -> "IngestStats":
        return IngestStats(**{k: getattr(self, k) + getattr(other, k) for k in self.__dataclass_fields__})


@dataclass(frozen=True)
class CorpusIndex:
    """Immutable count tables built by :func:`ingest_conll`.

    ``pair_count`` is keyed by ``(dependent, head)``. Don't mutate the dicts
    after construction; merging builds a new index.
    """

    pair_count: dict = field(default_factory=dict)
    dep_marginal: dict = field(default_factory=dict)
    head_marginal: dict = field(default_factory=dict)
    pair_total: int = 0
    token_freq: dict = field(default_factory=dict)
    token_total: int = 0
    stats: IngestStats = field(default_factory=IngestStats, compare=False)

    def __post_init__(self):
        # collocation lists are queried per noun; build the reverse map once
        by_head: dict = {}
        for (dep, head), n in self.pair_count.items():
            by_head.setdefault(head, []).append((dep, n))
        for deps in by_head.values():
            deps.sort(key=lambda item: (-item[1], item[0]))
        object.__setattr__(self, "_by_head", by_head)

    @classmethod
    def from_pairs(cls, pairs: Counter, token_freq: Counter, stats: Optional[IngestStats] = None) -> "CorpusIndex":
        dep_marginal: Counter = Counter()
        head_marginal: Counter = Counter()
        for (dep, head), n in pairs.items():
            dep_marginal[dep] += n
            head_marginal[head] += n
        return cls(
            pair_count=dict(pairs),
            dep_marginal=dict(dep_marginal),
            head_marginal=dict(head_marginal),
            pair_total=sum(pairs.values()),
            token_freq=dict(token_freq),
            token_total=sum(token_freq.values()),
            stats=stats or IngestStats(),
        )

    def merge(self, other: "CorpusIndex") -> "CorpusIndex":
        """Pointwise sum of two indexes (shard merge)."""
        pairs = Counter(self.pair_count)
        pairs.update(other.pair_count)
        tokens = Counter(self.token_freq)
        tokens.update(other.token_freq)
        return CorpusIndex.from_pairs(pairs, tokens, self.stats.merge(other.stats))

    def dependents_of(self, noun: str) -> list:
        return list(self._by_head.get(noun, ()))


def ingest_conll(
    sentences: Iterable[Sequence[Optional[TokenRow]]],
    pos_filter: Callable[[str], bool] = is_candidate_tag,
    head_filter: Callable[[str], bool] = is_noun_tag,
    stats: Optional[IngestStats] = None,
) -> CorpusIndex:
    """Count filtered dependency arcs and token frequencies.

    Each sentence is a sequence of rows where position ``i`` (0-based) is the
    token with index ``i + 1``. ``None`` marks a row the reader could not
    parse; it still occupies its position so head indexes stay aligned.
    """
    stats = stats if stats is not None else IngestStats()
    pairs: Counter = Counter()
    tokens: Counter = Counter()
    for sentence in sentences:
        stats.sentences += 1
        n = len(sentence)
        for row in sentence:
            if row is None:
                stats.rows_skipped += 1
                continue
            stats.tokens += 1
            tokens[row.surface.lower()] += 1
            if row.head_index == 0:
                continue
            if row.head_index > n:
                stats.heads_out_of_range += 1
                continue
            head = sentence[row.head_index - 1]
            if head is None:
                continue
            if head_filter(head.pos) and pos_filter(row.pos):
                pairs[(row.surface.lower(), head.surface.lower())] += 1
    stats.arcs_kept += sum(pairs.values())
    return CorpusIndex.from_pairs(pairs, tokens, stats)


def _open_text(path):
    path = str(path)
    if path.endswith(".gz"):
        return gzip.open(path, "rt", encoding="utf-8", errors="replace")
    return open(path, encoding="utf-8", errors="replace")


def _parse_row(line: str, cols: ConllColumns) -> Optional[TokenRow]:
    parts = line.split("\t")
    try:
        return TokenRow(
            surface=parts[cols.token].lower(),
            lemma=parts[cols.lemma],
            pos=parts[cols.pos],
            head_index=int(parts[cols.head]),
            relation=parts[cols.deprel],
        )
    except (IndexError, ValueError):
        return None


def read_conll(lines: Iterable[str], columns: ConllColumns = ConllColumns()) -> Iterator[list]:
    """Yield sentences as lists of ``TokenRow`` (``None`` for malformed rows).

    Comment lines (``#``) are ignored, as are multiword-token ranges
    (``3-4``) and empty nodes (``5.1``) when an id column is configured.
    """
    sentence: list = []
    for raw in lines:
        line = raw.rstrip("\r\n")
        if not line.strip():
            if sentence:
                yield sentence
                sentence = []
            continue
        if line.startswith("#"):
            continue
        if columns.id is not None:
            tid = line.split("\t", columns.id + 1)[columns.id] if "\t" in line else line
            if "-" in tid or "." in tid:
                continue
        sentence.append(_parse_row(line, columns))
    if sentence:
        yield sentence


def ingest_file(path, columns: ConllColumns = ConllColumns()) -> CorpusIndex:
    """Ingest one file. A corrupt gzip stream drops the whole file."""
    stats = IngestStats()
    try:
        with _open_text(path) as fh:
            index = ingest_conll(read_conll(fh, columns), stats=stats)
    except (OSError, EOFError, zlib.error) as exc:
        log.warning("skipping unreadable corpus file %s: %s", path, exc)
        return CorpusIndex(stats=IngestStats(files_skipped=1))
    index.stats.files_read += 1
    return index


def corpus_files(root) -> list:
    root = Path(root)
    if root.is_file():
        return [root]
    return sorted(p for p in root.rglob("*") if p.is_file() and not p.name.startswith("."))


def ingest_paths(paths: Sequence, columns: ConllColumns = ConllColumns(), workers: int = 1) -> CorpusIndex:
    """Ingest files (in parallel when ``workers > 1``) and merge in path order."""
    index = CorpusIndex()
    if workers > 1 and len(paths) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            shards = list(pool.map(ingest_file, paths, [columns] * len(paths)))
    else:
        shards = [ingest_file(p, columns) for p in paths]
    for shard in shards:
        index = index.merge(shard)
    return index


def collocations_of(index: CorpusIndex, noun: str) -> list:
    """Dependents of ``noun`` as ``(word, count)``, most frequent first, ties A-Z."""
    return index.dependents_of(noun)


def npmi(index: CorpusIndex, dependent: str, head: str) -> Optional[float]:
    """Normalized PMI of a (dependent, head) arc; ``None`` if never observed."""
    if index.pair_total == 0:
        raise ValueError("npmi on an empty index")
    joint = index.pair_count.get((dependent, head), 0)
    if joint == 0:
        return None
    total = index.pair_total
    if joint == total:
        return 1.0
    p_joint = joint / total
    p_dep = index.dep_marginal[dependent] / total
    p_head = index.head_marginal[head] / total
    value = math.log(p_joint / (p_dep * p_head)) / -math.log(p_joint)
    return min(1.0, max(-1.0, value))


def rel_freq(index: CorpusIndex, word: str) -> float:
    if index.token_total == 0:
        raise ValueError("rel_freq on an empty index")
    return index.token_freq.get(word, 0) / index.token_total


# --- snapshot persistence -------------------------------------------------

def save_index(index: CorpusIndex, directory) -> Path:
    """Write the index as sorted TSV tables under ``directory``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    (directory / "VERSION").write_text(SNAPSHOT_VERSION + "\n", encoding="utf-8")

    def dump(name, rows):
        with open(directory / f"{name}.tsv", "w", encoding="utf-8") as fh:
            fh.write(f"# {SNAPSHOT_VERSION}\n")
            for row in rows:
                fh.write("\t".join(str(x) for x in row) + "\n")

    dump("pair_count", ((d, h, n) for (d, h), n in sorted(index.pair_count.items())))
    dump("dep_marginal", sorted(index.dep_marginal.items()))
    dump("head_marginal", sorted(index.head_marginal.items()))
    dump("token_freq", sorted(index.token_freq.items()))
    dump("totals", [("pair_total", index.pair_total), ("token_total", index.token_total)])
    dump("stats", sorted(vars(index.stats).items()))
    return directory


def load_index(directory) -> CorpusIndex:
    directory = Path(directory)
    version = (directory / "VERSION").read_text(encoding="utf-8").strip()
    if version != SNAPSHOT_VERSION:
        raise ValueError(f"unsupported index snapshot version: {version!r}")

    def rows(name):
        with open(directory / f"{name}.tsv", encoding="utf-8") as fh:
            header = fh.readline().rstrip("\n")
            if header != f"# {SNAPSHOT_VERSION}":
                raise ValueError(f"{name}.tsv: bad header {header!r}")
            for line in fh:
                yield line.rstrip("\n").split("\t")

    pairs = {(d, h): int(n) for d, h, n in rows("pair_count")}
    totals = {k: int(v) for k, v in rows("totals")}
    stats = IngestStats(**{k: int(v) for k, v in rows("stats")})
    return CorpusIndex(
        pair_count=pairs,
        dep_marginal={w: int(n) for w, n in rows("dep_marginal")},
        head_marginal={w: int(n) for w, n in rows("head_marginal")},
        pair_total=totals["pair_total"],
        token_freq={w: int(n) for w, n in rows("token_freq")},
        token_total=totals["token_total"],
        stats=stats,
    )
