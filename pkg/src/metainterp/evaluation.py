"""Gold-set loading and ranking metrics (MRR, MAP, Recall@K)."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .candidates import Metaphor
from .pipeline import Interpretation, PipelineConfig, Resources, interpret, preprocess_metaphor

log = logging.getLogger(__name__)

DEFAULT_KS = (5, 10, 15, 25, 50)


@dataclass(frozen=True)
class GoldRecord:
    topic: str
    vehicle: str
    interpretation: str
    participants: int

    def __post_init__(self):
        if self.participants < 1:
            raise ValueError("participants must be at least 1")


@dataclass(frozen=True)
class QualifiedMetaphor:
    metaphor: Metaphor
    gold: frozenset

    def __post_init__(self):
        if not self.gold:
            raise ValueError(f"no qualified interpretations for {self.metaphor}")


class Lemmatizer:
    """Table lookup; unknown words are their own lemma."""

    def __init__(self, table: Optional[Mapping[str, str]] = None):
        self.table = dict(table or {})

    @classmethod
    def from_file(cls, path) -> "Lemmatizer":
        table = {}
        with open(path, encoding="utf-8") as fh:
            for line in fh:
                parts = line.split()
                if len(parts) >= 2 and not line.startswith("#"):
                    table[parts[0].lower()] = parts[1].lower()
        return cls(table)

    def __call__(self, word: str) -> str:
        word = word.lower()
        return self.table.get(word, word)


class SynonymTable:
    """Groups of mutually synonymous words, one group per line."""

    def __init__(self, groups: Iterable[Iterable[str]] = ()):
        self._groups: dict = {}
        for gid, group in enumerate(groups):
            for word in group:
                self._groups.setdefault(word.lower(), set()).add(gid)

    @classmethod
    def from_file(cls, path) -> "SynonymTable":
        with open(path, encoding="utf-8") as fh:
            return cls(
                line.replace(",", " ").split() for line in fh if line.strip() and not line.startswith("#")
            )

    def synonymous(self, a: str, b: str) -> bool:
        return bool(self._groups.get(a, set()) & self._groups.get(b, set()))


@dataclass(frozen=True)
class GoldColumns:
    """0-based columns of the gold TSV; ``condition`` optionally filters rows."""

    topic: int = 0
    vehicle: int = 1
    interpretation: int = 2
    participants: int = 3
    condition: Optional[int] = None
    condition_value: str = "metaphor"


def read_gold(path, columns: GoldColumns = GoldColumns()) -> tuple:
    """Parse gold rows; returns ``(records, skipped_count)``.

    A first line whose participant field is not an integer is a header.
    """
    records = []
    skipped = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh):
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.rstrip("\r\n").split("\t")
            try:
                if columns.condition is not None and parts[columns.condition].strip() != columns.condition_value:
                    continue
                records.append(
                    GoldRecord(
                        topic=parts[columns.topic],
                        vehicle=parts[columns.vehicle],
                        interpretation=parts[columns.interpretation].strip().lower(),
                        participants=int(parts[columns.participants]),
                    )
                )
            except (IndexError, ValueError):
                if lineno == 0:
                    continue
                skipped += 1
    if skipped:
        log.info("%s: skipped %d unparseable gold rows", path, skipped)
    return records, skipped


def qualify(records: Iterable[GoldRecord], min_participants: int = 5, lemmatizer: Callable = Lemmatizer()) -> list:
    """Keep interpretations named by at least ``min_participants`` people.

    Metaphors left without any interpretation are dropped; the rest keep
    their first-seen order.
    """
    grouped: dict = {}
    for rec in records:
        try:
            metaphor = preprocess_metaphor(rec.topic, rec.vehicle)
        except ValueError:
            continue
        bucket = grouped.setdefault(metaphor, set())
        if rec.participants >= min_participants and rec.interpretation:
            bucket.add(lemmatizer(rec.interpretation))
    return [QualifiedMetaphor(m, frozenset(g)) for m, g in grouped.items() if g]


def load_gold(path, min_participants: int = 5, lemmatizer: Callable = Lemmatizer(), columns: GoldColumns = GoldColumns()) -> list:
    records, _ = read_gold(path, columns)
    return qualify(records, min_participants, lemmatizer)


class Matcher:
    """Lemma equality or shared synonym group, checked on words and lemmas."""

    def __init__(self, lemmatizer: Callable = Lemmatizer(), synonyms: Optional[SynonymTable] = None):
        self.lemmatizer = lemmatizer
        self.synonyms = synonyms or SynonymTable()

    def __call__(self, system_word: str, gold_word: str) -> bool:
        return matches(system_word, gold_word, self.lemmatizer, self.synonyms)


def matches(system_word: str, gold_word: str, lemmatizer: Callable = Lemmatizer(), synonyms: Optional[SynonymTable] = None) -> bool:
    ls, lg = lemmatizer(system_word), lemmatizer(gold_word)
    if ls == lg:
        return True
    if synonyms is None:
        return False
    s_forms = {system_word.lower(), ls}
    g_forms = {gold_word.lower(), lg}
    return any(synonyms.synonymous(a, b) for a in s_forms for b in g_forms)


def gold_ranks(results: Sequence[str], gold: Iterable[str], matcher: Callable = matches) -> dict:
    """1-based rank of the best-ranked result matching each gold item (``None`` if unmatched)."""
    ranks = {}
    for g in sorted(gold):
        ranks[g] = next((r for r, word in enumerate(results, 1) if matcher(word, g)), None)
    return ranks


def recall_at_k(results: Sequence[str], gold: Iterable[str], K: int, matcher: Callable = matches) -> float:
    if K < 1:
        raise ValueError("K must be at least 1")
    gold = list(gold)
    if not gold:
        raise ValueError("empty gold set")
    ranks = gold_ranks(results[:K], gold, matcher)
    return sum(r is not None for r in ranks.values()) / len(gold)


def reciprocal_rank(results: Sequence[str], gold: Iterable[str], matcher: Callable = matches) -> float:
    found = [r for r in gold_ranks(results, gold, matcher).values() if r is not None]
    return 1.0 / min(found) if found else 0.0


def average_precision(results: Sequence[str], gold: Iterable[str], matcher: Callable = matches) -> float:
    """Mean over gold items of the precision at the rank where each is found.

    Precision at rank ``r`` counts the distinct ranks at or above ``r`` that
    credit some gold item, so one result matching two gold items cannot push
    precision above 1.
    """
    gold = list(gold)
    if not gold:
        raise ValueError("empty gold set")
    found = sorted(r for r in gold_ranks(results, gold, matcher).values() if r is not None)
    total = 0.0
    for r in found:
        hits = len({x for x in found if x <= r})
        total += hits / r
    return total / len(gold)


def mrr(runs: Sequence[tuple], matcher: Callable = matches) -> float:
    """``runs`` is a sequence of ``(ranked words, gold set)``."""
    if not runs:
        return 0.0
    return sum(reciprocal_rank(res, gold, matcher) for res, gold in runs) / len(runs)


def map_score(runs: Sequence[tuple], matcher: Callable = matches) -> float:
    if not runs:
        return 0.0
    return sum(average_precision(res, gold, matcher) for res, gold in runs) / len(runs)


@dataclass
class EvalReport:
    mrr: float
    map: float
    recall_at: dict
    per_metaphor: list = field(default_factory=list)  # dicts: metaphor, gold, ranks, rr, ap, recall

    def metric(self, name: str) -> float:
        """Value by metric id: ``MRR``, ``MAP`` or ``R@K``."""
        key = parse_metric(name)
        if key == "MRR":
            return self.mrr
        if key == "MAP":
            return self.map
        return self.recall_at[key]

    def rows(self) -> list:
        out = [("MRR", "", self.mrr), ("MAP", "", self.map)]
        out += [("Recall", K, v) for K, v in sorted(self.recall_at.items())]
        return out


def parse_metric(name) -> object:
    """Normalise a metric id to ``"MRR"``, ``"MAP"`` or an integer K."""
    if isinstance(name, int):
        return name
    text = str(name).strip().upper()
    if text in ("MRR", "MAP"):
        return text
    for prefix in ("RECALL@", "R@", "@"):
        if text.startswith(prefix):
            return int(text[len(prefix):])
    raise ValueError(f"unknown metric {name!r}")


def metric_label(key) -> str:
    return key if isinstance(key, str) else f"@{key}"


def report_from_runs(runs: Sequence[tuple], Ks: Sequence[int] = DEFAULT_KS, matcher: Callable = matches, labels: Sequence = ()) -> EvalReport:
    per = []
    for i, (res, gold) in enumerate(runs):
        ranks = gold_ranks(res, gold, matcher)
        per.append({
            "metaphor": str(labels[i]) if labels else str(i),
            "gold": sorted(gold),
            "ranks": ranks,
            "rr": reciprocal_rank(res, gold, matcher),
            "ap": average_precision(res, gold, matcher),
            "recall": {K: sum(r is not None and r <= K for r in ranks.values()) / len(ranks) for K in Ks},
        })
    n = len(per)
    return EvalReport(
        mrr=sum(p["rr"] for p in per) / n if n else 0.0,
        map=sum(p["ap"] for p in per) / n if n else 0.0,
        recall_at={K: (sum(p["recall"][K] for p in per) / n if n else 0.0) for K in Ks},
        per_metaphor=per,
    )


def evaluate(
    qualified: Sequence[QualifiedMetaphor],
    resources: Resources,
    config: PipelineConfig = PipelineConfig(),
    matcher: Callable = matches,
    Ks: Sequence[int] = DEFAULT_KS,
) -> EvalReport:
    interps = [interpret(q.metaphor, resources, config) for q in qualified]
    return _report(qualified, interps, Ks, matcher)


def _report(qualified, interps: Sequence[Interpretation], Ks, matcher) -> EvalReport:
    runs = [(it.words, q.gold) for q, it in zip(qualified, interps)]
    return report_from_runs(runs, Ks, matcher, labels=[q.metaphor for q in qualified])


def evaluate_ablation(
    qualified: Sequence[QualifiedMetaphor],
    resources: Resources,
    config: PipelineConfig = PipelineConfig(),
    matcher: Callable = matches,
    Ks: Sequence[int] = DEFAULT_KS,
) -> dict:
    """With- and without-clustering reports from a single scoring pass."""
    with_c = [interpret(q.metaphor, resources, config) for q in qualified]
    without = [
        Interpretation(it.metaphor, [(sc.word, sc.final) for sc in it.scored[: config.top_n_output]], it.scored, it.diagnostic)
        for it in with_c
    ]
    return {
        "with_clustering": _report(qualified, with_c, Ks, matcher),
        "without_clustering": _report(qualified, without, Ks, matcher),
    }


# --- report formatting ----------------------------------------------------

def format_table(reports: Mapping[str, EvalReport], Ks: Sequence[int] = DEFAULT_KS, first_column: str = "Optimization") -> str:
    """Human-readable table, one row per report (MRR, MAP, then @K columns)."""
    head = [first_column, "MRR", "MAP"] + [f"@{K}" for K in Ks]
    lines = ["\t".join(head)]
    for name, rep in reports.items():
        cells = [name, f"{rep.mrr:.3f}", f"{rep.map:.3f}"] + [f"{rep.recall_at[K]:.3f}" for K in Ks]
        lines.append("\t".join(cells))
    return "\n".join(lines) + "\n"


def format_rows(reports: Mapping[str, EvalReport]) -> str:
    """Machine-readable ``run<TAB>metric<TAB>K<TAB>value`` rows."""
    lines = ["run\tmetric\tK\tvalue"]
    for name, rep in reports.items():
        for metric, K, value in rep.rows():
            lines.append(f"{name}\t{metric}\t{K}\t{value:.10f}")
    return "\n".join(lines) + "\n"
