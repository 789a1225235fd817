"""Brute-force grid search over score weights and clustering parameters.

Every grid point is evaluated on the development metaphors. Scores and
cluster partitions do not depend on the weights, so they are computed once
per metaphor; a grid point then only costs a weighted sum, a sort and the
per-cluster cap. The ranking reproduces :func:`metainterp.pipeline.interpret`
exactly.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import logging
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from .candidates import NoCandidatesError, generate
from .clustering import ClusterParams, dbscan_labels, keep_top_per_cluster
from .evaluation import (
    DEFAULT_KS,
    EvalReport,
    QualifiedMetaphor,
    evaluate,
    matches,
    metric_label,
    parse_metric,
    report_from_runs,
)
from .pipeline import PipelineConfig, Resources
from .scoring import Weights, log_scores, score_vector, significant_collocations

log = logging.getLogger(__name__)

PARAMS = ("sem_topic", "sem_vehicle", "npmi_topic", "npmi_vehicle", "freq", "epsilon", "mu", "n_per_cluster")


def frange(start: float, stop: float, step: float) -> list:
    """Inclusive arithmetic range, rounded to kill float drift."""
    if step <= 0:
        raise ValueError("step must be positive")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 10) for i in range(max(n, 0))]


@dataclass(frozen=True)
class Grid:
    sem_topic: tuple = (0.1, 0.6)
    sem_vehicle: tuple = (0.1, 0.6)
    npmi_topic: tuple = (0.1, 0.6)
    npmi_vehicle: tuple = (0.1, 0.6)
    freq: tuple = (1.0, 4.0, 7.0, 10.0)
    epsilon: tuple = (1.0, 2.0, 3.0, 4.0, 5.0, 6.0)
    mu: tuple = (1, 2, 3, 4, 5)
    n_per_cluster: tuple = (1, 4, 7, 10)
    metric: str = "R@50"

    def __post_init__(self):
        for name in PARAMS:
            values = tuple(getattr(self, name))
            if not values:
                raise ValueError(f"grid list {name!r} is empty")
            if not all(np.isfinite(v) for v in values):
                raise ValueError(f"grid list {name!r} has non-finite values")
            object.__setattr__(self, name, values)
        parse_metric(self.metric)

    @classmethod
    def from_ranges(
        cls,
        weight_range=(0.1, 1.0),
        weight_step: float = 0.5,
        freq_range=(1.0, 10.0),
        freq_step: float = 3.0,
        epsilon_range=(1.0, 6.0),
        epsilon_step: float = 1.0,
        mu_range=(1, 5),
        n_range=(1, 12),
        n_step: int = 3,
        metric: str = "R@50",
    ) -> "Grid":
        w = tuple(frange(*weight_range, weight_step))
        return cls(
            sem_topic=w,
            sem_vehicle=w,
            npmi_topic=w,
            npmi_vehicle=w,
            freq=tuple(frange(*freq_range, freq_step)),
            epsilon=tuple(frange(*epsilon_range, epsilon_step)),
            mu=tuple(range(mu_range[0], mu_range[1] + 1)),
            n_per_cluster=tuple(range(n_range[0], n_range[1] + 1, n_step)),
            metric=metric,
        )

    @property
    def size(self) -> int:
        out = 1
        for name in PARAMS:
            out *= len(getattr(self, name))
        return out

    def points(self):
        """Cartesian product, first parameter outermost."""
        for combo in itertools.product(*(getattr(self, name) for name in PARAMS)):
            yield dict(zip(PARAMS, combo))


def config_for(params: dict, base: PipelineConfig = PipelineConfig()) -> PipelineConfig:
    return replace(
        base,
        weights=Weights(*(params[name] for name in PARAMS[:5])),
        cluster=ClusterParams(params["epsilon"], int(params["mu"]), int(params["n_per_cluster"])),
    )


@dataclass
class TuneResult:
    metric: str
    best_params: dict
    best_value: float
    best_by_metric: dict  # metric label -> {"params": ..., "value": ...}
    trace: list = field(default_factory=list, repr=False)  # (index, params, metrics)

    def to_json(self) -> dict:
        return {
            "metric": self.metric,
            "best_params": self.best_params,
            "best_value": self.best_value,
            "best_by_metric": self.best_by_metric,
            "points": len(self.trace),
        }


def split_dev_test(metaphors: Sequence, fraction: float = 0.5, seed: int = 0) -> tuple:
    """Seeded shuffle, then the first ``floor(fraction * n)`` items are dev."""
    if not 0 < fraction < 1:
        raise ValueError("fraction must be strictly between 0 and 1")
    items = list(metaphors)
    if len(items) < 2:
        raise ValueError("need at least two metaphors to split")
    random.Random(seed).shuffle(items)
    cut = int(fraction * len(items))
    if cut == 0 or cut == len(items):
        raise ValueError(f"fraction {fraction} leaves an empty side for {len(items)} metaphors")
    return items[:cut], items[cut:]


# --- precomputation -------------------------------------------------------

@dataclass
class _Prepared:
    words: list  # candidates with usable vectors, alphabetical
    logs: np.ndarray  # (n, 5) log-transformed scores
    vectors: np.ndarray
    gold: frozenset
    match: dict  # (word, gold) -> bool
    partitions: dict = field(default_factory=dict)  # (epsilon, mu) -> labels

    def labels(self, epsilon: float, mu: int) -> np.ndarray:
        key = (epsilon, mu)
        if key not in self.partitions:
            self.partitions[key] = dbscan_labels(self.words, self.vectors, epsilon, mu)
        return self.partitions[key]


def prepare(q: QualifiedMetaphor, resources: Resources, base: PipelineConfig, matcher: Callable) -> _Prepared:
    m = q.metaphor
    try:
        cands = generate(m, resources.index, resources.lexicon, resources.norms, base.use_associations)
    except NoCandidatesError:
        cands = []
    store = resources.store
    topic_anchors = significant_collocations(resources.index, m.topic, base.k)
    vehicle_anchors = significant_collocations(resources.index, m.vehicle, base.k)
    words, logs, vecs = [], [], []
    for c in cands:
        row = store.row(c.word)
        if row is None or store.norms[row] == 0.0:
            continue
        sv = score_vector(c.word, m, resources.index, store, topic_anchors, vehicle_anchors)
        words.append(c.word)
        logs.append(log_scores(sv))
        vecs.append(store.matrix[row])
    dims = store.dims
    match = {(w, g): bool(matcher(w, g)) for w in words for g in q.gold}
    return _Prepared(
        words,
        np.array(logs, dtype=float).reshape(-1, 5),
        np.array(vecs, dtype=float).reshape(-1, dims),
        q.gold,
        match,
    )


def _ranked_words(p: _Prepared, params: dict, top_n: int) -> list:
    if not p.words:
        return []
    # column-wise left-to-right sum; mirrors scoring.combine bit for bit
    finals = np.zeros(len(p.words))
    for j, name in enumerate(PARAMS[:5]):
        finals = finals + params[name] * p.logs[:, j]
    order = np.lexsort((np.arange(len(p.words)), -finals))
    labels = p.labels(params["epsilon"], int(params["mu"]))[order]
    keep = keep_top_per_cluster(labels.tolist(), int(params["n_per_cluster"]))
    return [p.words[order[i]] for i in keep[:top_n]]


def _evaluate_point(prepared: Sequence[_Prepared], params: dict, top_n: int, Ks: Sequence[int]) -> dict:
    runs = [(_ranked_words(p, params, top_n), p.gold) for p in prepared]
    lookup = {}
    for p in prepared:
        lookup.update(p.match)
    rep = report_from_runs(runs, Ks, matcher=lambda w, g: lookup[(w, g)])
    return report_metrics(rep)


def report_metrics(rep: EvalReport) -> dict:
    out = {"MRR": rep.mrr, "MAP": rep.map}
    out.update({f"@{K}": v for K, v in rep.recall_at.items()})
    return out


# worker-process state for parallel evaluation
_WORKER: dict = {}


def _init_worker(prepared, top_n, Ks):
    _WORKER.update(prepared=prepared, top_n=top_n, Ks=Ks)


def _worker_eval(params: dict) -> dict:
    return _evaluate_point(_WORKER["prepared"], params, _WORKER["top_n"], _WORKER["Ks"])


# --- trace checkpointing --------------------------------------------------

def _fingerprint(dev, resources: Resources, grid: Grid, base: PipelineConfig, Ks) -> str:
    blob = json.dumps(
        {
            "grid": {name: list(getattr(grid, name)) for name in PARAMS},
            "dev": [[q.metaphor.topic, q.metaphor.vehicle, sorted(q.gold)] for q in dev],
            "k": base.k,
            "top_n": base.top_n_output,
            "assoc": base.use_associations,
            "Ks": list(Ks),
            "index": [resources.index.pair_total, resources.index.token_total],
            "store": [len(resources.store), resources.store.dims],
        },
        sort_keys=True,
    )
    return hashlib.sha256(blob.encode()).hexdigest()[:16]


def _read_trace(path: Path, fingerprint: str) -> dict:
    if not path.exists():
        return {}
    raw = path.read_bytes()
    # drop a torn final line left by an interrupted write
    if raw and not raw.endswith(b"\n"):
        raw = raw[: raw.rfind(b"\n") + 1]
        path.write_bytes(raw)
    lines = raw.decode("utf-8").splitlines()
    if not lines:
        return {}
    if lines[0] != f"# grid-trace {fingerprint}":
        raise ValueError(f"{path} belongs to a different grid/dev set ({lines[0]!r}); remove it or pick another path")
    done = {}
    for line in lines[2:]:
        idx, params, metrics = line.split("\t")
        done[int(idx)] = (json.loads(params), json.loads(metrics))
    return done


def grid_search(
    dev: Sequence[QualifiedMetaphor],
    resources: Resources,
    grid: Grid,
    base: PipelineConfig = PipelineConfig(),
    matcher: Callable = matches,
    Ks: Sequence[int] = DEFAULT_KS,
    trace_path=None,
    workers: int = 1,
    chunk: int = 256,
    on_point: Optional[Callable[[int], None]] = None,
) -> TuneResult:
    """Evaluate every grid point and return the best under ``grid.metric``.

    Ties go to the earliest point in iteration order. With ``trace_path`` the
    evaluated points are appended to disk as they finish, and a rerun with
    the same inputs skips them. ``on_point`` is called with each point index
    after it is recorded.
    """
    key = parse_metric(grid.metric)
    Ks = tuple(sorted(set(Ks) | ({key} if isinstance(key, int) else set())))
    target = metric_label(key)
    prepared = [prepare(q, resources, base, matcher) for q in dev]

    done: dict = {}
    fh = None
    if trace_path is not None:
        trace_path = Path(trace_path)
        fp = _fingerprint(dev, resources, grid, base, Ks)
        done = _read_trace(trace_path, fp)
        fresh = not trace_path.exists() or trace_path.stat().st_size == 0
        fh = open(trace_path, "a", encoding="utf-8")
        if fresh:
            fh.write(f"# grid-trace {fp}\nindex\tparams\tmetrics\n")
            fh.flush()
        if done:
            log.info("resuming grid search: %d of %d points already traced", len(done), grid.size)

    pending = [(i, p) for i, p in enumerate(grid.points()) if i not in done]
    pool = ProcessPoolExecutor(workers, initializer=_init_worker, initargs=(prepared, base.top_n_output, Ks)) if workers > 1 else None
    try:
        for start in range(0, len(pending), chunk):
            batch = pending[start : start + chunk]
            if pool is not None:
                results = list(pool.map(_worker_eval, [p for _, p in batch]))
            else:
                results = [_evaluate_point(prepared, p, base.top_n_output, Ks) for _, p in batch]
            for (i, params), metrics in zip(batch, results):
                done[i] = (params, metrics)
                if fh is not None:
                    fh.write(f"{i}\t{json.dumps(params)}\t{json.dumps(metrics)}\n")
                    fh.flush()
                if on_point is not None:
                    on_point(i)
    finally:
        if pool is not None:
            pool.shutdown()
        if fh is not None:
            fh.close()

    trace = [(i, done[i][0], done[i][1]) for i in sorted(done)]
    best_by_metric = {}
    for label in trace[0][2]:
        bi, bp, bm = max(trace, key=lambda t: (t[2][label], -t[0]))
        best_by_metric[label] = {"params": bp, "value": bm[label], "index": bi}
    best = best_by_metric[target]
    return TuneResult(target, best["params"], best["value"], best_by_metric, trace)


def evaluate_tuned(
    qualified: Sequence[QualifiedMetaphor],
    resources: Resources,
    result: TuneResult,
    base: PipelineConfig = PipelineConfig(),
    matcher: Callable = matches,
    Ks: Sequence[int] = DEFAULT_KS,
) -> dict:
    """One full report per optimisation metric, each using that metric's best point."""
    return {
        label: evaluate(qualified, resources, config_for(best["params"], base), matcher, Ks)
        for label, best in result.best_by_metric.items()
    }
