"""DBSCAN over candidate vectors and per-cluster deduplication of a ranking."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial.distance import cdist

from .embeddings import EmbeddingStore

NOISE = -1


@dataclass(frozen=True)
class ClusterParams:
    epsilon: float = 4.0
    mu: int = 5
    n_per_cluster: int = 1

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError("epsilon must be positive")
        if self.mu < 1:
            raise ValueError("mu must be at least 1")
        if self.n_per_cluster < 1:
            raise ValueError("n_per_cluster must be at least 1")


@dataclass(frozen=True)
class ClusterAssignment:
    labels: dict  # word -> cluster id, or NOISE

    def clusters(self) -> dict:
        out: dict = {}
        for word, label in self.labels.items():
            if label != NOISE:
                out.setdefault(label, []).append(word)
        return out


def dbscan_labels(words: Sequence[str], X: np.ndarray, epsilon: float, mu: int) -> np.ndarray:
    """Label array for the rows of ``X`` (``NOISE`` for noise).

    A point is core when at least ``mu`` points (itself included) lie within
    Euclidean distance ``epsilon``. Core points within ``epsilon`` of each
    other share a cluster. A border point joins the cluster of its
    alphabetically smallest core neighbour. Cluster ids follow the input
    position of each cluster's first core point.
    """
    n = len(words)
    labels = np.full(n, NOISE, dtype=int)
    if n == 0:
        return labels
    near = cdist(X, X) <= epsilon
    core = near.sum(axis=1) >= mu
    core_idx = np.flatnonzero(core)
    if core_idx.size == 0:
        return labels

    sub = near[np.ix_(core_idx, core_idx)]
    _, comp = connected_components(csr_matrix(sub), directed=False)
    renumber: dict = {}
    for c in comp:  # core_idx is ascending, so this is input order
        renumber.setdefault(c, len(renumber))
    labels[core_idx] = [renumber[c] for c in comp]

    for i in np.flatnonzero(~core):
        core_nbrs = np.flatnonzero(near[i] & core)
        if core_nbrs.size:
            anchor = min(core_nbrs, key=lambda j: words[j])
            labels[i] = labels[anchor]
    return labels


def dbscan(points: Sequence[tuple], params: ClusterParams) -> ClusterAssignment:
    """Cluster ``(word, vector)`` points; words must be unique."""
    if not points:
        return ClusterAssignment({})
    words = [w for w, _ in points]
    if len(set(words)) != len(words):
        raise ValueError("duplicate words in dbscan input")
    X = np.vstack([np.asarray(v, dtype=float) for _, v in points])
    labels = dbscan_labels(words, X, params.epsilon, params.mu)
    return ClusterAssignment(dict(zip(words, labels.tolist())))


def keep_top_per_cluster(labels: Sequence[int], n_per_cluster: int) -> list:
    """Indexes surviving a per-cluster cap, for labels given in rank order."""
    seen: dict = {}
    keep = []
    for i, label in enumerate(labels):
        if label == NOISE:
            keep.append(i)
            continue
        seen[label] = seen.get(label, 0) + 1
        if seen[label] <= n_per_cluster:
            keep.append(i)
    return keep


def dedup(ranked: Sequence, store: EmbeddingStore, params: ClusterParams) -> list:
    """Keep the ``n_per_cluster`` best-ranked candidates of every cluster.

    ``ranked`` must already be sorted best first. Noise points and
    candidates without vectors count as singleton clusters, so they always
    survive. The result is a subsequence of ``ranked``.
    """
    points = [(sc.word, store.get(sc.word)) for sc in ranked if sc.word in store]
    labels = dbscan(points, params).labels
    keep = keep_top_per_cluster([labels.get(sc.word, NOISE) for sc in ranked], params.n_per_cluster)
    return [ranked[i] for i in keep]
