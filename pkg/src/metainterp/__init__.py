"""Ranked single-word interpretations for nominal metaphors ("X is Y").

Candidates come from adjective/gerund dependents of the topic and vehicle
in a parsed corpus (plus, optionally, word-association norms). They are
scored by embedding similarity to each noun's strongest collocates, NPMI
and corpus frequency, combined log-linearly, then deduplicated with DBSCAN.
"""

__version__ = "0.1.0"

from .candidates import Candidate, Metaphor, generate, load_lexicon, load_norms
from .clustering import ClusterParams, dbscan, dedup
from .corpus import CorpusIndex, ingest_conll, ingest_paths, load_index, read_conll, save_index
from .embeddings import EmbeddingStore, cosine, load_embeddings
from .evaluation import evaluate, evaluate_ablation, load_gold, map_score, mrr, recall_at_k
from .pipeline import PipelineConfig, Resources, interpret, preprocess_metaphor
from .scoring import ScoreVector, Weights, final_score, score_all
from .tuner import Grid, grid_search, split_dev_test
